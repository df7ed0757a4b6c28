#include "lnsp/files.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace lnsp {

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_trajectories(std::ostream& out, const std::vector<Trajectory>& trajs) {
  out << "traj_id,lon,lat,t\n";
  out << std::setprecision(17);
  for (const auto& tr : trajs) {
    for (const auto& p : tr.points) {
      out << tr.id << ',' << p.lon << ',' << p.lat << ',' << p.t << '\n';
    }
  }
}

std::vector<Trajectory> read_trajectories(std::istream& in) {
  std::vector<Trajectory> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "traj_id,lon,lat,t" || line[0] == '#') continue;
    auto f = split(line, ',');
    if (f.size() != 4) {
      throw std::runtime_error("trajectory CSV line " + std::to_string(line_no) +
                               ": expected 4 fields");
    }
    GeoPoint p;
    try {
      p.lon = std::stod(f[1]);
      p.lat = std::stod(f[2]);
      p.t = std::stoll(f[3]);
    } catch (const std::exception&) {
      throw std::runtime_error("trajectory CSV line " + std::to_string(line_no) +
                               ": bad number");
    }
    if (out.empty() || out.back().id != f[0]) {
      out.push_back({f[0], {}});
    }
    out.back().points.push_back(p);
  }
  for (auto& tr : out) tr.validate();
  return out;
}

void write_routes(std::ostream& out, const RoadNetwork& net,
                  const std::map<std::string, NetPath>& routes) {
  out << "# R <route_id> <seg_id> ...\n";
  for (const auto& [rid, path] : routes) {
    out << "R " << rid;
    for (int idx : path.segments) out << ' ' << net.segment(idx).id;
    out << '\n';
  }
}

std::map<std::string, NetPath> read_routes(std::istream& in, const RoadNetwork& net) {
  std::map<std::string, NetPath> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag != "R") {
      throw std::runtime_error("routes file line " + std::to_string(line_no) +
                               ": expected 'R'");
    }
    std::string rid;
    ss >> rid;
    std::vector<int> segs;
    std::string sid;
    while (ss >> sid) {
      int idx = net.segment_index(sid);
      if (idx < 0) {
        throw std::runtime_error("routes file line " + std::to_string(line_no) +
                                 ": unknown segment '" + sid + "'");
      }
      segs.push_back(idx);
    }
    if (segs.empty()) {
      throw std::runtime_error("routes file line " + std::to_string(line_no) +
                               ": empty route");
    }
    out.emplace(rid, full_path(net, segs));
  }
  return out;
}

void write_route_tags(std::ostream& out, const std::vector<RouteTrajectory>& tagged) {
  out << "traj_id,route_id\n";
  for (const auto& rt : tagged) out << rt.traj.id << ',' << rt.route_id << '\n';
}

std::map<std::string, std::string> read_route_tags(std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "traj_id,route_id" || line[0] == '#') continue;
    auto f = split(line, ',');
    if (f.size() != 2) throw std::runtime_error("route-tag CSV: expected 2 fields");
    out[f[0]] = f[1];
  }
  return out;
}

void write_ground_truth(std::ostream& out, const RoadNetwork& net,
                        const GroundTruth& gt) {
  out << "traj_id,segments,offsets\n";
  out << std::setprecision(17);
  for (const auto& [tid, entry] : gt) {
    out << tid << ',';
    for (std::size_t i = 0; i < entry.path.segments.size(); ++i) {
      if (i) out << ';';
      out << net.segment(entry.path.segments[i]).id;
    }
    out << ',';
    for (std::size_t i = 0; i < entry.offsets.size(); ++i) {
      if (i) out << ';';
      out << entry.offsets[i];
    }
    out << '\n';
  }
}

GroundTruth read_ground_truth(std::istream& in, const RoadNetwork& net) {
  GroundTruth out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "traj_id,segments,offsets" || line[0] == '#') continue;
    auto f = split(line, ',');
    if (f.size() != 3) {
      throw std::runtime_error("ground-truth CSV line " + std::to_string(line_no) +
                               ": expected 3 fields");
    }
    GroundTruthEntry entry;
    entry.traj_id = f[0];
    std::vector<int> segs;
    for (const auto& sid : split(f[1], ';')) {
      int idx = net.segment_index(sid);
      if (idx < 0) {
        throw std::runtime_error("ground-truth CSV line " + std::to_string(line_no) +
                                 ": unknown segment '" + sid + "'");
      }
      segs.push_back(idx);
    }
    entry.path = full_path(net, segs);
    for (const auto& o : split(f[2], ';')) entry.offsets.push_back(std::stod(o));
    out.emplace(entry.traj_id, std::move(entry));
  }
  return out;
}

void write_match_results(std::ostream& out, const RoadNetwork& net,
                         const std::vector<MatchResult>& results) {
  out << "traj_id,af,segments,points\n";
  out << std::setprecision(17);
  for (const auto& res : results) {
    if (!res.error.empty()) {
      out << res.traj_id << ",FAILED,," << '\n';
      continue;
    }
    for (std::size_t fi = 0; fi < res.fragments.size(); ++fi) {
      if (fi) out << res.traj_id << ",GAP,,\n";
      const MatchedPath& mp = res.fragments[fi];
      out << res.traj_id << ',' << mp.total_af << ',';
      for (std::size_t i = 0; i < mp.path.segments.size(); ++i) {
        if (i) out << ';';
        out << net.segment(mp.path.segments[i]).id;
      }
      out << ',';
      bool first = true;
      for (const auto& [idx, cp] : mp.per_point) {
        if (!first) out << ' ';
        first = false;
        out << idx << ':' << cp.segment_id << ':' << cp.offset << ':' << cp.err;
      }
      out << '\n';
    }
  }
}

void write_trajectories_file(const std::string& path, const std::vector<Trajectory>& trajs) {
  auto out = open_out(path);
  write_trajectories(out, trajs);
}

std::vector<Trajectory> read_trajectories_file(const std::string& path) {
  auto in = open_in(path);
  return read_trajectories(in);
}

void write_routes_file(const std::string& path, const RoadNetwork& net,
                       const std::map<std::string, NetPath>& routes) {
  auto out = open_out(path);
  write_routes(out, net, routes);
}

std::map<std::string, NetPath> read_routes_file(const std::string& path,
                                                const RoadNetwork& net) {
  auto in = open_in(path);
  return read_routes(in, net);
}

void write_route_tags_file(const std::string& path, const std::vector<RouteTrajectory>& tagged) {
  auto out = open_out(path);
  write_route_tags(out, tagged);
}

std::map<std::string, std::string> read_route_tags_file(const std::string& path) {
  auto in = open_in(path);
  return read_route_tags(in);
}

void write_ground_truth_file(const std::string& path, const RoadNetwork& net,
                             const GroundTruth& gt) {
  auto out = open_out(path);
  write_ground_truth(out, net, gt);
}

GroundTruth read_ground_truth_file(const std::string& path, const RoadNetwork& net) {
  auto in = open_in(path);
  return read_ground_truth(in, net);
}

void write_match_results_file(const std::string& path, const RoadNetwork& net,
                              const std::vector<MatchResult>& results) {
  auto out = open_out(path);
  write_match_results(out, net, results);
}

}  // namespace lnsp
