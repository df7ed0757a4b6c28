#include "lnsp/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lnsp {

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& msg) {
  throw std::runtime_error("network parse error at line " +
                           std::to_string(line_no) + ": " + msg);
}

}  // namespace

RoadNetwork RoadNetwork::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  return load(in);
}

RoadNetwork RoadNetwork::load(std::istream& in) {
  RoadNetwork net;
  std::string line;
  int line_no = 0;
  struct RawSeg {
    std::string id, start, end;
    double speed;
    std::vector<GeoPoint> mids;
    int line_no;
  };
  std::vector<RawSeg> raw;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag[0] == '#') continue;
    if (tag == "N") {
      Node nd;
      if (!(ss >> nd.id >> nd.pos.lon >> nd.pos.lat)) {
        parse_fail(line_no, "expected 'N <id> <lon> <lat>'");
      }
      if (!std::isfinite(nd.pos.lon) || !std::isfinite(nd.pos.lat)) {
        parse_fail(line_no, "non-finite node coordinate");
      }
      if (net.node_by_id_.count(nd.id)) {
        parse_fail(line_no, "duplicate node id '" + nd.id + "'");
      }
      net.node_by_id_[nd.id] = static_cast<int>(net.nodes_.size());
      net.nodes_.push_back(std::move(nd));
    } else if (tag == "S") {
      RawSeg rs;
      rs.line_no = line_no;
      if (!(ss >> rs.id >> rs.start >> rs.end >> rs.speed)) {
        parse_fail(line_no, "expected 'S <id> <start> <end> <speed> [lon lat ...]'");
      }
      double lon, lat;
      while (ss >> lon) {
        if (!(ss >> lat)) parse_fail(line_no, "odd coordinate count in geometry");
        rs.mids.push_back({lon, lat, -1});
      }
      raw.push_back(std::move(rs));
    } else {
      parse_fail(line_no, "unknown record tag '" + tag + "'");
    }
  }
  for (auto& rs : raw) {
    Segment seg;
    seg.id = rs.id;
    seg.speed_mps = rs.speed;
    auto s = net.node_by_id_.find(rs.start);
    if (s == net.node_by_id_.end()) {
      parse_fail(rs.line_no, "dangling node reference '" + rs.start + "'");
    }
    auto e = net.node_by_id_.find(rs.end);
    if (e == net.node_by_id_.end()) {
      parse_fail(rs.line_no, "dangling node reference '" + rs.end + "'");
    }
    seg.start = s->second;
    seg.end = e->second;
    seg.geometry.push_back(net.nodes_[seg.start].pos);
    for (auto& m : rs.mids) seg.geometry.push_back(m);
    seg.geometry.push_back(net.nodes_[seg.end].pos);
    if (net.seg_by_id_.count(seg.id)) {
      parse_fail(rs.line_no, "duplicate segment id '" + seg.id + "'");
    }
    net.seg_by_id_[seg.id] = static_cast<int>(net.segments_.size());
    net.segments_.push_back(std::move(seg));
  }
  net.finalize();
  return net;
}

RoadNetwork RoadNetwork::build(std::vector<Node> nodes,
                               std::vector<Segment> segments) {
  RoadNetwork net;
  net.nodes_ = std::move(nodes);
  net.segments_ = std::move(segments);
  for (std::size_t i = 0; i < net.nodes_.size(); ++i) {
    net.node_by_id_[net.nodes_[i].id] = static_cast<int>(i);
  }
  for (std::size_t i = 0; i < net.segments_.size(); ++i) {
    auto& seg = net.segments_[i];
    if (seg.start < 0 || seg.start >= static_cast<int>(net.nodes_.size()) ||
        seg.end < 0 || seg.end >= static_cast<int>(net.nodes_.size())) {
      throw std::runtime_error("segment '" + seg.id + "' references missing node");
    }
    if (seg.geometry.empty()) {
      seg.geometry = {net.nodes_[seg.start].pos, net.nodes_[seg.end].pos};
    }
    net.seg_by_id_[seg.id] = static_cast<int>(i);
  }
  net.finalize();
  return net;
}

void RoadNetwork::finalize() {
  if (nodes_.empty()) {
    ref_ = PlanarRef::at(0.0, 0.0);
  } else {
    double lon = 0.0, lat = 0.0;
    for (const auto& nd : nodes_) {
      lon += nd.pos.lon;
      lat += nd.pos.lat;
    }
    ref_ = PlanarRef::at(lon / nodes_.size(), lat / nodes_.size());
  }
  for (auto& nd : nodes_) nd.xy = ref_.to_xy(nd.pos);

  out_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    auto& seg = segments_[i];
    seg.idx = static_cast<int>(i);
    std::vector<XY> pts;
    pts.reserve(seg.geometry.size());
    for (const auto& g : seg.geometry) pts.push_back(ref_.to_xy(g));
    seg.line = Polyline(std::move(pts));
    seg.length = seg.line.length();
    if (seg.length <= 0.0) {
      throw std::runtime_error("zero-length segment '" + seg.id + "'");
    }
    out_[seg.start].push_back(seg.idx);
  }
  // deterministic adjacency order
  for (auto& lst : out_) {
    std::sort(lst.begin(), lst.end(), [this](int a, int b) {
      return segments_[a].id < segments_[b].id;
    });
  }

  // spatial index
  XY lo, hi;
  bounds(lo, hi);
  if (segments_.empty()) {
    gcols_ = grows_ = 0;
    return;
  }
  const double pad = 10.0;
  grid_lo_ = {lo.x - pad, lo.y - pad};
  gcols_ = std::max(1, static_cast<int>(std::ceil((hi.x - grid_lo_.x + pad) / cell_)));
  grows_ = std::max(1, static_cast<int>(std::ceil((hi.y - grid_lo_.y + pad) / cell_)));
  cell_segs_.assign(static_cast<std::size_t>(gcols_) * grows_, {});
  for (const auto& seg : segments_) {
    const auto& pts = seg.line.points();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      int c0 = static_cast<int>(std::floor((std::min(pts[i].x, pts[i + 1].x) - grid_lo_.x) / cell_));
      int c1 = static_cast<int>(std::floor((std::max(pts[i].x, pts[i + 1].x) - grid_lo_.x) / cell_));
      int r0 = static_cast<int>(std::floor((std::min(pts[i].y, pts[i + 1].y) - grid_lo_.y) / cell_));
      int r1 = static_cast<int>(std::floor((std::max(pts[i].y, pts[i + 1].y) - grid_lo_.y) / cell_));
      c0 = std::clamp(c0, 0, gcols_ - 1);
      c1 = std::clamp(c1, 0, gcols_ - 1);
      r0 = std::clamp(r0, 0, grows_ - 1);
      r1 = std::clamp(r1, 0, grows_ - 1);
      for (int r = r0; r <= r1; ++r) {
        for (int c = c0; c <= c1; ++c) {
          auto& lst = cell_segs_[static_cast<std::size_t>(r) * gcols_ + c];
          if (lst.empty() || lst.back() != seg.idx) lst.push_back(seg.idx);
        }
      }
    }
  }
}

void RoadNetwork::bounds(XY& lo, XY& hi) const {
  lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  hi = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};
  for (const auto& nd : nodes_) {
    lo.x = std::min(lo.x, nd.xy.x);
    lo.y = std::min(lo.y, nd.xy.y);
    hi.x = std::max(hi.x, nd.xy.x);
    hi.y = std::max(hi.y, nd.xy.y);
  }
  for (const auto& seg : segments_) {
    for (const auto& p : seg.line.points()) {
      lo.x = std::min(lo.x, p.x);
      lo.y = std::min(lo.y, p.y);
      hi.x = std::max(hi.x, p.x);
      hi.y = std::max(hi.y, p.y);
    }
  }
  if (nodes_.empty()) lo = hi = XY{0.0, 0.0};
}

int RoadNetwork::node_index(const std::string& id) const {
  auto it = node_by_id_.find(id);
  return it == node_by_id_.end() ? -1 : it->second;
}

int RoadNetwork::segment_index(const std::string& id) const {
  auto it = seg_by_id_.find(id);
  return it == seg_by_id_.end() ? -1 : it->second;
}

CandidatePoint RoadNetwork::project_xy(const XY& q, const Segment& seg) const {
  PolyProjection pp = seg.line.project(q);
  CandidatePoint cp;
  cp.xy = pp.point;
  cp.position = ref_.to_geo(pp.point);
  cp.segment = seg.idx;
  cp.segment_id = seg.id;
  cp.offset = pp.offset;
  cp.err = pp.dist;
  return cp;
}

CandidatePoint RoadNetwork::project(const GeoPoint& point, const Segment& seg) const {
  return project_xy(ref_.to_xy(point), seg);
}

std::vector<CandidatePoint> RoadNetwork::candidates(const GeoPoint& point,
                                                    double radius) const {
  return candidates_xy(ref_.to_xy(point), radius);
}

std::vector<CandidatePoint> RoadNetwork::candidates_xy(const XY& q,
                                                       double radius) const {
  std::vector<CandidatePoint> out;
  if (segments_.empty() || radius <= 0.0) return out;
  int c0 = std::clamp(static_cast<int>(std::floor((q.x - radius - grid_lo_.x) / cell_)), 0, gcols_ - 1);
  int c1 = std::clamp(static_cast<int>(std::floor((q.x + radius - grid_lo_.x) / cell_)), 0, gcols_ - 1);
  int r0 = std::clamp(static_cast<int>(std::floor((q.y - radius - grid_lo_.y) / cell_)), 0, grows_ - 1);
  int r1 = std::clamp(static_cast<int>(std::floor((q.y + radius - grid_lo_.y) / cell_)), 0, grows_ - 1);
  std::vector<char> seen(segments_.size(), 0);
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      for (int idx : cell_segs_[static_cast<std::size_t>(r) * gcols_ + c]) {
        if (seen[idx]) continue;
        seen[idx] = 1;
        CandidatePoint cp = project_xy(q, segments_[idx]);
        if (cp.err <= radius) out.push_back(std::move(cp));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const CandidatePoint& a, const CandidatePoint& b) {
    if (a.err != b.err) return a.err < b.err;
    return a.segment_id < b.segment_id;
  });
  return out;
}

void RoadNetwork::save(std::ostream& out) const {
  out << "# road network: N <node> <lon> <lat>; "
         "S <seg> <start> <end> <speed_mps> [lon lat ...]\n";
  out << std::setprecision(17);
  for (const auto& nd : nodes_) {
    out << "N " << nd.id << ' ' << nd.pos.lon << ' ' << nd.pos.lat << '\n';
  }
  for (const auto& seg : segments_) {
    out << "S " << seg.id << ' ' << nodes_[seg.start].id << ' '
        << nodes_[seg.end].id << ' ' << seg.speed_mps;
    for (std::size_t i = 1; i + 1 < seg.geometry.size(); ++i) {
      out << ' ' << seg.geometry[i].lon << ' ' << seg.geometry[i].lat;
    }
    out << '\n';
  }
}

void RoadNetwork::save_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file: " + path);
  save(out);
}

}  // namespace lnsp
