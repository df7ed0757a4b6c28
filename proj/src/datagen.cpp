#include "lnsp/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace lnsp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// explicit transforms (not std:: distributions) so streams are identical
// across standard libraries
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw_normal(std::mt19937_64& rng) {
  double u1 = std::max(uniform01(rng), 1e-300);
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double draw_radial(DistKind kind, const std::vector<double>& params,
                   std::mt19937_64& rng) {
  switch (kind) {
    case DistKind::gaussian: {
      double mu = params.at(0), sigma = params.at(1);
      for (int i = 0; i < 64; ++i) {
        double v = mu + sigma * draw_normal(rng);
        if (v >= 0.0) return v;
      }
      return 0.0;
    }
    case DistKind::exponential:
      return -std::log(std::max(1.0 - uniform01(rng), 1e-300)) / params.at(0);
    case DistKind::lognormal:
      return std::exp(params.at(0) + params.at(1) * draw_normal(rng));
    case DistKind::gaussian_mixture: {
      double u = uniform01(rng);
      double acc = 0.0;
      for (std::size_t j = 0; j + 2 < params.size(); j += 3) {
        acc += params[j];
        if (u <= acc || j + 5 >= params.size()) {
          for (int i = 0; i < 64; ++i) {
            double v = params[j + 1] + params[j + 2] * draw_normal(rng);
            if (v >= 0.0) return v;
          }
          return 0.0;
        }
      }
      return 0.0;
    }
    case DistKind::histogram:
      throw std::invalid_argument("histogram is not a noise regime kind");
  }
  return 0.0;
}

std::string pad_id(const char* prefix, int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%04d", prefix, v);
  return buf;
}

bool strongly_connected(const std::vector<Node>& nodes,
                        const std::vector<Segment>& segs) {
  if (nodes.empty()) return false;
  auto reach = [&](bool forward) {
    std::vector<std::vector<int>> adj(nodes.size());
    for (const auto& s : segs) {
      if (forward) {
        adj[s.start].push_back(s.end);
      } else {
        adj[s.end].push_back(s.start);
      }
    }
    std::vector<char> seen(nodes.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == nodes.size();
  };
  return reach(true) && reach(false);
}

std::set<int> cells_of_path(const RoadNetwork& net, const GridSpec& grid,
                            const NetPath& path) {
  std::set<int> cells;
  PathGeometry geom(net, path);
  double step = grid.cell_size / 2.0;
  for (double off = 0.0; off <= geom.length(); off += step) {
    auto c = grid.cell_of_xy(geom.line().at_offset(off));
    if (c) cells.insert(*c);
  }
  auto last = grid.cell_of_xy(geom.line().at_offset(geom.length()));
  if (last) cells.insert(*last);
  return cells;
}

std::set<int> cells_of_network(const RoadNetwork& net, const GridSpec& grid) {
  std::set<int> cells;
  for (const auto& seg : net.segments()) {
    double step = grid.cell_size / 2.0;
    for (double off = 0.0; off <= seg.length; off += step) {
      auto c = grid.cell_of_xy(seg.line.at_offset(off));
      if (c) cells.insert(*c);
    }
    auto last = grid.cell_of_xy(seg.line.at_offset(seg.length));
    if (last) cells.insert(*last);
  }
  return cells;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

const NoiseRegime* NoiseField::at_xy(const XY& q) const {
  auto cell = grid.cell_of_xy(q);
  if (!cell) return nullptr;
  int col = grid.col_of(*cell), row = grid.row_of(*cell);
  for (const auto& r : regimes) {
    if (r.contains(col, row)) return &r;
  }
  return nullptr;
}

RoadNetwork gen_city(int cols, int rows, double spacing, std::uint64_t seed,
                     const CityOptions& opt) {
  if (cols < 2 || rows < 2) throw std::invalid_argument("city needs cols, rows >= 2");
  PlanarRef ref = PlanarRef::at(opt.lon0, opt.lat0);
  for (int attempt = 0; attempt < 10; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, 0xC17Eull + attempt));
    std::vector<Node> nodes;
    nodes.reserve(static_cast<std::size_t>(cols) * rows);
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        double ang = uniform01(rng) * 2.0 * M_PI;
        double rad = uniform01(rng) * spacing / 10.0;
        XY q{c * spacing + rad * std::cos(ang), r * spacing + rad * std::sin(ang)};
        Node nd;
        nd.id = pad_id("n", r * cols + c);
        nd.pos = ref.to_geo(q);
        nodes.push_back(std::move(nd));
      }
    }
    std::vector<Segment> segs;
    int next_seg = 0;
    auto add_dir = [&](int a, int b) {
      Segment s;
      s.id = pad_id("e", next_seg++);
      s.start = a;
      s.end = b;
      s.speed_mps = opt.speed_limit_mps;
      segs.push_back(std::move(s));
    };
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        int a = r * cols + c;
        for (int dir = 0; dir < 2; ++dir) {
          int b;
          if (dir == 0) {
            if (c + 1 >= cols) continue;
            b = a + 1;
          } else {
            if (r + 1 >= rows) continue;
            b = a + cols;
          }
          double u = uniform01(rng);
          if (u < opt.removal_frac) continue;
          if (u < opt.removal_frac + opt.oneway_frac) {
            if (uniform01(rng) < 0.5) {
              add_dir(a, b);
            } else {
              add_dir(b, a);
            }
          } else {
            add_dir(a, b);
            add_dir(b, a);
          }
        }
      }
    }
    if (!strongly_connected(nodes, segs)) continue;
    return RoadNetwork::build(std::move(nodes), std::move(segs));
  }
  throw std::runtime_error("could not generate a strongly connected city in 10 attempts");
}

RoutesResult gen_routes(const RoadNetwork& net, const GridSpec& grid, int count,
                        double min_len, std::uint64_t seed,
                        double coverage_goal) {
  if (count < 1) throw std::invalid_argument("route count must be >= 1");
  std::mt19937_64 rng(derive_seed(seed, 0x40075ull));
  std::set<int> net_cells = cells_of_network(net, grid);
  std::set<int> covered;
  RoutesResult result;
  for (int r = 0; r < count; ++r) {
    bool need_coverage = result.coverage < coverage_goal;
    std::vector<int> best_segs;
    int best_new = -1;
    for (int attempt = 0; attempt < 100; ++attempt) {
      int start = static_cast<int>(uniform01(rng) * net.nodes().size());
      start = std::min<int>(start, static_cast<int>(net.nodes().size()) - 1);
      std::vector<char> visited(net.nodes().size(), 0);
      visited[start] = 1;
      std::vector<int> walk;
      double len = 0.0;
      int cur = start;
      while (len < min_len) {
        std::vector<int> options;
        for (int sidx : net.outgoing(cur)) {
          if (!visited[net.segment(sidx).end]) options.push_back(sidx);
        }
        if (options.empty()) break;
        int pick = static_cast<int>(uniform01(rng) * options.size());
        pick = std::min<int>(pick, static_cast<int>(options.size()) - 1);
        int sidx = options[pick];
        walk.push_back(sidx);
        len += net.segment(sidx).length;
        cur = net.segment(sidx).end;
        visited[cur] = 1;
      }
      if (len < min_len) continue;
      NetPath candidate = full_path(net, walk);
      auto cells = cells_of_path(net, grid, candidate);
      int fresh = 0;
      for (int c : cells) {
        if (!covered.count(c)) ++fresh;
      }
      if (fresh > best_new) {
        best_new = fresh;
        best_segs = walk;
      }
      if (best_new >= 0 && (!need_coverage || (attempt >= 20 && best_new > 0))) break;
    }
    if (best_segs.empty()) {
      throw std::runtime_error("no simple path of length >= " +
                               std::to_string(min_len) + " found in 100 attempts");
    }
    NetPath path = full_path(net, best_segs);
    for (int c : cells_of_path(net, grid, path)) covered.insert(c);
    result.routes.emplace(pad_id("r", r), std::move(path));
    result.coverage = net_cells.empty()
                          ? 0.0
                          : static_cast<double>(covered.size()) / net_cells.size();
  }
  return result;
}

std::map<std::string, NetPath> gen_trips(const RoadNetwork& net, int count,
                                         double min_len, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("trip count must be >= 1");
  std::mt19937_64 rng(derive_seed(seed, 0x7219ull));
  std::vector<std::vector<int>> incoming(net.nodes().size());
  for (const auto& seg : net.segments()) incoming[seg.end].push_back(seg.idx);

  auto on_seg = [&](int idx, double off) {
    const Segment& s = net.segment(idx);
    CandidatePoint cp;
    cp.segment = idx;
    cp.segment_id = s.id;
    cp.offset = off;
    cp.xy = s.line.at_offset(off);
    return cp;
  };

  std::map<std::string, NetPath> out;
  int nn = static_cast<int>(net.nodes().size());
  for (int t = 0; t < count; ++t) {
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      int u = std::min(static_cast<int>(uniform01(rng) * nn), nn - 1);
      int v = std::min(static_cast<int>(uniform01(rng) * nn), nn - 1);
      if (u == v) continue;
      // node-to-node: minimum over departure/arrival segment choices so the
      // trip never starts or ends with a hairpin
      std::optional<NetPath> best;
      for (int sa : net.outgoing(u)) {
        for (int sb : incoming[v]) {
          auto path = shortest_path(net, on_seg(sa, 0.0),
                                    on_seg(sb, net.segment(sb).length));
          if (path && (!best || path->length < best->length)) best = std::move(path);
        }
      }
      if (!best || best->length < min_len) continue;
      canonicalize_path(net, *best);
      out.emplace(pad_id("p", t), std::move(*best));
      found = true;
    }
    if (!found) {
      throw std::runtime_error("no shortest trip of length >= " +
                               std::to_string(min_len) + " found in 200 attempts");
    }
  }
  return out;
}

std::pair<Trajectory, GroundTruthEntry> gen_trajectory(
    const RoadNetwork& net, const NetPath& path, const NoiseField& noise,
    int interval_s, double speed_mps, std::uint64_t seed,
    const std::string& traj_id, std::int64_t t0) {
  if (interval_s < 1) throw std::invalid_argument("interval must be >= 1 s");
  if (!(speed_mps > 0.0)) throw std::invalid_argument("speed must be positive");
  std::mt19937_64 rng(seed);
  PathGeometry geom(net, path);
  double step = speed_mps * interval_s;

  Trajectory traj;
  traj.id = traj_id;
  GroundTruthEntry truth;
  truth.traj_id = traj_id;
  truth.path = path;

  double off = 0.0;
  std::int64_t t = t0;
  bool done = false;
  while (!done) {
    if (off >= geom.length() - 1e-6) {
      off = geom.length();
      done = true;
    }
    XY true_pos = geom.line().at_offset(off);
    XY gps = true_pos;
    const NoiseRegime* regime = noise.at_xy(true_pos);
    if (regime) {
      // displace across the road so the projection error seen by the LED
      // pipeline is exactly the drawn magnitude
      double r = draw_radial(regime->kind, regime->params, rng);
      double side = uniform01(rng) < 0.5 ? -1.0 : 1.0;
      XY t = geom.line().direction_at(off);
      gps.x += side * r * -t.y;
      gps.y += side * r * t.x;
    }
    traj.points.push_back(net.ref().to_geo(gps, t));
    truth.offsets.push_back(off);
    double next = off + step;
    if (next >= geom.length() - 1e-6 && !done) {
      double rem = geom.length() - off;
      t += std::max<std::int64_t>(1, std::llround(rem / speed_mps));
      off = geom.length();
    } else {
      t += interval_s;
      off = next;
    }
  }
  if (traj.points.size() < 2) {  // degenerate short path: emit the end twice
    traj.points.push_back(traj.points.back());
    traj.points.back().t += interval_s;
    truth.offsets.push_back(geom.length());
  }
  return {std::move(traj), std::move(truth)};
}

Trajectory downsample(const Trajectory& traj, int target_interval_s,
                      std::uint64_t seed) {
  Trajectory out;
  out.id = traj.id;
  if (traj.points.size() <= 2) {
    out.points = traj.points;
    return out;
  }
  std::mt19937_64 rng(seed);
  out.points.push_back(traj.points.front());
  std::size_t i = 1;
  std::size_t last = traj.points.size() - 1;
  while (i < last) {
    double jit = uniform01(rng) * 0.4 - 0.2;
    double target = out.points.back().t + target_interval_s * (1.0 + jit);
    std::size_t j = i;
    while (j < last && traj.points[j].t < target) ++j;
    // prefer the neighbor closer to the target time
    if (j > i) {
      double ahead = traj.points[j].t - target;
      double behind = target - traj.points[j - 1].t;
      if (behind < ahead && traj.points[j - 1].t > out.points.back().t) --j;
    }
    out.points.push_back(traj.points[j]);
    i = j + 1;
    if (j == last) return out;
  }
  out.points.push_back(traj.points[last]);
  return out;
}

DetourFixture gen_detour_fixture(std::uint64_t seed, double sigma) {
  PlanarRef ref = PlanarRef::at(114.0, 22.5);
  struct Spot {
    const char* id;
    double x, y;
  };
  const Spot spots[] = {
      {"a", 0, 0},    {"b", 100, 0},   {"c", 200, 0},   {"d", 300, 0},
      {"bn", 100, 40}, {"cn", 200, 40}, {"bs", 100, -30}, {"cs", 200, -30},
  };
  std::vector<Node> nodes;
  std::map<std::string, int> idx;
  for (const auto& s : spots) {
    Node nd;
    nd.id = s.id;
    nd.pos = ref.to_geo({s.x, s.y});
    idx[s.id] = static_cast<int>(nodes.size());
    nodes.push_back(std::move(nd));
  }
  std::vector<Segment> segs;
  auto add = [&](const char* a, const char* b) {
    Segment s;
    s.id = std::string(a) + "_" + b;
    s.start = idx.at(a);
    s.end = idx.at(b);
    s.speed_mps = 13.9;
    segs.push_back(std::move(s));
  };
  auto add_both = [&](const char* a, const char* b) {
    add(a, b);
    add(b, a);
  };
  add_both("a", "b");
  add_both("c", "d");
  add("c", "b");  // direct road, one-way against eastbound travel
  add_both("b", "bn");
  add_both("bn", "cn");
  add_both("cn", "c");
  add_both("b", "bs");
  add_both("bs", "cs");
  add_both("cs", "c");
  RoadNetwork net = RoadNetwork::build(std::move(nodes), std::move(segs));

  auto seg_chain = [&](std::initializer_list<const char*> ids) {
    std::vector<int> v;
    for (const char* id : ids) v.push_back(net.segment_index(id));
    return full_path(net, v);
  };
  DetourFixture fx;
  fx.true_path = seg_chain({"a_b", "b_bn", "bn_cn", "cn_c", "c_d"});
  fx.shortest = seg_chain({"a_b", "b_bs", "bs_cs", "cs_c", "c_d"});

  NoiseField noise;
  if (sigma > 0.0) {
    XY lo, hi;
    net.bounds(lo, hi);
    noise.grid.origin = net.ref().to_geo({lo.x - 200.0, lo.y - 200.0});
    noise.grid.ref = net.ref();
    noise.grid.cell_size = 100.0;
    noise.grid.cols = static_cast<int>((hi.x - lo.x + 400.0) / 100.0) + 1;
    noise.grid.rows = static_cast<int>((hi.y - lo.y + 400.0) / 100.0) + 1;
    NoiseRegime reg;
    reg.kind = DistKind::gaussian;
    reg.params = {0.0, sigma};
    noise.regimes.push_back(reg);
  }
  auto [traj, truth] = gen_trajectory(net, fx.true_path, noise, 1, 10.0,
                                      derive_seed(seed, 0xDE7011ull), "detour");
  fx.net = std::move(net);
  fx.traj = std::move(traj);
  fx.truth = std::move(truth);
  return fx;
}

}  // namespace lnsp
