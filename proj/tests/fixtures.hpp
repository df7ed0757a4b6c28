// Shared fixture builders for the matcher/eval/acceptance tests.
#ifndef LNSP_TESTS_FIXTURES_HPP
#define LNSP_TESTS_FIXTURES_HPP

#include <map>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "lnsp/datagen.hpp"
#include "lnsp/led_model.hpp"
#include "lnsp/network.hpp"
#include "lnsp/routing.hpp"

namespace lnsp::testfx {

inline GridSpec grid_over(const RoadNetwork& net, double pad = 200.0,
                          double cell = 100.0) {
  XY lo, hi;
  net.bounds(lo, hi);
  GridSpec g;
  g.ref = net.ref();
  g.origin = net.ref().to_geo({lo.x - pad, lo.y - pad});
  g.cell_size = cell;
  g.cols = static_cast<int>(std::ceil((hi.x - lo.x + 2 * pad) / cell));
  g.rows = static_cast<int>(std::ceil((hi.y - lo.y + 2 * pad) / cell));
  return g;
}

/// Long straight road split into `blocks` segments of `block_len` meters,
/// bidirectional, at the given y offset. Returns the eastbound chain ids.
inline void add_street(std::ostringstream& def, const std::string& prefix,
                       double y_deg_off, int blocks, double block_len_deg) {
  for (int i = 0; i <= blocks; ++i) {
    def << "N " << prefix << "n" << i << ' ' << 114.0 + i * block_len_deg << ' '
        << 22.5 + y_deg_off << "\n";
  }
  for (int i = 0; i < blocks; ++i) {
    def << "S " << prefix << "e" << i << ' ' << prefix << "n" << i << ' '
        << prefix << "n" << i + 1 << " 13.9\n";
    def << "S " << prefix << "w" << i << ' ' << prefix << "n" << i + 1 << ' '
        << prefix << "n" << i << " 13.9\n";
  }
}

struct ParallelFixture {
  RoadNetwork net;
  GridSpec grid;
  LedModel led;                 // built from planted training data
  NetPath truth;                // eastbound along the south road
  NoiseField noise;             // ring-biased noise on the south band
  std::map<std::string, NetPath> routes;
  std::vector<RouteTrajectory> train;
};

/// Two parallel east-west roads ~40 m apart in adjacent LED cells: the
/// south road lives in a band with ring-biased noise (mu 25 m, sigma 6) that
/// pushes half the points toward the quiet north road (sigma 2). Uniform
/// exp-decay scoring flips to the north road on drifted windows; sub-region
/// scoring keeps the south road plausible.
inline ParallelFixture make_parallel_fixture(std::uint64_t seed) {
  const double deg = 1.0 / kMetersPerDegree;  // at lat0 ~ 22.5 use planar ref below
  std::ostringstream def;
  def << std::setprecision(12);
  // columns every 200 m, 10 blocks (2 km); cross connectors at both ends
  PlanarRef ref = PlanarRef::at(114.0, 22.5);
  auto lon_of = [&](double x) { return 114.0 + x / ref.kx; };
  auto lat_of = [&](double y) { return 22.5 + y / ref.ky; };
  const int blocks = 10;
  const double block = 200.0;
  for (int i = 0; i <= blocks; ++i) {
    def << "N sn" << i << ' ' << lon_of(i * block) << ' ' << lat_of(50.0) << "\n";
    def << "N nn" << i << ' ' << lon_of(i * block) << ' ' << lat_of(90.0) << "\n";
  }
  for (int i = 0; i < blocks; ++i) {
    def << "S se" << i << " sn" << i << " sn" << i + 1 << " 13.9\n";
    def << "S sw" << i << " sn" << i + 1 << " sn" << i << " 13.9\n";
    def << "S ne" << i << " nn" << i << " nn" << i + 1 << " 13.9\n";
    def << "S nw" << i << " nn" << i + 1 << " nn" << i << " 13.9\n";
  }
  for (int i = 0; i <= blocks; i += 2) {  // connectors every 400 m
    def << "S cu" << i << " sn" << i << " nn" << i << " 13.9\n";
    def << "S cd" << i << " nn" << i << " sn" << i << " 13.9\n";
  }
  ParallelFixture fx;
  {
    std::istringstream in(def.str());
    fx.net = RoadNetwork::load(in);
  }
  (void)deg;

  // grid with a row boundary at y = 70 between the two roads
  XY lo, hi;
  fx.net.bounds(lo, hi);
  GridSpec g;
  g.ref = fx.net.ref();
  XY south_xy = fx.net.ref().to_xy({114.0, lat_of(50.0), -1});
  g.origin = fx.net.ref().to_geo({lo.x - 200.0, south_xy.y - 80.0});
  g.cell_size = 100.0;
  g.cols = static_cast<int>(std::ceil((hi.x - lo.x + 400.0) / 100.0));
  g.rows = static_cast<int>(std::ceil((hi.y - (south_xy.y - 80.0) + 200.0) / 100.0));
  fx.grid = g;

  fx.noise.grid = g;
  NoiseRegime south_band;  // row 0: ring-biased errors
  south_band.row1 = 1;
  south_band.kind = DistKind::gaussian;
  south_band.params = {25.0, 6.0};
  NoiseRegime north_band;  // everything above: tight errors
  north_band.row0 = 1;
  north_band.kind = DistKind::gaussian;
  north_band.params = {0.0, 2.0};
  fx.noise.regimes = {south_band, north_band};

  std::vector<int> south_chain, north_chain;
  for (int i = 0; i < blocks; ++i) {
    south_chain.push_back(fx.net.segment_index("se" + std::to_string(i)));
    north_chain.push_back(fx.net.segment_index("ne" + std::to_string(i)));
  }
  fx.truth = full_path(fx.net, south_chain);
  fx.routes.emplace("south", fx.truth);
  fx.routes.emplace("north", full_path(fx.net, north_chain));

  int k = 0;
  for (const auto& [rid, path] : fx.routes) {
    for (int i = 0; i < 30; ++i) {
      auto [traj, gt] = gen_trajectory(fx.net, path, fx.noise, 5, 10.0,
                                       derive_seed(seed, 40 + k),
                                       rid + "_t" + std::to_string(i));
      fx.train.push_back({rid, std::move(traj)});
      ++k;
    }
  }
  LedBuildConfig cfg;
  cfg.seed = seed;
  fx.led = build_led(fx.net, fx.routes, fx.train, g, cfg);
  return fx;
}

}  // namespace lnsp::testfx

#endif
