// Compares the serial reference kernels against their OpenMP versions on a
// seeded mid-size dataset: error-histogram collection and corpus matching.

#include <chrono>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lnsp/datagen.hpp"
#include "lnsp/led_model.hpp"
#include "lnsp/matcher.hpp"

using namespace lnsp;
using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

}  // namespace

int main() {
  const std::uint64_t seed = 7;
  RoadNetwork net = gen_city(14, 14, 200.0, seed);
  XY lo, hi;
  net.bounds(lo, hi);
  GridSpec grid;
  grid.ref = net.ref();
  grid.origin = net.ref().to_geo({lo.x - 200.0, lo.y - 200.0});
  grid.cell_size = 100.0;
  grid.cols = static_cast<int>((hi.x - lo.x + 400.0) / 100.0) + 1;
  grid.rows = static_cast<int>((hi.y - lo.y + 400.0) / 100.0) + 1;

  NoiseField noise;
  noise.grid = grid;
  noise.regimes.push_back({0, 0, 1 << 30, 1 << 30, DistKind::gaussian, {0.0, 8.0}});

  RoutesResult routes = gen_routes(net, grid, 25, 2000.0, seed);
  std::vector<RouteTrajectory> train;
  int k = 0;
  for (const auto& [rid, path] : routes.routes) {
    for (int i = 0; i < 12; ++i) {
      auto [traj, gt] = gen_trajectory(net, path, noise, 5, 10.0,
                                       derive_seed(seed, 100 + k), rid + "_" + std::to_string(i));
      train.push_back({rid, std::move(traj)});
      ++k;
    }
  }
  std::size_t points = 0;
  for (const auto& rt : train) points += rt.traj.points.size();

#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  std::printf("dataset: %zu trajectories, %zu points, %d threads\n\n",
              train.size(), points, threads);

  auto t0 = clock_type::now();
  CellHistograms serial = collect_errors(net, routes.routes, train, grid, default_bin_edges());
  double serial_ms = ms_since(t0);

  t0 = clock_type::now();
  CellHistograms parallel = collect_errors_parallel(net, routes.routes, train, grid,
                                                    default_bin_edges());
  double parallel_ms = ms_since(t0);
  bool same = serial.size() == parallel.size();
  std::printf("collect_errors   serial %8.1f ms   parallel %8.1f ms   speedup %.2fx  %s\n",
              serial_ms, parallel_ms, serial_ms / parallel_ms,
              same ? "(outputs agree)" : "(MISMATCH)");

  LedBuildConfig led_cfg;
  led_cfg.seed = seed;
  LedModel led = build_led(net, routes.routes, train, grid, led_cfg);

  RoutesResult eval_paths = gen_routes(net, grid, 60, 2000.0, derive_seed(seed, 3), 0.0);
  std::vector<Trajectory> trajs;
  int ti = 0;
  for (const auto& [rid, path] : eval_paths.routes) {
    auto [traj, gt] = gen_trajectory(net, path, noise, 10, 10.0,
                                     derive_seed(seed, 9000 + ti), "v" + std::to_string(ti));
    trajs.push_back(std::move(traj));
    ++ti;
  }

  MatchParams params;
  t0 = clock_type::now();
  auto res1 = match_corpus(net, &led, trajs, params, 1);
  double match_serial_ms = ms_since(t0);

  t0 = clock_type::now();
  auto res2 = match_corpus(net, &led, trajs, params, 0);
  double match_parallel_ms = ms_since(t0);

  bool match_same = res1.size() == res2.size();
  for (std::size_t i = 0; match_same && i < res1.size(); ++i) {
    match_same = res1[i].fragments.size() == res2[i].fragments.size() &&
                 (res1[i].fragments.empty() ||
                  res1[i].fragments[0].total_af == res2[i].fragments[0].total_af);
  }
  std::printf("match_corpus     serial %8.1f ms   parallel %8.1f ms   speedup %.2fx  %s\n",
              match_serial_ms, match_parallel_ms, match_serial_ms / match_parallel_ms,
              match_same ? "(outputs agree)" : "(MISMATCH)");
  return same && match_same ? 0 : 1;
}
