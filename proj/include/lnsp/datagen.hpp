#ifndef LNSP_DATAGEN_HPP
#define LNSP_DATAGEN_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lnsp/distribution.hpp"
#include "lnsp/grid.hpp"
#include "lnsp/network.hpp"
#include "lnsp/routing.hpp"
#include "lnsp/trajectory.hpp"

namespace lnsp {

/// Deterministic seed derivation for independent generator streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// GPS noise for one rectangular block of grid cells: a displacement across
/// the road whose magnitude is drawn from the given family, so the planted
/// distribution is exactly what error collection recovers. Layout of
/// `params` matches ErrorDistribution (gaussian {mu, sigma} redrawn until
/// >= 0, etc.).
struct NoiseRegime {
  int col0 = 0, row0 = 0;  // half-open cell rectangle [col0,col1) x [row0,row1)
  int col1 = 1 << 30, row1 = 1 << 30;
  DistKind kind = DistKind::gaussian;
  std::vector<double> params;

  bool contains(int col, int row) const {
    return col >= col0 && col < col1 && row >= row0 && row < row1;
  }
};

/// Grid-aligned noise regimes; the first matching regime wins, cells outside
/// every regime get zero noise.
struct NoiseField {
  GridSpec grid;
  std::vector<NoiseRegime> regimes;

  const NoiseRegime* at_xy(const XY& q) const;
};

/// Exact ground truth for one generated trajectory: the driven path and each
/// emitted point's arc-length position along it.
struct GroundTruthEntry {
  std::string traj_id;
  NetPath path;
  std::vector<double> offsets;
};

using GroundTruth = std::map<std::string, GroundTruthEntry>;

struct CityOptions {
  double lon0 = 114.0;
  double lat0 = 22.5;
  double oneway_frac = 0.15;
  double removal_frac = 0.10;
  double speed_limit_mps = 13.9;
};

/// Jittered grid street network with seeded one-way conversions and edge
/// removals, regenerated (up to 10 attempts) until strongly connected.
RoadNetwork gen_city(int cols, int rows, double spacing, std::uint64_t seed,
                     const CityOptions& opt = {});

struct RoutesResult {
  std::map<std::string, NetPath> routes;
  double coverage = 0.0;  // fraction of network-covered cells touched
};

/// Seeded simple paths of chord length >= min_len, greedily chosen to cover
/// grid cells; stops at `count` routes and reports the achieved coverage.
RoutesResult gen_routes(const RoadNetwork& net, const GridSpec& grid, int count,
                        double min_len, std::uint64_t seed,
                        double coverage_goal = 0.7);

/// Seeded shortest-path trips between random node pairs, length >= min_len.
/// Every subpath of such a trip is itself shortest, so exact recovery from
/// sparse samples is well-posed.
std::map<std::string, NetPath> gen_trips(const RoadNetwork& net, int count,
                                         double min_len, std::uint64_t seed);

/// Drives along `path` at constant speed, emitting one point per interval
/// (plus the exact path end) with regime-dependent radial noise.
std::pair<Trajectory, GroundTruthEntry> gen_trajectory(
    const RoadNetwork& net, const NetPath& path, const NoiseField& noise,
    int interval_s, double speed_mps, std::uint64_t seed,
    const std::string& traj_id, std::int64_t t0 = 0);

/// Keeps points so consecutive gaps approximate `target_interval_s` with
/// seeded +/-20% jitter; endpoints always survive.
Trajectory downsample(const Trajectory& traj, int target_interval_s,
                      std::uint64_t seed);

struct DetourFixture {
  RoadNetwork net;
  NetPath true_path;     // goes around the north block
  NetPath shortest;      // what a pure shortest-path matcher would pick
  Trajectory traj;
  GroundTruthEntry truth;
};

/// Street block where the direct road is one-way against travel, the driven
/// route detours north (+80 m) and a shorter south bypass (+60 m) exists, so
/// the true path is locally non-shortest. `sigma` adds half-normal GPS noise.
DetourFixture gen_detour_fixture(std::uint64_t seed, double sigma = 0.0);

}  // namespace lnsp

#endif
