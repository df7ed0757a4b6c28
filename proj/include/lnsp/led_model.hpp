#ifndef LNSP_LED_MODEL_HPP
#define LNSP_LED_MODEL_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lnsp/distribution.hpp"
#include "lnsp/grid.hpp"
#include "lnsp/histogram.hpp"
#include "lnsp/network.hpp"
#include "lnsp/routing.hpp"
#include "lnsp/trajectory.hpp"

namespace lnsp {

struct LedBuildConfig {
  std::vector<double> bin_edges;  // empty -> default_bin_edges()
  double sigma_override = 0.0;    // 0 -> median heuristic over adjacent pairs
  int k_subregions = 0;           // 0 -> eigengap heuristic
  int fill_min_samples = 25;
  int fill_rounds = 2;
  int fit_min_samples = 200;
  double ks_gate = 0.08;
  double radius_q = 0.99;
  double radius_min = 15.0;
  double radius_max = 150.0;
  std::uint64_t seed = 1;
  int jobs = 0;  // 0 -> library default; 1 -> serial collection
};

/// Histograms keyed by grid cell index (ordered for reproducible iteration).
using CellHistograms = std::map<int, ErrorHistogram>;

/// Measures each GPS point's distance to its route's geometry and appends
/// it to the histogram of the cell containing the point. Trajectories with
/// unknown route ids are skipped and reported via `skipped`.
CellHistograms collect_errors(const RoadNetwork& net,
                              const std::map<std::string, NetPath>& fixed_routes,
                              const std::vector<RouteTrajectory>& trajectories,
                              const GridSpec& grid,
                              const std::vector<double>& bin_edges,
                              std::vector<std::string>* skipped = nullptr);

/// OpenMP variant partitioned over trajectories; bin-wise merge keeps the
/// result identical to the serial path.
CellHistograms collect_errors_parallel(const RoadNetwork& net,
                                       const std::map<std::string, NetPath>& fixed_routes,
                                       const std::vector<RouteTrajectory>& trajectories,
                                       const GridSpec& grid,
                                       const std::vector<double>& bin_edges,
                                       int jobs = 0,
                                       std::vector<std::string>* skipped = nullptr);

/// Neighbor-averaging fill: cells under `min_samples` (including cells with
/// no histogram at all) take the mean of their 4-adjacent neighbors'
/// normalized histograms; repeated `rounds` times or until stable.
void fill_missing(CellHistograms& hists, const GridSpec& grid, int min_samples,
                  int rounds);

/// Gaussian-kernel similarity of two normalized histograms; exactly 0 for
/// non-adjacent cells so sub-regions stay spatially connected.
double similarity(const ErrorHistogram& vi, const ErrorHistogram& vj,
                  double sigma, bool adjacent);

struct LedBuildStats {
  int covered_cells = 0;
  int n_subregions = 0;
  int fallbacks = 0;
  std::map<std::string, int> family_counts;
};

/// Fine-grained localization-error-distribution model: grid cells labeled
/// with connected sub-regions, one fitted distribution per sub-region, and
/// a pooled global fallback. Immutable after build/load.
class LedModel {
 public:
  int subregion_at(const GeoPoint& p) const;
  int subregion_at_xy(const XY& q) const;
  int subregion_of_cell(int cell) const;

  /// Fitted distribution governing position `p` (global fallback outside
  /// coverage). Throws when the model holds no data at all.
  const ErrorDistribution& dist_at(const GeoPoint& p) const;
  const ErrorDistribution& dist_at_xy(const XY& q) const;
  const ErrorDistribution& subregion_dist(int id) const { return subs_[id]; }
  const ErrorDistribution& global_dist() const;
  bool has_global() const { return has_global_; }

  /// Upper-tail plausibility F(err) = 1 - CDF(err) of the governing
  /// distribution; in [0,1], non-increasing in err.
  double score_error(const GeoPoint& at, double err) const;
  double score_error_xy(const XY& at, double err) const;

  /// Search radius (radius_q quantile, clamped) for position `p`.
  double radius_at(const GeoPoint& p) const;
  double radius_at_xy(const XY& q) const;
  double subregion_radius(int id) const { return sub_radius_[id]; }
  double radius_for(double q, const XY& at) const;  // custom quantile

  const GridSpec& grid() const { return grid_; }
  int subregion_count() const { return static_cast<int>(subs_.size()); }
  const std::vector<int>& cell_map() const { return cell_sub_; }
  double sigma() const { return sigma_; }
  int kg() const { return kg_; }

  void save(std::ostream& out) const;
  void save_file(const std::string& path) const;
  static LedModel load(std::istream& in);
  static LedModel load_file(const std::string& path);

  /// Builds a model directly from parts (fixtures, external tooling).
  /// cell_to_subregion must hold grid.cell_count() entries of -1 or a valid
  /// index into `subregions`.
  static LedModel assemble(const GridSpec& grid,
                           std::vector<int> cell_to_subregion,
                           std::vector<ErrorDistribution> subregions,
                           std::optional<ErrorDistribution> global,
                           double radius_q = 0.99, double radius_min = 15.0,
                           double radius_max = 150.0);

  friend LedModel build_led(const RoadNetwork&, const std::map<std::string, NetPath>&,
                            const std::vector<RouteTrajectory>&, const GridSpec&,
                            const LedBuildConfig&, LedBuildStats*);

 private:
  GridSpec grid_;
  std::vector<int> cell_sub_;
  std::vector<ErrorDistribution> subs_;
  std::vector<double> sub_radius_;
  ErrorDistribution global_;
  bool has_global_ = false;
  double global_radius_ = 0.0;
  double sigma_ = 0.0;
  int kg_ = 0;
  std::vector<double> bin_edges_;
  double radius_q_ = 0.99;
  double radius_min_ = 15.0;
  double radius_max_ = 150.0;
  std::string config_hash_;
};

/// Full pipeline: collect -> fill -> similarity -> spectral clustering with
/// connectivity repair -> per-sub-region pooled fit, plus the global pooled
/// fallback fit.
LedModel build_led(const RoadNetwork& net,
                   const std::map<std::string, NetPath>& fixed_routes,
                   const std::vector<RouteTrajectory>& trajectories,
                   const GridSpec& grid, const LedBuildConfig& config,
                   LedBuildStats* stats = nullptr);

}  // namespace lnsp

#endif
