#ifndef LNSP_HISTOGRAM_HPP
#define LNSP_HISTOGRAM_HPP

#include <vector>

namespace lnsp {

/// Shared bin edges for all error histograms: 1 m bins up to 30 m where most
/// of the mass sits, coarser bins to 100 m, and one overflow bin [100, 200)
/// that also absorbs anything larger.
std::vector<double> default_bin_edges();

/// Binned GPS-error samples for one grid cell. `counts` are integer-valued
/// when accumulated from samples; cells synthesized by neighbor averaging
/// hold a probability vector instead (n == 1, filled == true).
struct ErrorHistogram {
  std::vector<double> edges;
  std::vector<double> counts;
  double n = 0.0;
  std::vector<double> raw;  // raw samples when available; kept sorted by merge
  bool filled = false;      // true when synthesized from neighbors

  ErrorHistogram() = default;
  explicit ErrorHistogram(std::vector<double> bin_edges);

  std::size_t bin_count() const { return counts.size(); }
  void add(double err);
  void merge(const ErrorHistogram& other);

  /// counts / n; zero vector when n == 0.
  std::vector<double> normalized() const;

  /// Empirical CDF with linear interpolation within bins.
  double cdf(double err) const;
  double quantile(double q) const;
  double mean() const;
};

}  // namespace lnsp

#endif
