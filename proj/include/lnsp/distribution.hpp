#ifndef LNSP_DISTRIBUTION_HPP
#define LNSP_DISTRIBUTION_HPP

#include <optional>
#include <string>
#include <vector>

#include "lnsp/histogram.hpp"

namespace lnsp {

enum class DistKind { gaussian, gaussian_mixture, exponential, lognormal, histogram };

const char* kind_name(DistKind k);
std::optional<DistKind> kind_from_name(const std::string& name);

/// Fitted localization-error distribution for one sub-region. Continuous
/// kinds model the non-negative error magnitude; the Gaussian and mixture
/// kinds are truncated at 0 and renormalized. The histogram kind is the
/// fallback for sub-regions no family fits.
struct ErrorDistribution {
  DistKind kind = DistKind::histogram;
  /// gaussian: {mu, sigma}; exponential: {rate}; lognormal: {mu, sigma};
  /// gaussian_mixture: {w, mu, sigma} per component (2 or 3 components).
  std::vector<double> params;
  std::vector<double> hist_edges;    // histogram kind only
  std::vector<double> hist_weights;
  std::optional<double> aic;
  bool insufficient_data = false;

  double cdf(double err) const;
  /// Inverse CDF; closed form where available, bisection otherwise.
  double quantile(double q) const;

  static ErrorDistribution gaussian(double mu, double sigma);
  static ErrorDistribution exponential(double rate);
  static ErrorDistribution lognormal(double mu, double sigma);
  static ErrorDistribution mixture(const std::vector<double>& wms);
  static ErrorDistribution from_histogram(const ErrorHistogram& h);
};

struct FitOptions {
  int fit_min_samples = 200;
  double ks_gate = 0.08;
};

struct FitCandidate {
  DistKind kind;
  int n_params = 0;
  double loglik = 0.0;
  double aic = 0.0;
  std::vector<double> params;
  bool ok = false;
};

struct FitResult {
  ErrorDistribution best;
  std::vector<FitCandidate> tried;
  double ks = 0.0;          // KS statistic of the AIC-selected fit
  bool fell_back = false;   // histogram fallback was used
};

/// MLE fit of every candidate family with AIC selection and a KS goodness
/// gate. Fits on raw samples when the histogram retains them, otherwise on
/// bin midpoints weighted by counts.
FitResult fit_distribution(const ErrorHistogram& hist, const FitOptions& opt = {});

/// q-quantile of `d` clamped to [radius_min, radius_max].
double search_radius(const ErrorDistribution& d, double q, double radius_min,
                     double radius_max);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace lnsp

#endif
