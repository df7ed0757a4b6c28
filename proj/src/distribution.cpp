#include "lnsp/distribution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace lnsp {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kSigmaFloor = 0.05;
constexpr double kMinSample = 0.01;  // lognormal needs strictly positive data

double normal_logpdf(double x, double mu, double sigma) {
  double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * kLog2Pi;
}

struct WeightedData {
  std::vector<double> x;
  std::vector<double> w;
  double total = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
};

WeightedData weighted_data(const ErrorHistogram& hist) {
  WeightedData d;
  if (!hist.raw.empty()) {
    d.x.reserve(hist.raw.size());
    for (double v : hist.raw) d.x.push_back(std::max(v, kMinSample));
    std::sort(d.x.begin(), d.x.end());
    d.w.assign(d.x.size(), 1.0);
  } else {
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
      if (hist.counts[i] <= 0.0) continue;
      d.x.push_back(std::max(0.5 * (hist.edges[i] + hist.edges[i + 1]), kMinSample));
      d.w.push_back(hist.counts[i]);
    }
  }
  double sw = 0.0, sx = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    sw += d.w[i];
    sx += d.w[i] * d.x[i];
  }
  d.total = sw;
  d.mean = sw > 0.0 ? sx / sw : 0.0;
  double sv = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    sv += d.w[i] * (d.x[i] - d.mean) * (d.x[i] - d.mean);
  }
  d.stddev = sw > 0.0 ? std::sqrt(sv / sw) : 0.0;
  return d;
}

// ---- per-family log-likelihoods (all on the [0, inf) support) ----

double loglik_exponential(const WeightedData& d, double rate) {
  double ll = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    ll += d.w[i] * (std::log(rate) - rate * d.x[i]);
  }
  return ll;
}

double loglik_lognormal(const WeightedData& d, double mu, double sigma) {
  double ll = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double lx = std::log(d.x[i]);
    ll += d.w[i] * (normal_logpdf(lx, mu, sigma) - lx);
  }
  return ll;
}

double loglik_trunc_gaussian(const WeightedData& d, double mu, double sigma) {
  double z = 1.0 - normal_cdf(-mu / sigma);
  if (z < 1e-300) return -std::numeric_limits<double>::infinity();
  double lz = std::log(z);
  double ll = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    ll += d.w[i] * (normal_logpdf(d.x[i], mu, sigma) - lz);
  }
  return ll;
}

double loglik_trunc_mixture(const WeightedData& d, const std::vector<double>& p) {
  std::size_t m = p.size() / 3;
  double z = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    z += p[3 * j] * (1.0 - normal_cdf(-p[3 * j + 1] / p[3 * j + 2]));
  }
  if (z < 1e-300) return -std::numeric_limits<double>::infinity();
  double lz = std::log(z);
  double ll = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    double dens = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      dens += p[3 * j] * std::exp(normal_logpdf(d.x[i], p[3 * j + 1], p[3 * j + 2]));
    }
    ll += d.w[i] * (std::log(std::max(dens, 1e-300)) - lz);
  }
  return ll;
}

// ---- Nelder-Mead over (mu, log sigma) for the truncated Gaussian ----

std::array<double, 2> nelder_mead_trunc_gaussian(const WeightedData& d) {
  double mu0 = d.mean;
  double s0 = std::max(d.stddev, kSigmaFloor);
  double mu_lo = -8.0 * (s0 + 1.0), mu_hi = d.x.back() + 4.0 * s0;
  auto neg = [&](const std::array<double, 2>& p) {
    double mu = std::clamp(p[0], mu_lo, mu_hi);
    double sigma = std::clamp(std::exp(p[1]), kSigmaFloor, 20.0 * s0 + 1.0);
    return -loglik_trunc_gaussian(d, mu, sigma);
  };
  std::array<std::array<double, 2>, 3> sim = {{{mu0, std::log(s0)},
                                               {mu0 + 0.5 * s0, std::log(s0)},
                                               {mu0, std::log(s0) + 0.3}}};
  std::array<double, 3> fv;
  for (int i = 0; i < 3; ++i) fv[i] = neg(sim[i]);
  for (int iter = 0; iter < 400; ++iter) {
    std::array<int, 3> ord = {0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    if (std::abs(fv[ord[2]] - fv[ord[0]]) <
        1e-10 * (1.0 + std::abs(fv[ord[0]]))) {
      break;
    }
    const auto& best = sim[ord[0]];
    const auto& good = sim[ord[1]];
    auto& worst = sim[ord[2]];
    std::array<double, 2> cen = {0.5 * (best[0] + good[0]), 0.5 * (best[1] + good[1])};
    std::array<double, 2> refl = {2.0 * cen[0] - worst[0], 2.0 * cen[1] - worst[1]};
    double fr = neg(refl);
    if (fr < fv[ord[0]]) {
      std::array<double, 2> exp_ = {3.0 * cen[0] - 2.0 * worst[0], 3.0 * cen[1] - 2.0 * worst[1]};
      double fe = neg(exp_);
      if (fe < fr) {
        worst = exp_;
        fv[ord[2]] = fe;
      } else {
        worst = refl;
        fv[ord[2]] = fr;
      }
    } else if (fr < fv[ord[1]]) {
      worst = refl;
      fv[ord[2]] = fr;
    } else {
      std::array<double, 2> con = {0.5 * (cen[0] + worst[0]), 0.5 * (cen[1] + worst[1])};
      double fc = neg(con);
      if (fc < fv[ord[2]]) {
        worst = con;
        fv[ord[2]] = fc;
      } else {
        for (int i : {ord[1], ord[2]}) {
          sim[i] = {0.5 * (sim[i][0] + best[0]), 0.5 * (sim[i][1] + best[1])};
          fv[i] = neg(sim[i]);
        }
      }
    }
  }
  int b = 0;
  for (int i = 1; i < 3; ++i) {
    if (fv[i] < fv[b]) b = i;
  }
  double mu = std::clamp(sim[b][0], mu_lo, mu_hi);
  double sigma = std::clamp(std::exp(sim[b][1]), kSigmaFloor, 20.0 * s0 + 1.0);
  return {mu, sigma};
}

// ---- EM for an m-component Gaussian mixture on weighted data ----

std::vector<double> em_mixture(const WeightedData& d, int m) {
  std::size_t n = d.x.size();
  // deterministic init: split the sorted sample range into m weight-balanced
  // slices and take each slice's mean/std
  std::vector<double> p(3 * m);
  {
    double acc = 0.0;
    int j = 0;
    double sw = 0.0, sx = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sw += d.w[i];
      sx += d.w[i] * d.x[i];
      sxx += d.w[i] * d.x[i] * d.x[i];
      acc += d.w[i];
      if (acc >= d.total * (j + 1.0) / m || i + 1 == n) {
        double mu = sx / std::max(sw, 1e-12);
        double var = std::max(sxx / std::max(sw, 1e-12) - mu * mu, kSigmaFloor * kSigmaFloor);
        p[3 * j] = sw / d.total;
        p[3 * j + 1] = mu;
        p[3 * j + 2] = std::sqrt(var);
        sw = sx = sxx = 0.0;
        if (++j >= m) break;
      }
    }
    for (; j < m; ++j) {  // degenerate tiny slices
      p[3 * j] = 1e-3;
      p[3 * j + 1] = d.mean;
      p[3 * j + 2] = std::max(d.stddev, kSigmaFloor);
    }
    double wsum = 0.0;
    for (int k = 0; k < m; ++k) wsum += p[3 * k];
    for (int k = 0; k < m; ++k) p[3 * k] /= wsum;
  }

  std::vector<double> resp(n * m);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 300; ++iter) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double dens = 0.0;
      for (int j = 0; j < m; ++j) {
        double c = p[3 * j] * std::exp(normal_logpdf(d.x[i], p[3 * j + 1], p[3 * j + 2]));
        resp[i * m + j] = c;
        dens += c;
      }
      dens = std::max(dens, 1e-300);
      for (int j = 0; j < m; ++j) resp[i * m + j] /= dens;
      ll += d.w[i] * std::log(dens);
    }
    for (int j = 0; j < m; ++j) {
      double rw = 0.0, rx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        rw += d.w[i] * resp[i * m + j];
        rx += d.w[i] * resp[i * m + j] * d.x[i];
      }
      double mu = rx / std::max(rw, 1e-12);
      double rv = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        rv += d.w[i] * resp[i * m + j] * (d.x[i] - mu) * (d.x[i] - mu);
      }
      p[3 * j] = std::max(rw / d.total, 1e-6);
      p[3 * j + 1] = mu;
      p[3 * j + 2] = std::max(std::sqrt(rv / std::max(rw, 1e-12)), kSigmaFloor);
    }
    double wsum = 0.0;
    for (int j = 0; j < m; ++j) wsum += p[3 * j];
    for (int j = 0; j < m; ++j) p[3 * j] /= wsum;
    if (ll - prev_ll < 1e-9 * (1.0 + std::abs(ll)) && iter > 10) break;
    prev_ll = ll;
  }
  return p;
}

double ks_statistic(const WeightedData& d, const ErrorHistogram& hist,
                    const ErrorDistribution& fit) {
  double ks = 0.0;
  if (!hist.raw.empty()) {
    // d.x is the sorted (clamped) raw sample
    std::size_t n = d.x.size();
    for (std::size_t i = 0; i < n; ++i) {
      double f = fit.cdf(d.x[i]);
      ks = std::max(ks, std::abs(f - static_cast<double>(i + 1) / n));
      ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
    }
  } else {
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < hist.edges.size(); ++i) {
      cum += hist.counts[i];
      ks = std::max(ks, std::abs(cum / hist.n - fit.cdf(hist.edges[i + 1])));
    }
  }
  return ks;
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

const char* kind_name(DistKind k) {
  switch (k) {
    case DistKind::gaussian: return "gaussian";
    case DistKind::gaussian_mixture: return "gmm";
    case DistKind::exponential: return "exponential";
    case DistKind::lognormal: return "lognormal";
    case DistKind::histogram: return "histogram";
  }
  return "?";
}

std::optional<DistKind> kind_from_name(const std::string& name) {
  if (name == "gaussian") return DistKind::gaussian;
  if (name == "gmm") return DistKind::gaussian_mixture;
  if (name == "exponential") return DistKind::exponential;
  if (name == "lognormal") return DistKind::lognormal;
  if (name == "histogram") return DistKind::histogram;
  return std::nullopt;
}

ErrorDistribution ErrorDistribution::gaussian(double mu, double sigma) {
  ErrorDistribution d;
  d.kind = DistKind::gaussian;
  d.params = {mu, sigma};
  return d;
}

ErrorDistribution ErrorDistribution::exponential(double rate) {
  ErrorDistribution d;
  d.kind = DistKind::exponential;
  d.params = {rate};
  return d;
}

ErrorDistribution ErrorDistribution::lognormal(double mu, double sigma) {
  ErrorDistribution d;
  d.kind = DistKind::lognormal;
  d.params = {mu, sigma};
  return d;
}

ErrorDistribution ErrorDistribution::mixture(const std::vector<double>& wms) {
  if (wms.size() % 3 != 0 || wms.size() < 6 || wms.size() > 9) {
    throw std::invalid_argument("mixture params must be 2 or 3 (w,mu,sigma) triples");
  }
  ErrorDistribution d;
  d.kind = DistKind::gaussian_mixture;
  d.params = wms;
  return d;
}

ErrorDistribution ErrorDistribution::from_histogram(const ErrorHistogram& h) {
  ErrorDistribution d;
  d.kind = DistKind::histogram;
  d.hist_edges = h.edges;
  d.hist_weights = h.counts;
  return d;
}

double ErrorDistribution::cdf(double err) const {
  if (err <= 0.0) return 0.0;
  switch (kind) {
    case DistKind::gaussian: {
      double mu = params[0], sigma = params[1];
      double f0 = normal_cdf(-mu / sigma);
      return (normal_cdf((err - mu) / sigma) - f0) / (1.0 - f0);
    }
    case DistKind::gaussian_mixture: {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j + 2 < params.size(); j += 3) {
        double w = params[j], mu = params[j + 1], sigma = params[j + 2];
        double f0 = normal_cdf(-mu / sigma);
        num += w * (normal_cdf((err - mu) / sigma) - f0);
        den += w * (1.0 - f0);
      }
      return num / den;
    }
    case DistKind::exponential:
      return 1.0 - std::exp(-params[0] * err);
    case DistKind::lognormal:
      return normal_cdf((std::log(err) - params[0]) / params[1]);
    case DistKind::histogram: {
      if (hist_edges.empty()) return 0.0;
      double n = 0.0;
      for (double c : hist_weights) n += c;
      if (n <= 0.0) return 0.0;
      if (err <= hist_edges.front()) return 0.0;
      double cum = 0.0;
      for (std::size_t i = 0; i < hist_weights.size(); ++i) {
        double lo = hist_edges[i], hi = hist_edges[i + 1];
        if (err >= hi) {
          cum += hist_weights[i];
        } else {
          cum += hist_weights[i] * (err - lo) / (hi - lo);
          break;
        }
      }
      return std::min(1.0, cum / n);
    }
  }
  return 0.0;
}

double ErrorDistribution::quantile(double q) const {
  if (q <= 0.0) return 0.0;
  if (q >= 1.0) q = 1.0 - 1e-12;
  switch (kind) {
    case DistKind::exponential:
      return -std::log(1.0 - q) / params[0];
    case DistKind::histogram: {
      if (hist_edges.empty()) return 0.0;
      double n = 0.0;
      for (double c : hist_weights) n += c;
      if (n <= 0.0) return 0.0;
      double target = q * n;
      double cum = 0.0;
      for (std::size_t i = 0; i < hist_weights.size(); ++i) {
        if (cum + hist_weights[i] >= target) {
          double frac = hist_weights[i] > 0.0 ? (target - cum) / hist_weights[i] : 0.0;
          return hist_edges[i] + frac * (hist_edges[i + 1] - hist_edges[i]);
        }
        cum += hist_weights[i];
      }
      return hist_edges.back();
    }
    default: {
      double hi = 1.0;
      while (cdf(hi) < q && hi < 1e7) hi *= 2.0;
      double lo = 0.0;
      for (int i = 0; i < 200 && hi - lo > 1e-10 * (1.0 + hi); ++i) {
        double mid = 0.5 * (lo + hi);
        if (cdf(mid) < q) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
}

double search_radius(const ErrorDistribution& d, double q, double radius_min,
                     double radius_max) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile must be in (0,1)");
  return std::clamp(d.quantile(q), radius_min, radius_max);
}

FitResult fit_distribution(const ErrorHistogram& hist, const FitOptions& opt) {
  FitResult result;
  if (hist.n < opt.fit_min_samples) {
    result.best = ErrorDistribution::from_histogram(hist);
    result.best.insufficient_data = true;
    result.fell_back = true;
    return result;
  }
  WeightedData d = weighted_data(hist);
  if (d.x.empty() || d.stddev < 0.01) {
    result.best = ErrorDistribution::from_histogram(hist);
    result.best.insufficient_data = d.x.empty();
    result.fell_back = true;
    return result;
  }

  auto add = [&](DistKind kind, int k, double ll, std::vector<double> params) {
    FitCandidate c;
    c.kind = kind;
    c.n_params = k;
    c.loglik = ll;
    c.aic = 2.0 * k - 2.0 * ll;
    c.params = std::move(params);
    c.ok = std::isfinite(ll);
    result.tried.push_back(std::move(c));
  };

  {  // exponential
    double rate = 1.0 / std::max(d.mean, 1e-9);
    add(DistKind::exponential, 1, loglik_exponential(d, rate), {rate});
  }
  {  // lognormal
    double sw = 0.0, sl = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      sw += d.w[i];
      sl += d.w[i] * std::log(d.x[i]);
    }
    double mu = sl / sw;
    double sv = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      double dl = std::log(d.x[i]) - mu;
      sv += d.w[i] * dl * dl;
    }
    double sigma = std::max(std::sqrt(sv / sw), 1e-3);
    add(DistKind::lognormal, 2, loglik_lognormal(d, mu, sigma), {mu, sigma});
  }
  {  // truncated gaussian
    auto [mu, sigma] = nelder_mead_trunc_gaussian(d);
    add(DistKind::gaussian, 2, loglik_trunc_gaussian(d, mu, sigma), {mu, sigma});
  }
  for (int m : {2, 3}) {
    std::vector<double> p = em_mixture(d, m);
    add(DistKind::gaussian_mixture, 3 * m - 1, loglik_trunc_mixture(d, p), p);
  }

  const FitCandidate* best = nullptr;
  for (const auto& c : result.tried) {
    if (c.ok && (!best || c.aic < best->aic)) best = &c;
  }
  if (!best) {
    result.best = ErrorDistribution::from_histogram(hist);
    result.fell_back = true;
    return result;
  }
  ErrorDistribution fitted;
  fitted.kind = best->kind;
  fitted.params = best->params;
  fitted.aic = best->aic;
  result.ks = ks_statistic(d, hist, fitted);
  if (result.ks > opt.ks_gate) {
    result.best = ErrorDistribution::from_histogram(hist);
    result.fell_back = true;
    return result;
  }
  result.best = std::move(fitted);
  return result;
}

}  // namespace lnsp
