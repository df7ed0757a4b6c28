#include "lnsp/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lnsp {

std::vector<double> default_bin_edges() {
  std::vector<double> edges;
  for (int i = 0; i <= 30; ++i) edges.push_back(static_cast<double>(i));
  edges.insert(edges.end(), {35.0, 40.0, 50.0, 75.0, 100.0, 200.0});
  return edges;
}

ErrorHistogram::ErrorHistogram(std::vector<double> bin_edges)
    : edges(std::move(bin_edges)) {
  if (edges.size() < 2) throw std::invalid_argument("need at least 2 bin edges");
  counts.assign(edges.size() - 1, 0.0);
}

void ErrorHistogram::add(double err) {
  if (!(err >= 0.0) || !std::isfinite(err)) {
    throw std::invalid_argument("error sample must be finite and non-negative");
  }
  // upper_bound puts a sample on a bin edge into the bin above it; overflow
  // clamps into the last bin.
  auto it = std::upper_bound(edges.begin(), edges.end(), err);
  std::size_t bin;
  if (it == edges.begin()) {
    bin = 0;  // err < edges[0] cannot happen with edge 0 and err >= 0
  } else {
    bin = static_cast<std::size_t>(it - edges.begin()) - 1;
  }
  if (bin >= counts.size()) bin = counts.size() - 1;
  counts[bin] += 1.0;
  n += 1.0;
  raw.push_back(err);
}

void ErrorHistogram::merge(const ErrorHistogram& other) {
  if (other.n == 0.0) return;
  if (edges.empty()) {
    *this = other;
    return;
  }
  if (edges != other.edges) throw std::invalid_argument("mismatched bin edges");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  n += other.n;
  raw.insert(raw.end(), other.raw.begin(), other.raw.end());
  std::sort(raw.begin(), raw.end());
}

std::vector<double> ErrorHistogram::normalized() const {
  std::vector<double> out(counts.size(), 0.0);
  if (n <= 0.0) return out;
  for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / n;
  return out;
}

double ErrorHistogram::cdf(double err) const {
  if (n <= 0.0) return 0.0;
  if (err <= edges.front()) return 0.0;
  double cum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    if (err >= hi) {
      cum += counts[i];
    } else {
      cum += counts[i] * (err - lo) / (hi - lo);
      break;
    }
  }
  return std::min(1.0, cum / n);
}

double ErrorHistogram::quantile(double q) const {
  if (n <= 0.0) return 0.0;
  if (q <= 0.0) return edges.front();
  if (q >= 1.0) return edges.back();
  double target = q * n;
  double cum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (cum + counts[i] >= target) {
      double frac = counts[i] > 0.0 ? (target - cum) / counts[i] : 0.0;
      return edges[i] + frac * (edges[i + 1] - edges[i]);
    }
    cum += counts[i];
  }
  return edges.back();
}

double ErrorHistogram::mean() const {
  if (n <= 0.0) return 0.0;
  if (!raw.empty()) {
    double s = 0.0;
    for (double x : raw) s += x;
    return s / static_cast<double>(raw.size());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    s += counts[i] * 0.5 * (edges[i] + edges[i + 1]);
  }
  return s / n;
}

}  // namespace lnsp
