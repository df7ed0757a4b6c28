#ifndef LNSP_SPECTRAL_HPP
#define LNSP_SPECTRAL_HPP

#include <cstdint>
#include <vector>

namespace lnsp {

/// Dense symmetric affinity matrix, row-major, n x n.
struct AffinityMatrix {
  int n = 0;
  std::vector<double> w;

  double& at(int i, int j) { return w[static_cast<std::size_t>(i) * n + j]; }
  double at(int i, int j) const { return w[static_cast<std::size_t>(i) * n + j]; }

  explicit AffinityMatrix(int n_ = 0) : n(n_), w(static_cast<std::size_t>(n_) * n_, 0.0) {}
};

/// Seeded k-means with k-means++ init and `restarts` independent runs;
/// returns the labeling with the lowest inertia. `points` is row-major
/// n x dim. Deterministic for a fixed seed.
std::vector<int> kmeans(const std::vector<double>& points, int n, int dim,
                        int k, std::uint64_t seed, int restarts = 10);

/// Spectral clustering on the symmetric normalized Laplacian
/// L = I - D^{-1/2} W D^{-1/2}: takes the eigenvectors of the K smallest
/// eigenvalues, row-normalizes, and k-means them into K groups.
std::vector<int> spectral_cluster(const AffinityMatrix& W, int K,
                                  std::uint64_t seed);

/// Eigengap heuristic: the K <= max_k at the largest gap in the sorted
/// Laplacian spectrum (K >= 1).
int eigengap_k(const AffinityMatrix& W, int max_k);

}  // namespace lnsp

#endif
