#include "lnsp/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace lnsp {

namespace {

double sqdist(const double* a, const double* b, int dim) {
  double s = 0.0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

Eigen::MatrixXd normalized_laplacian(const AffinityMatrix& W) {
  int n = W.n;
  Eigen::VectorXd deg(n);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += W.at(i, j);
    deg[i] = s;
  }
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    double di = deg[i] > 1e-12 ? 1.0 / std::sqrt(deg[i]) : 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double dj = deg[j] > 1e-12 ? 1.0 / std::sqrt(deg[j]) : 0.0;
      L(i, j) = -W.at(i, j) * di * dj;
    }
  }
  return L;
}

}  // namespace

std::vector<int> kmeans(const std::vector<double>& points, int n, int dim,
                        int k, std::uint64_t seed, int restarts) {
  if (k < 1 || n < 1) throw std::invalid_argument("kmeans needs k >= 1, n >= 1");
  if (k > n) throw std::invalid_argument("kmeans k exceeds point count");
  std::vector<int> best_labels(n, 0);
  double best_inertia = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);

  std::vector<double> centers(static_cast<std::size_t>(k) * dim);
  std::vector<double> mind(n);
  std::vector<int> labels(n);
  for (int run = 0; run < restarts; ++run) {
    // k-means++ seeding
    std::uniform_int_distribution<int> pick(0, n - 1);
    int first = pick(rng);
    std::copy_n(&points[static_cast<std::size_t>(first) * dim], dim, centers.begin());
    for (int i = 0; i < n; ++i) {
      mind[i] = sqdist(&points[static_cast<std::size_t>(i) * dim], centers.data(), dim);
    }
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += mind[i];
      int chosen = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double r = u(rng);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
          acc += mind[i];
          if (acc >= r) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = pick(rng);
      }
      std::copy_n(&points[static_cast<std::size_t>(chosen) * dim], dim,
                  centers.begin() + static_cast<std::size_t>(c) * dim);
      for (int i = 0; i < n; ++i) {
        mind[i] = std::min(mind[i], sqdist(&points[static_cast<std::size_t>(i) * dim],
                                           &centers[static_cast<std::size_t>(c) * dim], dim));
      }
    }
    // Lloyd iterations
    double inertia = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      inertia = 0.0;
      bool changed = false;
      for (int i = 0; i < n; ++i) {
        int bestc = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
          double d2 = sqdist(&points[static_cast<std::size_t>(i) * dim],
                             &centers[static_cast<std::size_t>(c) * dim], dim);
          if (d2 < bd) {
            bd = d2;
            bestc = c;
          }
        }
        if (iter == 0 || labels[i] != bestc) changed = true;
        labels[i] = bestc;
        inertia += bd;
      }
      if (!changed && iter > 0) break;
      std::vector<double> sums(static_cast<std::size_t>(k) * dim, 0.0);
      std::vector<int> cnt(k, 0);
      for (int i = 0; i < n; ++i) {
        ++cnt[labels[i]];
        for (int d = 0; d < dim; ++d) {
          sums[static_cast<std::size_t>(labels[i]) * dim + d] +=
              points[static_cast<std::size_t>(i) * dim + d];
        }
      }
      for (int c = 0; c < k; ++c) {
        if (cnt[c] == 0) continue;  // empty cluster keeps its center
        for (int d = 0; d < dim; ++d) {
          centers[static_cast<std::size_t>(c) * dim + d] =
              sums[static_cast<std::size_t>(c) * dim + d] / cnt[c];
        }
      }
    }
    if (inertia < best_inertia) {
      best_inertia = inertia;
      best_labels = labels;
    }
  }
  return best_labels;
}

std::vector<int> spectral_cluster(const AffinityMatrix& W, int K,
                                  std::uint64_t seed) {
  int n = W.n;
  if (K < 1 || K > n) throw std::invalid_argument("cluster count out of range");
  if (K == 1) return std::vector<int>(n, 0);
  Eigen::MatrixXd L = normalized_laplacian(W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  // eigenvalues are sorted ascending; take the first K eigenvectors
  std::vector<double> rows(static_cast<std::size_t>(n) * K);
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    for (int c = 0; c < K; ++c) norm += es.eigenvectors()(i, c) * es.eigenvectors()(i, c);
    norm = std::sqrt(norm);
    for (int c = 0; c < K; ++c) {
      rows[static_cast<std::size_t>(i) * K + c] =
          norm > 1e-12 ? es.eigenvectors()(i, c) / norm : 0.0;
    }
  }
  return kmeans(rows, n, K, K, seed);
}

int eigengap_k(const AffinityMatrix& W, int max_k) {
  int n = W.n;
  if (n <= 1) return 1;
  max_k = std::clamp(max_k, 1, n - 1);
  Eigen::MatrixXd L = normalized_laplacian(W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolve failed");
  int best_k = 1;
  double best_gap = -1.0;
  for (int k = 1; k <= max_k; ++k) {
    double gap = es.eigenvalues()[k] - es.eigenvalues()[k - 1];
    if (gap > best_gap + 1e-12) {
      best_gap = gap;
      best_k = k;
    }
  }
  return best_k;
}

}  // namespace lnsp
