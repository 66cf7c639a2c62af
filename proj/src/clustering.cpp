#include "sbm/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sbm/rng.hpp"

namespace sbm {
namespace {

void require_k(int k, Eigen::Index n) {
  if (k < 1 || k > n) {
    throw InvalidParameter("invalid k = " + std::to_string(k) + " for " + std::to_string(n) +
                           " points");
  }
}

// Nearest centroid by exact per-pair distance; ties to the lowest index.
std::vector<int> assign(const Matrix& points, const Matrix& centroids) {
  const auto n = points.rows();
  const auto k = centroids.rows();
  std::vector<int> labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (points.row(i) - centroids.row(0)).squaredNorm();
    for (Eigen::Index g = 1; g < k; ++g) {
      const double d = (points.row(i) - centroids.row(g)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(g);
      }
    }
    labels[i] = best;
  }
  return labels;
}

double objective_of(const Matrix& points, const Matrix& centroids, const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    total += (points.row(i) - centroids.row(labels[i])).squaredNorm();
  }
  return total;
}

// Moves the farthest point into each empty cluster. Only points whose
// cluster has another member are eligible, so no new cluster empties.
void repair_empty(const Matrix& points, const Matrix& centroids, std::vector<int>& labels, int k) {
  std::vector<int> counts(k, 0);
  for (int label : labels) ++counts[label];
  for (int g = 0; g < k; ++g) {
    if (counts[g] > 0) continue;
    int farthest = -1;
    double farthest_d = -1.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (counts[labels[i]] < 2) continue;
      const double d = (points.row(i) - centroids.row(labels[i])).squaredNorm();
      if (d > farthest_d) {
        farthest_d = d;
        farthest = static_cast<int>(i);
      }
    }
    if (farthest < 0) continue;
    --counts[labels[farthest]];
    labels[farthest] = g;
    ++counts[g];
  }
}

Matrix cluster_means(const Matrix& points, const std::vector<int>& labels, const Matrix& previous) {
  const auto k = previous.rows();
  Matrix sums = Matrix::Zero(k, points.cols());
  std::vector<int> counts(k, 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(labels[i]) += points.row(i);
    ++counts[labels[i]];
  }
  for (Eigen::Index g = 0; g < k; ++g) {
    if (counts[g] > 0) {
      sums.row(g) /= counts[g];
    } else {
      sums.row(g) = previous.row(g);
    }
  }
  return sums;
}

ClusterResult finish(const Matrix& points, Matrix centroids, std::vector<int> labels) {
  ClusterResult out;
  out.row_centroids.resize(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out.row_centroids.row(i) = centroids.row(labels[i]);
  }
  out.objective = (points - out.row_centroids).squaredNorm();
  out.centroids = std::move(centroids);
  out.assignments = std::move(labels);
  return out;
}

}  // namespace

LloydRun lloyd(const Matrix& points, const Matrix& initial_centroids, int max_iterations) {
  const int k = static_cast<int>(initial_centroids.rows());
  require_k(k, points.rows());
  if (initial_centroids.cols() != points.cols()) {
    throw ShapeError("centroid dimension does not match point dimension");
  }

  LloydRun run;
  Matrix centroids = initial_centroids;
  std::vector<int> labels = assign(points, centroids);
  run.objective_trace.push_back(objective_of(points, centroids, labels));

  for (int it = 0; it < max_iterations; ++it) {
    repair_empty(points, centroids, labels, k);
    centroids = cluster_means(points, labels, centroids);
    std::vector<int> next = assign(points, centroids);
    run.objective_trace.push_back(objective_of(points, centroids, next));
    run.iterations = it + 1;
    if (next == labels) {
      run.converged = true;
      break;
    }
    labels = std::move(next);
  }
  if (!run.converged) {
    repair_empty(points, centroids, labels, k);
    centroids = cluster_means(points, labels, centroids);
  }
  run.result = finish(points, std::move(centroids), std::move(labels));
  return run;
}

Matrix kmeanspp_seeds(const Matrix& points, int k, std::uint64_t seed) {
  const auto n = points.rows();
  require_k(k, n);
  StreamRng rng(seed);
  Matrix seeds(k, points.cols());
  std::vector<char> chosen(n, 0);

  auto first = static_cast<Eigen::Index>(rng.next_index(static_cast<std::uint64_t>(n)));
  seeds.row(0) = points.row(first);
  chosen[first] = 1;
  Vector nearest = (points.rowwise() - points.row(first)).rowwise().squaredNorm();

  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = rng.next_uniform() * total;
      double running = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += nearest[i];
        if (nearest[i] > 0.0 && running > target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {
        // Rounding left target past the last positive weight.
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (nearest[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // All remaining points coincide with a seed.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
    }
    seeds.row(c) = points.row(pick);
    chosen[pick] = 1;
    nearest = nearest.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
  }
  return seeds;
}

ClusterResult kmeans(const Matrix& points, int k, int n_init, std::uint64_t seed) {
  require_k(k, points.rows());
  if (n_init < 1) throw InvalidParameter("n_init must be at least 1");
  ClusterResult best;
  bool have = false;
  for (int r = 0; r < n_init; ++r) {
    LloydRun run = lloyd(points, kmeanspp_seeds(points, k, seed + static_cast<std::uint64_t>(r)));
    if (!have || run.result.objective < best.objective) {
      best = std::move(run.result);
      have = true;
    }
  }
  best.n_restarts_used = n_init;
  return best;
}

ClusterResult certified_kmeans(const Matrix& X, int k, const Matrix& reference, int max_restarts,
                               std::uint64_t seed) {
  if (reference.rows() != X.rows() || reference.cols() != X.cols()) {
    throw ShapeError("certification reference must have the shape of X");
  }
  if (max_restarts < 1) throw InvalidParameter("max_restarts must be at least 1");
  const double target = (X - reference).norm();
  ClusterResult best;
  for (int attempt = 0; attempt < max_restarts; ++attempt) {
    ClusterResult run = kmeans(X, k, 1, seed + static_cast<std::uint64_t>(attempt));
    if (std::sqrt(run.objective) <= target) {
      run.certified = true;
      run.n_restarts_used = attempt + 1;
      return run;
    }
    if (attempt == 0 || run.objective < best.objective) best = std::move(run);
  }
  best.certified = false;
  best.n_restarts_used = max_restarts;
  return best;
}

namespace {

// Hungarian method (shortest augmenting paths with potentials), minimizing
// the total cost of a square assignment. Returns column assigned to each row.
std::vector<int> hungarian_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);  // match[col] = row, 1-based
  std::vector<int> way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int row0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = cost[row0 - 1][col - 1] - u[row0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> row_to_col(n, 0);
  for (int col = 1; col <= n; ++col) row_to_col[match[col] - 1] = col - 1;
  return row_to_col;
}

}  // namespace

LabelAlignment label_align(const std::vector<int>& assignments, const std::vector<int>& truth,
                           int k) {
  if (assignments.size() != truth.size()) {
    throw ShapeError("label vectors differ in length");
  }
  if (k < 1) throw InvalidParameter("k must be positive");
  std::vector<std::vector<double>> confusion(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int a = assignments[i];
    const int t = truth[i];
    if (a < 0 || a >= k || t < 0 || t >= k) {
      throw InvalidLabel("label out of range [0, " + std::to_string(k) + ") at position " +
                         std::to_string(i));
    }
    confusion[a][t] += 1.0;
  }
  std::vector<std::vector<double>> cost(k, std::vector<double>(k));
  for (int a = 0; a < k; ++a) {
    for (int t = 0; t < k; ++t) cost[a][t] = -confusion[a][t];
  }
  LabelAlignment out;
  out.mapping = hungarian_min(cost);
  for (int a = 0; a < k; ++a) out.agreement += static_cast<int>(confusion[a][out.mapping[a]]);
  return out;
}

}  // namespace sbm
