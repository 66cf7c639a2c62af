#pragma once

#include <cstdint>
#include <vector>

#include "sbm/common.hpp"

namespace sbm {

// k-means partition of the rows of a point matrix. Cluster labels are
// 0-based in memory; files written by the CLI use 1..k.
struct ClusterResult {
  std::vector<int> assignments;  // cluster of each row
  Matrix centroids;              // k x d, row g = mean of rows in cluster g
  Matrix row_centroids;          // n x d, row i = centroid of row i's cluster (C)
  double objective = 0.0;        // sum_i ||x_i - centroid(i)||^2
  int n_restarts_used = 0;
  bool certified = false;
};

struct LloydRun {
  ClusterResult result;
  // Objective after each assignment step; nonincreasing.
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

inline constexpr int kMaxLloydIterations = 300;

// Lloyd iterations from the given centroids until assignments stop changing
// or max_iterations is reached. Ties go to the lowest-index centroid; an
// empty cluster takes the point farthest from its current centroid.
LloydRun lloyd(const Matrix& points, const Matrix& initial_centroids,
               int max_iterations = kMaxLloydIterations);

// k-means++ seeding (D^2 sampling) driven by StreamRng(seed).
Matrix kmeanspp_seeds(const Matrix& points, int k, std::uint64_t seed);

// Best of n_init seeded Lloyd runs; run r uses seed + r. Throws
// InvalidParameter when k is outside [1, n] or n_init < 1.
ClusterResult kmeans(const Matrix& points, int k, int n_init, std::uint64_t seed);

// Restarts kmeans (single init, seed + attempt) until
// ||X - C||_F <= ||X - reference||_F. Returns the first run that meets it
// with certified = true, otherwise the lowest-objective run with
// certified = false.
ClusterResult certified_kmeans(const Matrix& X, int k, const Matrix& reference,
                               int max_restarts, std::uint64_t seed);

struct LabelAlignment {
  // mapping[a] = truth label matched to assigned label a.
  std::vector<int> mapping;
  int agreement = 0;
};

// Maximum-agreement matching of assigned labels to truth labels (Hungarian
// method on the k x k confusion matrix). Labels must lie in [0, k).
LabelAlignment label_align(const std::vector<int>& assignments, const std::vector<int>& truth,
                           int k);

}  // namespace sbm
