#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sbm/blockmodel.hpp"
#include "sbm/clustering.hpp"
#include "sbm/common.hpp"
#include "sbm/laplacian.hpp"
#include "sbm/sampler.hpp"
#include "sbm/spectral.hpp"

namespace sbm {

// O = U V^T from the SVD Xbar^T X = U Σ V^T, the rotation minimizing
// ||X - Xbar O||_F. Throws ShapeError on mismatched shapes.
Matrix procrustes_rotation(const Matrix& Xbar, const Matrix& X);

// (p - sum_j σ_j^2)^{1/2}, σ_j the singular values of M1^T M2: the
// Frobenius norm of the sines of the principal angles.
double principal_angle_distance(const Matrix& M1, const Matrix& M2);

struct Eigengaps {
  // Distance from the eigenvalues outside S to S; +inf if none are outside.
  double delta = 0.0;
  // Distance from the eigenvalues inside S to the complement of S; +inf if
  // none are inside.
  double delta_prime = 0.0;
  bool delta_infinite = false;
  bool delta_prime_infinite = false;
};

Eigengaps eigengaps(const Vector& population_squared_eigenvalues, const Interval& S);

// S = (λ_k^2 / 2, 2) for the smallest nonzero |λ_k| of L̄.
Interval canonical_interval(double lambda_k);

struct WeylReport {
  double gap = 0.0;  // max_i |λ_i - λ̄_i|
  bool holds = false;  // gap <= frob + 1e-9
};

// Both spectra sorted descending and of equal length (ShapeError otherwise).
WeylReport weyl_check(const Vector& empirical, const Vector& population, double frob);

struct MisclusterReport {
  IndexList nodes;   // {i : ||c_i - z_i μ O|| >= 1/sqrt(2P)}
  double radius = 0.0;
  // Nodes outside the set that are not strictly closest to their own
  // rotated population centroid. Always zero unless the inputs are
  // inconsistent.
  int implication_violations = 0;
};

MisclusterReport misclustered_set(const Matrix& row_centroids, const std::vector<int>& membership,
                                  const Matrix& mu, const Matrix& O, int largest_block);

struct TailBound {
  // sqrt(n)/log n > 2; the values below are NaN when it fails.
  bool hypothesis_holds = false;
  double bound = 0.0;  // 32 sqrt(2) log n / (τ^2 sqrt(n))
  double prob = 0.0;   // 4 n^{2 - 2 τ^2 log n}
  // τ^2 log n > 2, the regime in which the bound is informative.
  bool concentration_regime = false;
};

// Throws InvalidParameter unless n >= 2 and τ in (0, 1].
TailBound theoretical_tail_bound(int n, double tau);

// Laplacian of an observed graph with its full spectrum and the top-k
// eigenvectors by |λ|.
struct EmpiricalSpectrum {
  LaplacianPair laplacian;
  Vector eigenvalues;  // all eigenvalues of L, ascending
  EigenBasis basis;
};

EmpiricalSpectrum spectral_embedding(const Graph& graph, int k,
                                     IsolatedPolicy policy = IsolatedPolicy::kError);

struct DiagnosticsReport {
  int n = 0;
  int k = 0;
  double tau = 0.0;
  int P = 0;
  double lambda_k = 0.0;  // smallest nonzero |λ| of L̄
  double interval_lo = 0.0;
  double interval_hi = 0.0;
  double frob_LL = 0.0;    // ||LL - L̄L̄||_F
  double weyl_gap = 0.0;   // max_i |λ_i(LL) - λ_i(L̄L̄)|
  double delta = 0.0;
  double delta_prime = 0.0;
  double dk_bound = 0.0;   // sqrt(2) frob_LL / delta
  double eigvec_dist = 0.0;           // ||X - X̄ O||_F
  double principal_angle_dist = 0.0;  // d(X, X̄)
  int k_emp_in_S = 0;  // eigenvalues of L with square in S
  int k_pop_in_S = 0;  // eigenvalues of L̄ with square in S
  bool dims_matched = false;  // both counts equal k
  int miscluster_count = 0;
  IndexList miscluster_set;
  int implication_violations = 0;
  bool theory_hypothesis = false;
  bool theory_concentration = false;
  double theory_bound = 0.0;
  double theory_prob = 0.0;
  int isolated_nodes = 0;
  bool certified = false;
  int restarts_used = 0;
  double kmeans_objective = 0.0;
};

// Assembles every diagnostic. `laplacian` must cover all n nodes (policy
// kError or kZeroRows). When S is omitted the canonical interval is used.
DiagnosticsReport full_diagnostics(const BlockModel& model, const PopulationSpectrum& population,
                                   const EmpiricalSpectrum& empirical, const ClusterResult& cluster,
                                   std::optional<Interval> S = std::nullopt);

// Convenience form that recomputes the population spectrum and the full
// spectrum of L from the graph.
DiagnosticsReport full_diagnostics(const BlockModel& model, const Graph& graph,
                                   const EigenBasis& basis, const ClusterResult& cluster);

// Descriptions of any violated report invariant; empty when all hold.
std::vector<std::string> report_violations(const DiagnosticsReport& report);

// One CSV row with a fixed column order (diagnostics_csv_header()).
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsReport& report);
std::string diagnostics_text(const DiagnosticsReport& report);

// Number formatting shared by every CSV writer: "%.10g", "inf", "nan".
std::string format_number(double value);

}  // namespace sbm
