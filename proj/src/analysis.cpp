#include "sbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

namespace sbm {

Matrix procrustes_rotation(const Matrix& Xbar, const Matrix& X) {
  if (Xbar.rows() != X.rows() || Xbar.cols() != X.cols()) {
    throw ShapeError("procrustes_rotation needs matrices of identical shape");
  }
  Eigen::JacobiSVD<Matrix> svd(Xbar.transpose() * X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double principal_angle_distance(const Matrix& M1, const Matrix& M2) {
  if (M1.rows() != M2.rows() || M1.cols() != M2.cols()) {
    throw ShapeError("principal_angle_distance needs matrices of identical shape");
  }
  const Vector sigma = Eigen::JacobiSVD<Matrix>(M1.transpose() * M2).singularValues();
  const double remainder = static_cast<double>(M1.cols()) - sigma.squaredNorm();
  return std::sqrt(std::max(remainder, 0.0));
}

Eigengaps eigengaps(const Vector& population_squared_eigenvalues, const Interval& S) {
  const Interval checked = Interval::make(S.lo, S.hi);
  const double inf = std::numeric_limits<double>::infinity();
  Eigengaps gaps{inf, inf, true, true};
  for (Eigen::Index i = 0; i < population_squared_eigenvalues.size(); ++i) {
    const double ell = population_squared_eigenvalues[i];
    if (checked.contains(ell)) {
      gaps.delta_prime = std::min(gaps.delta_prime, checked.distance_to_complement(ell));
      gaps.delta_prime_infinite = false;
    } else {
      gaps.delta = std::min(gaps.delta, checked.distance(ell));
      gaps.delta_infinite = false;
    }
  }
  return gaps;
}

Interval canonical_interval(double lambda_k) {
  return Interval::make(lambda_k * lambda_k / 2.0, 2.0);
}

WeylReport weyl_check(const Vector& empirical, const Vector& population, double frob) {
  if (empirical.size() != population.size()) {
    throw ShapeError("weyl_check needs spectra of equal length");
  }
  WeylReport report;
  if (empirical.size() > 0) report.gap = (empirical - population).cwiseAbs().maxCoeff();
  report.holds = report.gap <= frob + 1e-9;
  return report;
}

MisclusterReport misclustered_set(const Matrix& row_centroids, const std::vector<int>& membership,
                                  const Matrix& mu, const Matrix& O, int largest_block) {
  if (row_centroids.rows() != static_cast<Eigen::Index>(membership.size()) ||
      row_centroids.cols() != mu.cols() || O.rows() != mu.cols() || O.cols() != mu.cols()) {
    throw ShapeError("misclustered_set: inconsistent shapes");
  }
  if (largest_block < 1) throw InvalidParameter("largest block population must be positive");

  MisclusterReport report;
  report.radius = 1.0 / std::sqrt(2.0 * largest_block);
  const Matrix rotated = mu * O;  // row g: z_g μ O
  const auto k = rotated.rows();
  for (std::size_t i = 0; i < membership.size(); ++i) {
    const auto row = row_centroids.row(static_cast<Eigen::Index>(i));
    const int own = membership[i];
    const double own_dist = (row - rotated.row(own)).norm();
    if (own_dist >= report.radius) {
      report.nodes.push_back(static_cast<int>(i));
      continue;
    }
    for (Eigen::Index g = 0; g < k; ++g) {
      if (g == own) continue;
      if (!(own_dist < (row - rotated.row(g)).norm())) {
        ++report.implication_violations;
        break;
      }
    }
  }
  return report;
}

TailBound theoretical_tail_bound(int n, double tau) {
  if (n < 2) throw InvalidParameter("theoretical_tail_bound needs n >= 2");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidParameter("tau must lie in (0, 1]");
  const double log_n = std::log(static_cast<double>(n));
  const double root_n = std::sqrt(static_cast<double>(n));
  TailBound out;
  out.hypothesis_holds = root_n / log_n > 2.0;
  out.concentration_regime = tau * tau * log_n > 2.0;
  if (out.hypothesis_holds) {
    out.bound = 32.0 * std::sqrt(2.0) * log_n / (tau * tau * root_n);
    out.prob = 4.0 * std::pow(static_cast<double>(n), 2.0 - 2.0 * tau * tau * log_n);
  } else {
    out.bound = std::numeric_limits<double>::quiet_NaN();
    out.prob = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

EmpiricalSpectrum spectral_embedding(const Graph& graph, int k, IsolatedPolicy policy) {
  EmpiricalSpectrum out;
  out.laplacian = normalized_laplacian(graph.adjacency(), policy);
  const SpectralOptions options;
  if (out.laplacian.L.rows() > options.dense_limit) {
    out.eigenvalues = symmetric_eigenvalues(out.laplacian.L);
    out.basis = top_k_by_abs(out.laplacian.L, k, options);
  } else {
    const SymmetricEigen full = eigendecompose_symmetric(out.laplacian.L);
    out.eigenvalues = full.values;
    out.basis = select_eigenpairs(full, k);
  }
  return out;
}

DiagnosticsReport full_diagnostics(const BlockModel& model, const PopulationSpectrum& population,
                                   const EmpiricalSpectrum& empirical, const ClusterResult& cluster,
                                   std::optional<Interval> S) {
  const int n = model.n();
  const int k = model.k();
  const Matrix& L = empirical.laplacian.L;
  const Matrix& X = empirical.basis.X;
  if (L.rows() != n || X.rows() != n) {
    throw ShapeError("diagnostics need a Laplacian over all " + std::to_string(n) +
                     " nodes (isolated nodes cannot be dropped)");
  }
  if (X.cols() != k || cluster.row_centroids.rows() != n || cluster.row_centroids.cols() != k) {
    throw ShapeError("diagnostics need k = " + std::to_string(k) + " eigenvectors and centroids");
  }

  DiagnosticsReport r;
  r.n = n;
  r.k = k;
  r.tau = tau(population.Dbar);
  r.P = largest_block_population(model);
  r.lambda_k = population.lambda.cwiseAbs().minCoeff();
  const Interval interval = S ? Interval::make(S->lo, S->hi) : canonical_interval(r.lambda_k);
  r.interval_lo = interval.lo;
  r.interval_hi = interval.hi;
  r.isolated_nodes = static_cast<int>(empirical.laplacian.isolated.size());

  // L̄L̄ = Zμ Λ² (Zμ)^T.
  const Matrix& U = population.Zmu;
  const Vector lambda_sq = population.lambda.cwiseAbs2();
  Matrix diff = L * L;
  diff.noalias() -= U * lambda_sq.asDiagonal() * U.transpose();
  r.frob_LL = diff.norm();
  diff.resize(0, 0);

  Vector emp_sq = empirical.eigenvalues.cwiseAbs2();
  std::sort(emp_sq.begin(), emp_sq.end(), std::greater<>());
  Vector pop_sq = Vector::Zero(n);
  pop_sq.head(k) = lambda_sq;
  std::sort(pop_sq.begin(), pop_sq.end(), std::greater<>());
  r.weyl_gap = weyl_check(emp_sq, pop_sq, r.frob_LL).gap;

  const Eigengaps gaps = eigengaps(pop_sq, interval);
  r.delta = gaps.delta;
  r.delta_prime = gaps.delta_prime;
  r.dk_bound = r.delta > 0.0 ? std::sqrt(2.0) * r.frob_LL / r.delta
                             : std::numeric_limits<double>::infinity();

  r.k_emp_in_S = static_cast<int>(eigenvalues_with_square_in(empirical.eigenvalues, interval).size());
  for (Eigen::Index i = 0; i < pop_sq.size(); ++i) {
    if (interval.contains(pop_sq[i])) ++r.k_pop_in_S;
  }
  r.dims_matched = r.k_emp_in_S == k && r.k_pop_in_S == k;

  const Matrix O = procrustes_rotation(U, X);
  r.eigvec_dist = (X - U * O).norm();
  r.principal_angle_dist = principal_angle_distance(X, U);

  const MisclusterReport mis =
      misclustered_set(cluster.row_centroids, model.membership(), population.mu, O, r.P);
  r.miscluster_set = mis.nodes;
  r.miscluster_count = static_cast<int>(mis.nodes.size());
  r.implication_violations = mis.implication_violations;

  const TailBound tail = theoretical_tail_bound(n, std::min(r.tau, 1.0));
  r.theory_hypothesis = tail.hypothesis_holds;
  r.theory_concentration = tail.concentration_regime;
  r.theory_bound = tail.bound;
  r.theory_prob = tail.prob;

  r.certified = cluster.certified;
  r.restarts_used = cluster.n_restarts_used;
  r.kmeans_objective = cluster.objective;
  return r;
}

DiagnosticsReport full_diagnostics(const BlockModel& model, const Graph& graph,
                                   const EigenBasis& basis, const ClusterResult& cluster) {
  const PopulationSpectrum population = population_spectrum(model);
  EmpiricalSpectrum empirical;
  empirical.laplacian = normalized_laplacian(graph.adjacency(), IsolatedPolicy::kZeroRows);
  empirical.eigenvalues = symmetric_eigenvalues(empirical.laplacian.L);
  empirical.basis = basis;
  return full_diagnostics(model, population, empirical, cluster);
}

std::vector<std::string> report_violations(const DiagnosticsReport& r) {
  std::vector<std::string> out;
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0)) out.push_back(std::string(name) + " is negative");
  };
  nonneg(r.frob_LL, "frob_LL");
  nonneg(r.weyl_gap, "weyl_gap");
  nonneg(r.delta, "delta");
  nonneg(r.delta_prime, "delta_prime");
  nonneg(r.eigvec_dist, "eigvec_dist");
  nonneg(r.principal_angle_dist, "principal_angle_dist");
  if (r.miscluster_count != static_cast<int>(r.miscluster_set.size()) ||
      r.miscluster_count > r.n) {
    out.push_back("miscluster_count disagrees with the set or exceeds n");
  }
  if (!(r.weyl_gap <= r.frob_LL + 1e-9)) out.push_back("Weyl inequality violated");
  if (r.dims_matched && std::isfinite(r.dk_bound) && !(r.eigvec_dist <= r.dk_bound + 1e-9)) {
    out.push_back("Davis-Kahan inequality violated");
  }
  if (r.implication_violations != 0) {
    out.push_back("sufficient-condition implication failed for " +
                  std::to_string(r.implication_violations) + " node(s)");
  }
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", value);
  return buf;
}

std::string diagnostics_csv_header() {
  return "n,k,tau,P,lambda_k,S_lo,S_hi,frob_LL,weyl_gap,delta,delta_prime,dk_bound,"
         "eigvec_dist,principal_angle_dist,k_emp_in_S,k_pop_in_S,dims_matched,"
         "miscluster_count,implication_violations,theory_hypothesis,theory_concentration,"
         "theory_bound,theory_prob,isolated_nodes,certified,restarts_used,kmeans_objective";
}

std::string diagnostics_csv_row(const DiagnosticsReport& r) {
  std::ostringstream row;
  row << r.n << ',' << r.k << ',' << format_number(r.tau) << ',' << r.P << ','
      << format_number(r.lambda_k) << ',' << format_number(r.interval_lo) << ','
      << format_number(r.interval_hi) << ',' << format_number(r.frob_LL) << ','
      << format_number(r.weyl_gap) << ',' << format_number(r.delta) << ','
      << format_number(r.delta_prime) << ',' << format_number(r.dk_bound) << ','
      << format_number(r.eigvec_dist) << ',' << format_number(r.principal_angle_dist) << ','
      << r.k_emp_in_S << ',' << r.k_pop_in_S << ',' << int(r.dims_matched) << ','
      << r.miscluster_count << ',' << r.implication_violations << ','
      << int(r.theory_hypothesis) << ',' << int(r.theory_concentration) << ','
      << format_number(r.theory_bound) << ',' << format_number(r.theory_prob) << ','
      << r.isolated_nodes << ',' << int(r.certified) << ',' << r.restarts_used << ','
      << format_number(r.kmeans_objective);
  return row.str();
}

std::string diagnostics_text(const DiagnosticsReport& r) {
  std::ostringstream out;
  out << "nodes n                     " << r.n << '\n'
      << "blocks k                    " << r.k << '\n'
      << "tau (min E[deg] / n)        " << format_number(r.tau) << '\n'
      << "largest block P             " << r.P << '\n'
      << "smallest |lambda| of Lbar   " << format_number(r.lambda_k) << '\n'
      << "interval S                  (" << format_number(r.interval_lo) << ", "
      << format_number(r.interval_hi) << ")\n"
      << "||LL - LbarLbar||_F         " << format_number(r.frob_LL) << '\n'
      << "Weyl gap                    " << format_number(r.weyl_gap) << '\n'
      << "delta / delta'              " << format_number(r.delta) << " / "
      << format_number(r.delta_prime) << '\n'
      << "Davis-Kahan bound           " << format_number(r.dk_bound) << '\n'
      << "||X - Xbar O||_F            " << format_number(r.eigvec_dist) << '\n'
      << "principal-angle distance    " << format_number(r.principal_angle_dist) << '\n'
      << "eigenvalues in S' (L, Lbar) " << r.k_emp_in_S << ", " << r.k_pop_in_S
      << (r.dims_matched ? "" : "  [dimension mismatch]") << '\n'
      << "misclustered nodes          " << r.miscluster_count << '\n';
  if (!r.miscluster_set.empty()) {
    out << "misclustered set            ";
    for (std::size_t i = 0; i < r.miscluster_set.size(); ++i) {
      if (i) out << ' ';
      out << r.miscluster_set[i];
    }
    out << '\n';
  }
  out << "tail bound                  ";
  if (r.theory_hypothesis) {
    out << format_number(r.theory_bound) << " (probability " << format_number(r.theory_prob)
        << (r.theory_concentration ? ")" : "; tau^2 log n <= 2)") << '\n';
  } else {
    out << "not applicable (sqrt(n)/log n <= 2)\n";
  }
  out << "isolated nodes              " << r.isolated_nodes << '\n'
      << "k-means certified           " << (r.certified ? "yes" : "no") << " after "
      << r.restarts_used << " run(s), objective " << format_number(r.kmeans_objective) << '\n';
  return out.str();
}

}  // namespace sbm
