#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "sbm/analysis.hpp"
#include "sbm/blockmodel.hpp"
#include "sbm/clustering.hpp"
#include "sbm/experiments.hpp"
#include "test_util.hpp"

namespace sbm {
namespace {

int count_fields(const std::string& line) {
  return 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
}

TEST(ProcrustesTest, IdenticalGivesIdentity) {
  std::mt19937_64 gen(1);
  const Matrix X = testing::random_orthonormal(20, 4, gen);
  EXPECT_LT((procrustes_rotation(X, X) - Matrix::Identity(4, 4)).norm(), 1e-12);
}

TEST(ProcrustesTest, RecoversRandomRotation) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix Xbar = testing::random_orthonormal(30, 5, gen);
    const Matrix Q = testing::random_orthonormal(5, 5, gen);
    const Matrix O = procrustes_rotation(Xbar, Xbar * Q);
    EXPECT_LT((O - Q).norm(), 1e-9);
    EXPECT_LT((O.transpose() * O - Matrix::Identity(5, 5)).norm(), 1e-10);
    EXPECT_LT((Xbar * Q - Xbar * O).norm(), 1e-9);
  }
}

TEST(ProcrustesTest, OrthogonalSubspacesGiveMaximum) {
  Matrix e1 = Matrix::Zero(2, 1);
  Matrix e2 = Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  e2(1, 0) = 1.0;
  const Matrix O = procrustes_rotation(e1, e2);
  EXPECT_NEAR(std::abs(O(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR((e2 - e1 * O).squaredNorm(), 2.0, 1e-15);
  EXPECT_THROW(procrustes_rotation(e1, Matrix::Zero(3, 1)), ShapeError);
}

TEST(PrincipalAngleTest, Examples) {
  std::mt19937_64 gen(3);
  const Matrix X = testing::random_orthonormal(10, 3, gen);
  EXPECT_NEAR(principal_angle_distance(X, X), 0.0, 1e-7);
  Matrix e1 = Matrix::Zero(2, 1);
  Matrix e2 = Matrix::Zero(2, 1);
  e1(0, 0) = 1.0;
  e2(1, 0) = 1.0;
  EXPECT_NEAR(principal_angle_distance(e1, e2), 1.0, 1e-15);
}

TEST(PrincipalAngleTest, BoundsProcrustesDistance) {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix A = testing::random_orthonormal(12, 3, gen);
    const Matrix B = testing::random_orthonormal(12, 3, gen);
    const double d = principal_angle_distance(B, A);
    const double proc = (B - A * procrustes_rotation(A, B)).squaredNorm();
    EXPECT_LE(0.5 * proc, d * d + 1e-9);
  }
}

TEST(ProcrustesTest, DistanceInvariantUnderRebasis) {
  std::mt19937_64 gen(5);
  const Matrix A = testing::random_orthonormal(15, 4, gen);
  const Matrix B = testing::random_orthonormal(15, 4, gen);
  auto dist = [](const Matrix& bar, const Matrix& x) {
    return (x - bar * procrustes_rotation(bar, x)).norm();
  };
  const double base = dist(A, B);
  for (int t = 0; t < 10; ++t) {
    const Matrix Q1 = testing::random_orthonormal(4, 4, gen);
    const Matrix Q2 = testing::random_orthonormal(4, 4, gen);
    EXPECT_NEAR(dist(A * Q1, B), base, 1e-8);
    EXPECT_NEAR(dist(A, B * Q2), base, 1e-8);
  }
}

TEST(EigengapsTest, CanonicalFourParameter) {
  const double lk = smallest_nonzero_eigenvalue_fourparam(5, 0.2, 0.1);
  Vector sq = Vector::Zero(10);
  sq[0] = 1.0;
  for (int i = 1; i < 5; ++i) sq[i] = lk * lk;
  const Eigengaps g = eigengaps(sq, canonical_interval(lk));
  EXPECT_NEAR(g.delta, lk * lk / 2.0, 1e-15);
  EXPECT_NEAR(g.delta_prime, lk * lk / 2.0, 1e-15);
}

TEST(EigengapsTest, SmallExamples) {
  Vector v(2);
  v << 1.0, 0.0;
  const Eigengaps g = eigengaps(v, Interval::make(0.5, 2.0));
  EXPECT_DOUBLE_EQ(g.delta, 0.5);
  EXPECT_DOUBLE_EQ(g.delta_prime, 0.5);
  Vector inside(2);
  inside << 1.0, 0.8;
  const Eigengaps all = eigengaps(inside, Interval::make(0.5, 2.0));
  EXPECT_TRUE(all.delta_infinite);
  EXPECT_TRUE(std::isinf(all.delta));
  EXPECT_FALSE(all.delta_prime_infinite);
  EXPECT_THROW(eigengaps(v, Interval{2.0, 0.5}), InvalidInterval);
}

TEST(WeylTest, Examples) {
  Vector a(3);
  a << 1.0, 0.09, 0.0;
  Vector b(3);
  b << 1.0, 0.16, 0.0;
  EXPECT_NEAR(weyl_check(a, b, 1.0).gap, 0.07, 1e-15);
  EXPECT_TRUE(weyl_check(a, a, 0.0).holds);
  EXPECT_FALSE(weyl_check(a, b, 0.01).holds);
  EXPECT_THROW(weyl_check(a, Vector::Zero(2), 1.0), ShapeError);
}

TEST(MisclusterTest, ExactCentroidsGiveEmptySet) {
  const BlockModel m = make_four_parameter(3, 4, 0.3, 0.1);
  const PopulationSpectrum pop = population_spectrum(m);
  const Matrix O = Matrix::Identity(3, 3);
  const MisclusterReport r = misclustered_set(pop.Zmu, m.membership(), pop.mu, O, 4);
  EXPECT_TRUE(r.nodes.empty());
  EXPECT_EQ(r.implication_violations, 0);
}

TEST(MisclusterTest, BoundaryIsInclusive) {
  // mu = I keeps the perturbed coordinate at zero, so the distance is exact.
  const std::vector<int> membership{0, 0, 1, 1};
  const Matrix mu = Matrix::Identity(2, 2);
  Matrix C(4, 2);
  C << 1, 0, 1, 0, 0, 1, 0, 1;
  const double radius = 1.0 / std::sqrt(2.0 * 2);
  C(1, 1) = radius;
  const MisclusterReport r = misclustered_set(C, membership, mu, Matrix::Identity(2, 2), 2);
  EXPECT_DOUBLE_EQ(r.radius, radius);
  EXPECT_EQ(r.nodes, (IndexList{1}));
  C(1, 1) = std::nextafter(radius, 0.0);
  const MisclusterReport inside = misclustered_set(C, membership, mu, Matrix::Identity(2, 2), 2);
  EXPECT_TRUE(inside.nodes.empty());
  EXPECT_EQ(inside.implication_violations, 0);
}

TEST(TailBoundTest, Hypothesis) {
  EXPECT_FALSE(theoretical_tail_bound(7, 0.5).hypothesis_holds);
  EXPECT_TRUE(std::isnan(theoretical_tail_bound(7, 0.5).bound));
  // sqrt(n)/log n dips below 2 after n = 2; scan for where it recovers.
  EXPECT_TRUE(theoretical_tail_bound(2, 0.5).hypothesis_holds);
  int first = 3;
  while (!(std::sqrt(first) / std::log(first) > 2.0)) ++first;
  EXPECT_FALSE(theoretical_tail_bound(first - 1, 0.5).hypothesis_holds);
  EXPECT_TRUE(theoretical_tail_bound(first, 0.5).hypothesis_holds);
  EXPECT_THROW(theoretical_tail_bound(100, 0.0), InvalidParameter);
  EXPECT_THROW(theoretical_tail_bound(100, 1.5), InvalidParameter);
}

TEST(TailBoundTest, KnownValue) {
  // 32 sqrt(2) log(10^4) / 100, evaluated separately: 4.1681242458
  const TailBound t = theoretical_tail_bound(10000, 1.0);
  EXPECT_NEAR(t.bound, 4.1681242458, 1e-9);
  EXPECT_TRUE(t.concentration_regime);
}

TEST(TailBoundTest, ProbabilityUnderConcentration) {
  for (int n : {100, 1000, 10000, 100000}) {
    for (double tau : {0.5, 0.7, 0.9, 1.0}) {
      const TailBound t = theoretical_tail_bound(n, tau);
      if (tau * tau * std::log(n) >= 2.0) {
        EXPECT_LE(t.prob, 4.0 / (static_cast<double>(n) * n) * (1 + 1e-12));
      }
    }
  }
}

// Oracle for ||LL - U Λ² U^T||_F through the trace identity
// sum λ_i^4 - 2 sum_j Λ_j^2 ||L u_j||^2 + sum_j Λ_j^4.
double frob_by_trace(const Matrix& L, const Matrix& U, const Vector& lambda) {
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(L).eigenvalues();
  double total = ev.array().pow(4).sum() + lambda.array().pow(4).sum();
  for (int j = 0; j < lambda.size(); ++j) {
    total -= 2.0 * lambda[j] * lambda[j] * (L * U.col(j)).squaredNorm();
  }
  return std::sqrt(std::max(total, 0.0));
}

TEST(DiagnosticsTest, PopulationInputsAreExact) {
  const BlockModel m = make_four_parameter(3, 6, 0.3, 0.1);
  const PopulationSpectrum pop = population_spectrum(m);
  EmpiricalSpectrum emp;
  emp.laplacian = normalized_laplacian(population_adjacency(m));
  emp.eigenvalues = symmetric_eigenvalues(emp.laplacian.L);
  emp.basis = top_k_by_abs(emp.laplacian.L, 3);
  const ClusterResult cl = kmeans(emp.basis.X, 3, 5, 1);
  const DiagnosticsReport r = full_diagnostics(m, pop, emp, cl);
  EXPECT_LT(r.frob_LL, 1e-12);
  EXPECT_LT(r.eigvec_dist, 1e-9);
  EXPECT_EQ(r.miscluster_count, 0);
  EXPECT_TRUE(r.dims_matched);
  EXPECT_TRUE(report_violations(r).empty());
}

TEST(DiagnosticsTest, Heterophilic) {
  Matrix B(2, 2);
  B << 0, 1, 1, 0;
  const BlockModel m({0, 0, 1, 1}, B);
  const Graph g = testing::heterophilic_graph();
  const EmpiricalSpectrum emp = spectral_embedding(g, 2);
  EXPECT_NEAR(emp.basis.lambdas[0], 1.0, 1e-12);
  EXPECT_NEAR(emp.basis.lambdas[1], -1.0, 1e-12);
  const ClusterResult cl = kmeans(emp.basis.X, 2, 3, 1);
  const DiagnosticsReport r = full_diagnostics(m, g, emp.basis, cl);
  EXPECT_EQ(r.miscluster_count, 0);
  EXPECT_EQ(label_align(cl.assignments, m.membership(), 2).agreement, 4);
}

TEST(DiagnosticsTest, SampledReplicateInvariants) {
  const BlockModel m = make_four_parameter(5, 50, 0.2, 0.1);
  const PopulationSpectrum pop = population_spectrum(m);
  const DiagnosticsReport r = run_replicate(m, 1, 100);
  EXPECT_TRUE(report_violations(r).empty());
  EXPECT_EQ(r.n, 250);
  EXPECT_EQ(r.P, 50);
  EXPECT_NEAR(r.tau, 0.14, 1e-15);
  EXPECT_NEAR(r.lambda_k, 1.0 / 3.5, 1e-12);

  const Graph g = sample_blockmodel(m, 1);
  const EmpiricalSpectrum emp = spectral_embedding(g, 5, IsolatedPolicy::kZeroRows);
  EXPECT_NEAR(r.frob_LL, frob_by_trace(emp.laplacian.L, pop.Zmu, pop.lambda), 1e-8);
  EXPECT_NEAR(r.frob_LL,
              squared_laplacian_distance(emp.laplacian.L, population_laplacian(m)), 1e-10);
}

TEST(DiagnosticsTest, ShapeChecks) {
  const BlockModel m = make_four_parameter(2, 5, 0.3, 0.1);
  const EmpiricalSpectrum emp = spectral_embedding(sample_blockmodel(m, 2), 3,
                                                   IsolatedPolicy::kZeroRows);
  const ClusterResult cl = kmeans(emp.basis.X, 3, 1, 1);
  EXPECT_THROW(full_diagnostics(m, population_spectrum(m), emp, cl), ShapeError);
}

TEST(DiagnosticsTest, CsvShape) {
  const DiagnosticsReport r = run_replicate(make_four_parameter(3, 20, 0.3, 0.1), 3, 20);
  EXPECT_EQ(count_fields(diagnostics_csv_header()), count_fields(diagnostics_csv_row(r)));
  EXPECT_EQ(diagnostics_csv_header().substr(0, 8), "n,k,tau,");
  EXPECT_NE(diagnostics_text(r).find("misclustered nodes"), std::string::npos);
}

TEST(FormatTest, Numbers) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
  EXPECT_EQ(format_number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

}  // namespace
}  // namespace sbm
