#include "sbm/spectral.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "sbm/rng.hpp"

namespace sbm {
namespace {

void require_symmetric(const Matrix& M) {
  if (M.rows() != M.cols()) throw ShapeError("matrix must be square");
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw ShapeError("matrix is not symmetric (max |M - M^T| = " + std::to_string(asym) + ")");
  }
}

void require_k(int k, Eigen::Index n) {
  if (k < 1 || k > n) {
    throw InvalidParameter("invalid k = " + std::to_string(k) + " for a " + std::to_string(n) +
                           " x " + std::to_string(n) + " matrix");
  }
}

void check_residuals(const Matrix& M, const EigenBasis& basis) {
  const double limit = 1e-8 * M.norm();
  const Matrix residual = M * basis.X - basis.X * basis.lambdas.asDiagonal();
  for (Eigen::Index j = 0; j < residual.cols(); ++j) {
    const double r = residual.col(j).norm();
    if (!(r <= limit)) {
      throw SolverFailure("eigenpair " + std::to_string(j) + " residual " + std::to_string(r) +
                              " exceeds " + std::to_string(limit),
                          r);
    }
  }
}

bool magnitudes_tied(double a, double b) {
  return std::abs(std::abs(a) - std::abs(b)) < kEigenTieTolerance;
}

}  // namespace

SymmetricEigen eigendecompose_symmetric(const Matrix& M) {
  require_symmetric(M);
  const auto n = static_cast<lapack_int>(M.rows());
  SymmetricEigen out;
  out.vectors = M;
  out.values.resize(n);
  if (n == 0) return out;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, out.vectors.data(), n,
                                         out.values.data());
  if (info != 0) {
    throw SolverFailure("dsyevd failed with info = " + std::to_string(info),
                        std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

Vector symmetric_eigenvalues(const Matrix& M) {
  require_symmetric(M);
  const auto n = static_cast<lapack_int>(M.rows());
  Matrix work = M;
  Vector values(n);
  if (n == 0) return values;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'U', n, work.data(), n, values.data());
  if (info != 0) {
    throw SolverFailure("dsyevd failed with info = " + std::to_string(info),
                        std::numeric_limits<double>::quiet_NaN());
  }
  return values;
}

EigenBasis select_eigenpairs(const SymmetricEigen& full, int k, SelectionRule rule) {
  const auto n = full.values.size();
  require_k(k, n);
  IndexList order;
  if (rule == SelectionRule::kAbs) {
    order = order_by_abs_descending(full.values);
  } else {
    order.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) order[i] = static_cast<int>(n - 1 - i);
  }

  EigenBasis basis;
  basis.rule = rule;
  basis.X.resize(full.vectors.rows(), k);
  basis.lambdas.resize(k);
  for (int j = 0; j < k; ++j) {
    basis.lambdas[j] = full.values[order[j]];
    basis.X.col(j) = full.vectors.col(order[j]);
  }
  if (k < n) {
    const double last = full.values[order[k - 1]];
    const double next = full.values[order[k]];
    basis.tie_at_cutoff = rule == SelectionRule::kAbs ? magnitudes_tied(last, next)
                                                      : std::abs(last - next) < kEigenTieTolerance;
  }
  normalize_column_signs(basis.X);
  return basis;
}

EigenBasis top_k_by_abs(const Matrix& M, int k, const SpectralOptions& options) {
  require_symmetric(M);
  require_k(k, M.rows());
  EigenBasis basis = M.rows() > options.dense_limit
                         ? lanczos_top_k_by_abs(M, k)
                         : select_eigenpairs(eigendecompose_symmetric(M), k);
  check_residuals(M, basis);
  return basis;
}

EigenBasis lanczos_top_k_by_abs(const Matrix& M, int k) {
  require_symmetric(M);
  const auto n = M.rows();
  require_k(k, n);
  const double scale = std::max(M.norm(), 1e-300);
  const double tol = 1e-10 * scale;

  // Fixed start vector so results are reproducible.
  StreamRng rng(0x5eed1a2c05ULL);
  auto random_unit = [&](const Matrix& basis, Eigen::Index used) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next_uniform() - 0.5;
    for (int pass = 0; pass < 2; ++pass) {
      v -= basis.leftCols(used) * (basis.leftCols(used).transpose() * v);
    }
    return Vector(v / v.norm());
  };

  Eigen::Index target = std::min<Eigen::Index>(n, std::max<Eigen::Index>(2 * k + 20, 40));
  Matrix q(n, target + 1);
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples q_j and q_{j+1}
  q.col(0) = random_unit(q, 0);

  while (true) {
    // Extend the Krylov basis to `target` columns.
    while (static_cast<Eigen::Index>(alpha.size()) < target) {
      const auto j = static_cast<Eigen::Index>(alpha.size());
      Vector w = M * q.col(j);
      alpha.push_back(q.col(j).dot(w));
      for (int pass = 0; pass < 2; ++pass) {
        w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
      }
      if (j + 1 == n) {
        beta.push_back(0.0);
        break;
      }
      if (q.cols() <= j + 1) q.conservativeResize(Eigen::NoChange, target + 1);
      const double b = w.norm();
      if (b <= 1e-12 * scale) {
        // Invariant subspace found: restart from a fresh orthogonal direction.
        beta.push_back(0.0);
        q.col(j + 1) = random_unit(q, j + 1);
      } else {
        beta.push_back(b);
        q.col(j + 1) = w / b;
      }
    }

    const auto m = static_cast<Eigen::Index>(alpha.size());
    Matrix t = Matrix::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> ritz(t);
    const IndexList order = order_by_abs_descending(ritz.eigenvalues());
    // Residual of Ritz pair j is |beta_m * (last component of its vector)|.
    bool converged = m >= k;
    for (int j = 0; j < k && converged; ++j) {
      if (std::abs(beta.back() * ritz.eigenvectors()(m - 1, order[j])) > tol) converged = false;
    }
    if (converged || m == n) {
      EigenBasis basis;
      basis.rule = SelectionRule::kAbs;
      basis.X.resize(n, k);
      basis.lambdas.resize(k);
      for (int j = 0; j < k; ++j) {
        basis.lambdas[j] = ritz.eigenvalues()[order[j]];
        basis.X.col(j) = q.leftCols(m) * ritz.eigenvectors().col(order[j]);
      }
      if (k < m) {
        basis.tie_at_cutoff = magnitudes_tied(ritz.eigenvalues()[order[k - 1]],
                                              ritz.eigenvalues()[order[k]]);
      }
      normalize_column_signs(basis.X);
      return basis;
    }
    target = std::min<Eigen::Index>(n, 2 * m);
  }
}

IndexList eigenvalues_in_interval(const Vector& lambdas, const Interval& S) {
  const Interval checked = Interval::make(S.lo, S.hi);
  IndexList out;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (checked.contains(lambdas[i])) out.push_back(static_cast<int>(i));
  }
  return out;
}

IndexList eigenvalues_with_square_in(const Vector& lambdas, const Interval& S) {
  const Interval checked = Interval::make(S.lo, S.hi);
  IndexList out;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (checked.contains(lambdas[i] * lambdas[i])) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace sbm
