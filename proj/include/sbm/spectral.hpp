#pragma once

#include "sbm/common.hpp"

namespace sbm {

// Full eigendecomposition of a symmetric matrix, eigenvalues ascending.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};

// LAPACK dsyevd. Throws ShapeError if M is not square or not symmetric to
// within 1e-10, SolverFailure if LAPACK reports non-convergence.
SymmetricEigen eigendecompose_symmetric(const Matrix& M);

// Eigenvalues only, ascending.
Vector symmetric_eigenvalues(const Matrix& M);

enum class SelectionRule { kAbs, kPositive };

struct EigenBasis {
  Matrix X;        // n x k, orthonormal columns, sign-normalized
  Vector lambdas;  // descending by |λ| (kAbs) or algebraically (kPositive)
  SelectionRule rule = SelectionRule::kAbs;
  // The k-th and (k+1)-th magnitudes are within kEigenTieTolerance, so the
  // selected subspace is not unique.
  bool tie_at_cutoff = false;

  int k() const { return static_cast<int>(lambdas.size()); }
};

struct SpectralOptions {
  // Matrices larger than this use the Lanczos path.
  int dense_limit = 4000;
};

// The k eigenpairs of largest |λ|. Selected residuals are checked against
// 1e-8 ||M||_F; a violation throws SolverFailure.
EigenBasis top_k_by_abs(const Matrix& M, int k, const SpectralOptions& options = {});

// Selection from an existing full decomposition of M.
EigenBasis select_eigenpairs(const SymmetricEigen& full, int k,
                             SelectionRule rule = SelectionRule::kAbs);

// Lanczos with full reorthogonalization. The Krylov space grows until all k
// wanted Ritz pairs (largest |θ|, so both spectral ends) have residual below
// 1e-10 ||M||_F. Exposed for testing; top_k_by_abs dispatches here above
// dense_limit.
EigenBasis lanczos_top_k_by_abs(const Matrix& M, int k);

// Indices i with lambdas[i] inside the open interval S.
IndexList eigenvalues_in_interval(const Vector& lambdas, const Interval& S);

// Indices i with lambdas[i]^2 inside S, i.e. lambdas[i] in S' = {l : l^2 in S}.
IndexList eigenvalues_with_square_in(const Vector& lambdas, const Interval& S);

}  // namespace sbm
