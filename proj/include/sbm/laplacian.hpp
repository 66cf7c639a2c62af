#pragma once

#include "sbm/common.hpp"

namespace sbm {

// What normalized_laplacian does with zero-degree nodes.
enum class IsolatedPolicy {
  kError,     // throw IsolatedNodes listing them
  kDrop,      // remove their rows and columns; `kept` maps back to input ids
  kZeroRows,  // keep them with all-zero rows and columns in L
};

struct LaplacianPair {
  Vector D;        // degrees of the nodes in L
  Matrix L;        // D^{-1/2} W D^{-1/2}
  IndexList kept;  // input id of each row of L
  IndexList isolated;  // input ids with zero degree (dropped or zeroed)
};

// D_ii = sum_k W_ik.
Vector degrees(const Matrix& W);

// L_ij = W_ij / sqrt(D_ii D_jj). Throws ShapeError if W is not square and
// symmetric, InvalidParameter on negative entries.
LaplacianPair normalized_laplacian(const Matrix& W, IsolatedPolicy policy = IsolatedPolicy::kError);

// ||L L - Lbar Lbar||_F.
double squared_laplacian_distance(const Matrix& L, const Matrix& Lbar);

}  // namespace sbm
