#include "sbm/laplacian.hpp"

#include <cmath>
#include <string>

namespace sbm {

Vector degrees(const Matrix& W) { return W.rowwise().sum(); }

LaplacianPair normalized_laplacian(const Matrix& W, IsolatedPolicy policy) {
  const auto n = W.rows();
  if (W.cols() != n) throw ShapeError("adjacency matrix must be square");
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (W(i, j) < 0.0) throw InvalidParameter("adjacency matrix has a negative entry");
      if (W(i, j) != W(j, i)) throw ShapeError("adjacency matrix is not symmetric");
    }
  }

  const Vector d = degrees(W);
  LaplacianPair out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (d[i] == 0.0) {
      out.isolated.push_back(static_cast<int>(i));
    } else {
      out.kept.push_back(static_cast<int>(i));
    }
  }

  if (!out.isolated.empty() && policy == IsolatedPolicy::kError) {
    std::string ids;
    for (std::size_t i = 0; i < out.isolated.size() && i < 20; ++i) {
      if (i) ids += ", ";
      ids += std::to_string(out.isolated[i]);
    }
    if (out.isolated.size() > 20) ids += ", ...";
    throw IsolatedNodes(std::to_string(out.isolated.size()) +
                            " isolated node(s) with zero degree: " + ids,
                        out.isolated);
  }

  if (policy == IsolatedPolicy::kDrop && !out.isolated.empty()) {
    const auto m = static_cast<Eigen::Index>(out.kept.size());
    out.D.resize(m);
    for (Eigen::Index a = 0; a < m; ++a) out.D[a] = d[out.kept[a]];
    const Vector scale = out.D.cwiseSqrt().cwiseInverse();
    out.L.resize(m, m);
    for (Eigen::Index b = 0; b < m; ++b) {
      for (Eigen::Index a = 0; a < m; ++a) {
        out.L(a, b) = W(out.kept[a], out.kept[b]) * scale[a] * scale[b];
      }
    }
    return out;
  }

  out.kept.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.kept[i] = static_cast<int>(i);
  out.D = d;
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) scale[i] = d[i] > 0.0 ? 1.0 / std::sqrt(d[i]) : 0.0;
  out.L = scale.asDiagonal() * W * scale.asDiagonal();
  return out;
}

double squared_laplacian_distance(const Matrix& L, const Matrix& Lbar) {
  if (L.rows() != L.cols() || Lbar.rows() != Lbar.cols() || L.rows() != Lbar.rows()) {
    throw ShapeError("squared_laplacian_distance needs two square matrices of equal size");
  }
  Matrix diff = L * L;
  diff.noalias() -= Lbar * Lbar;
  return diff.norm();
}

}  // namespace sbm
