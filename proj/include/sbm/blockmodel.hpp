#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sbm/common.hpp"

namespace sbm {

struct FourParameter {
  int k = 0;
  int s = 0;
  double p = 0.0;
  double r = 0.0;
};

// Stochastic Blockmodel with a fixed membership. Node i belongs to block
// membership()[i] in [0, k). Immutable after construction.
class BlockModel {
 public:
  // Validates: every block nonempty, B symmetric with entries in [0, 1],
  // B full rank (smallest singular value > 1e-10 * largest).
  BlockModel(std::vector<int> membership, Matrix block_matrix);

  int n() const { return static_cast<int>(membership_.size()); }
  int k() const { return static_cast<int>(block_matrix_.rows()); }
  const std::vector<int>& membership() const { return membership_; }
  const Matrix& block_matrix() const { return block_matrix_; }
  const std::vector<int>& block_sizes() const { return block_sizes_; }
  int block_of(int node) const { return membership_[node]; }
  double edge_probability(int i, int j) const {
    return block_matrix_(membership_[i], membership_[j]);
  }

  // The n x k binary matrix Z.
  Matrix membership_matrix() const;

  // Set when the model came from make_four_parameter.
  const std::optional<FourParameter>& four_parameter() const { return four_parameter_; }

 private:
  friend BlockModel make_four_parameter(int k, int s, double p, double r);

  std::vector<int> membership_;
  Matrix block_matrix_;
  std::vector<int> block_sizes_;
  std::optional<FourParameter> four_parameter_;
};

// k blocks of s contiguous nodes; B = p I + r 1 1^T.
BlockModel make_four_parameter(int k, int s, double p, double r);

// W̄ = Z B Z^T. The diagonal is B_gg, not zero: sampled graphs have no
// self-loops but the population matrix keeps them.
Matrix population_adjacency(const BlockModel& model);

// D̄ = W̄ 1, computed from block sizes without forming W̄.
Vector expected_degrees(const BlockModel& model);

// L̄ = D̄^{-1/2} W̄ D̄^{-1/2}.
Matrix population_laplacian(const BlockModel& model);

struct PopulationSpectrum {
  Matrix Zmu;     // n x k, orthonormal columns: eigenvectors of L̄
  Matrix mu;      // k x k; row g is the common row of Zmu for block g
  Vector lambda;  // nonzero eigenvalues of L̄, descending by |λ|
  Vector Dbar;    // expected degrees
};

// Closed-form eigenstructure of L̄ through the k x k problem
// (Z^T Z)^{1/2} B_L (Z^T Z)^{1/2} = V Λ V^T, B_L = D_B^{-1/2} B D_B^{-1/2},
// μ = (Z^T Z)^{-1/2} V. Columns follow the ordering of Λ and the sign rule of
// normalize_column_signs applied to Zμ.
PopulationSpectrum population_spectrum(const BlockModel& model);

// 1 / (k r/p + 1): the smallest nonzero eigenvalue of L̄ in the four
// parameter model.
double smallest_nonzero_eigenvalue_fourparam(int k, double p, double r);

// min_i D̄_ii / n.
double tau(const Vector& expected_degrees);

// Size of the largest block.
int largest_block_population(const BlockModel& model);

// Text serialization. Four-parameter models are written as one line
// "k s p r"; others as JSON with "format": "sbm-v1", a 0-based
// "membership" array and the "B" matrix as nested rows.
std::string model_to_text(const BlockModel& model);
BlockModel model_from_text(const std::string& text);
void write_model(const BlockModel& model, const std::string& path);
BlockModel read_model(const std::string& path);

}  // namespace sbm
