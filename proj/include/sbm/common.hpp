#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sbm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<int>;

// Error hierarchy. UserError covers bad inputs (exit code 1 in the CLI),
// NumericalError covers failures of the numerics themselves (exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UserError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public UserError {
 public:
  using UserError::UserError;
};

class ShapeError : public UserError {
 public:
  using UserError::UserError;
};

class InvalidInterval : public UserError {
 public:
  using UserError::UserError;
};

class InvalidLabel : public UserError {
 public:
  using UserError::UserError;
};

class ParseError : public UserError {
 public:
  using UserError::UserError;
};

class IoError : public UserError {
 public:
  using UserError::UserError;
};

class IsolatedNodes : public UserError {
 public:
  IsolatedNodes(const std::string& what, IndexList nodes)
      : UserError(what), nodes_(std::move(nodes)) {}
  const IndexList& nodes() const { return nodes_; }

 private:
  IndexList nodes_;
};

class RankDeficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegeneratePopulation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SolverFailure : public NumericalError {
 public:
  SolverFailure(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Open interval (lo, hi) on the real line.
struct Interval {
  double lo;
  double hi;

  // Throws InvalidInterval unless lo < hi.
  static Interval make(double lo, double hi);
  bool contains(double x) const { return x > lo && x < hi; }
  // Distance from x to the closure of the interval; zero inside.
  double distance(double x) const;
  // Distance from an interior point x to the complement of the interval.
  double distance_to_complement(double x) const;
};

// Eigenvalue magnitudes closer than this are treated as tied.
inline constexpr double kEigenTieTolerance = 1e-9;

// Indices of `values` ordered by descending absolute value. Runs of
// magnitudes within kEigenTieTolerance of each other are reordered so that
// positive values come first, each side by ascending original index.
IndexList order_by_abs_descending(const Vector& values);

// Flips columns so that in each column the entry of largest magnitude is
// positive. Entries within a relative 1e-9 of the column maximum count as
// tied and the lowest row index among them decides.
void normalize_column_signs(Matrix& columns);

}  // namespace sbm
