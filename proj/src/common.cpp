#include "sbm/common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sbm {

Interval Interval::make(double lo, double hi) {
  if (!(lo < hi)) {
    std::ostringstream msg;
    msg << "invalid interval (" << lo << ", " << hi << "): need lo < hi";
    throw InvalidInterval(msg.str());
  }
  return Interval{lo, hi};
}

double Interval::distance(double x) const {
  if (x < lo) return lo - x;
  if (x > hi) return x - hi;
  return 0.0;
}

double Interval::distance_to_complement(double x) const {
  if (!contains(x)) return 0.0;
  return std::min(x - lo, hi - x);
}

IndexList order_by_abs_descending(const Vector& values) {
  const int count = static_cast<int>(values.size());
  IndexList order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });

  IndexList result;
  result.reserve(count);
  int start = 0;
  while (start < count) {
    int end = start + 1;
    while (end < count && std::abs(values[order[end - 1]]) -
                                  std::abs(values[order[end]]) <
                              kEigenTieTolerance) {
      ++end;
    }
    IndexList run(order.begin() + start, order.begin() + end);
    std::sort(run.begin(), run.end(), [&](int a, int b) {
      const bool pos_a = values[a] >= 0.0;
      const bool pos_b = values[b] >= 0.0;
      if (pos_a != pos_b) return pos_a;
      return a < b;
    });
    result.insert(result.end(), run.begin(), run.end());
    start = end;
  }
  return result;
}

void normalize_column_signs(Matrix& columns) {
  for (Eigen::Index j = 0; j < columns.cols(); ++j) {
    auto col = columns.col(j);
    const double peak = col.cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    const double cutoff = peak * (1.0 - 1e-9);
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (std::abs(col[i]) >= cutoff) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }
}

}  // namespace sbm
