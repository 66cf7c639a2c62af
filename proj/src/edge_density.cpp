#include "sbm/edge_density.hpp"

#include <sstream>

#include "sbm/analysis.hpp"

namespace sbm {
namespace {

// Calls visit(i, j) once for every friends-of-friends pair with j != i,
// in ascending i and first-discovery order of j.
template <typename Visit>
void for_each_two_hop(const Graph& graph, Visit visit) {
  std::vector<int> stamp(graph.n(), -1);
  for (int i = 0; i < graph.n(); ++i) {
    stamp[i] = i;
    for (int middle : graph.neighbors(i)) {
      for (int j : graph.neighbors(middle)) {
        if (stamp[j] == i) continue;
        stamp[j] = i;
        visit(i, j);
      }
    }
  }
}

}  // namespace

Graph friends_of_friends(const Graph& graph) {
  std::vector<Edge> edges;
  for_each_two_hop(graph, [&](int i, int j) {
    if (i < j) edges.emplace_back(i, j);
  });
  return Graph::from_edges(graph.n(), edges);
}

Vector friends_of_friends_degrees(const Graph& graph) {
  Vector degrees = Vector::Zero(graph.n());
  for_each_two_hop(graph, [&](int i, int) { degrees[i] += 1.0; });
  return degrees;
}

DensityAudit density_audit(const Graph& graph) {
  if (graph.n() == 0) throw InvalidParameter("density audit of an empty graph");
  const double n = graph.n();
  const Vector deg_c = graph.degrees();
  const Vector deg_ff = friends_of_friends_degrees(graph);
  auto percent_above = [&](const Vector& deg) {
    const auto count = (deg.array() > n / 10.0).count();
    return 100.0 * static_cast<double>(count) / n;
  };
  DensityAudit audit;
  audit.n = graph.n();
  audit.mean_deg_c = deg_c.sum() / n;
  audit.mean_deg_ff = deg_ff.sum() / n;
  audit.T_c = percent_above(deg_c);
  audit.T_ff = percent_above(deg_ff);
  audit.tau_hat_c = deg_c.minCoeff() / n;
  audit.tau_hat_ff = deg_ff.minCoeff() / n;
  return audit;
}

std::string audit_csv_header() { return "n,mean_deg_c,mean_deg_ff,T_c,T_ff,tau_hat_c,tau_hat_ff"; }

std::string audit_csv_row(const DensityAudit& a) {
  std::ostringstream row;
  row << a.n << ',' << format_number(a.mean_deg_c) << ',' << format_number(a.mean_deg_ff) << ','
      << format_number(a.T_c) << ',' << format_number(a.T_ff) << ','
      << format_number(a.tau_hat_c) << ',' << format_number(a.tau_hat_ff);
  return row.str();
}

}  // namespace sbm
