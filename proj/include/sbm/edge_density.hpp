#pragma once

#include <string>

#include "sbm/sampler.hpp"

namespace sbm {

// (i, j) is an edge iff i != j and some k is adjacent to both: the
// off-diagonal support of W^2. A direct edge survives only when its
// endpoints also share a neighbor.
Graph friends_of_friends(const Graph& graph);

// Degrees in the friends-of-friends graph without storing its edges.
Vector friends_of_friends_degrees(const Graph& graph);

struct DensityAudit {
  int n = 0;
  double mean_deg_c = 0.0;   // mean canonical degree
  double mean_deg_ff = 0.0;  // mean friends-of-friends degree
  double T_c = 0.0;          // percent of nodes with canonical degree > n/10
  double T_ff = 0.0;         // same for friends-of-friends degree
  double tau_hat_c = 0.0;    // min canonical degree / n
  double tau_hat_ff = 0.0;   // min friends-of-friends degree / n
};

// Throws InvalidParameter on an empty graph (n = 0).
DensityAudit density_audit(const Graph& graph);

std::string audit_csv_header();
std::string audit_csv_row(const DensityAudit& audit);

}  // namespace sbm
