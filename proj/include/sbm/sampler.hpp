#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbm/blockmodel.hpp"
#include "sbm/common.hpp"

namespace sbm {

using Edge = std::pair<int, int>;

// Simple undirected graph: symmetric 0/1 adjacency with zero diagonal.
// Stored as sorted neighbor lists; the dense matrix W is built on demand.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);

  // Duplicate edges (in either orientation) collapse to one. Self-loops and
  // out-of-range endpoints throw InvalidParameter.
  static Graph from_edges(int n, const std::vector<Edge>& edges);

  int n() const { return static_cast<int>(neighbors_.size()); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<int>& neighbors(int node) const { return neighbors_[node]; }
  bool has_edge(int u, int v) const;

  Vector degrees() const;
  Matrix adjacency() const;
  // Edges (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const;

  // Seed the graph was sampled from; empty for ingested graphs.
  std::optional<std::uint64_t> seed;

 private:
  std::vector<std::vector<int>> neighbors_;
  std::size_t edge_count_ = 0;
};

// Independent Bernoulli edges: for i < j, W_ij = 1 iff u(i n + j) < P_ij where
// u(c) is the c-th uniform of CounterRng(seed). W_ii = 0. Throws
// InvalidParameter on entries outside [0, 1], ShapeError on asymmetry.
Graph sample_adjacency(const Matrix& probabilities, std::uint64_t seed);

// Same draw as sample_adjacency(population_adjacency(model), seed) without
// materializing the n x n probability matrix.
Graph sample_blockmodel(const BlockModel& model, std::uint64_t seed);

// Edge-list format: header "# nodes=<n>", then one "u v" line per edge with
// 0-based ids, u < v, sorted.
void write_edge_list(const Graph& graph, std::ostream& out);
void write_edge_list(const Graph& graph, const std::string& path);

struct EdgeListData {
  Graph graph;
  // When the file has no "# nodes=" header, ids are arbitrary strings mapped
  // to 0..n-1 by first appearance; labels[i] is the original id of node i.
  // Empty when the header fixed numeric ids.
  std::vector<std::string> labels;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;

  // Original id of a node, numeric or string.
  std::string label(int node) const {
    return labels.empty() ? std::to_string(node) : labels[node];
  }
};

// Parses the edge-list format. Comment lines start with '#'. Throws
// ParseError naming the line number on malformed lines.
EdgeListData read_edge_list(std::istream& in);
EdgeListData read_edge_list(const std::string& path);

}  // namespace sbm
