#include "sbm/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "sbm/rng.hpp"

namespace sbm {

Graph::Graph(int n) : neighbors_(n) {
  if (n < 0) throw InvalidParameter("negative node count");
}

Graph Graph::from_edges(int n, const std::vector<Edge>& edges) {
  Graph g(n);
  for (const auto& [u, v] : edges) {
    if (u < 0 || v < 0 || u >= n || v >= n) {
      throw InvalidParameter("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                             ") has an endpoint outside [0, " + std::to_string(n) + ")");
    }
    if (u == v) throw InvalidParameter("self-loop at node " + std::to_string(u));
    g.neighbors_[u].push_back(v);
    g.neighbors_[v].push_back(u);
  }
  std::size_t total = 0;
  for (auto& list : g.neighbors_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    total += list.size();
  }
  g.edge_count_ = total / 2;
  return g;
}

bool Graph::has_edge(int u, int v) const {
  const auto& list = neighbors_[u];
  return std::binary_search(list.begin(), list.end(), v);
}

Vector Graph::degrees() const {
  Vector d(n());
  for (int i = 0; i < n(); ++i) d[i] = static_cast<double>(neighbors_[i].size());
  return d;
}

Matrix Graph::adjacency() const {
  Matrix w = Matrix::Zero(n(), n());
  for (int i = 0; i < n(); ++i) {
    for (int j : neighbors_[i]) w(i, j) = 1.0;
  }
  return w;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (int i = 0; i < n(); ++i) {
    for (int j : neighbors_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

namespace {

template <typename ProbabilityFn>
Graph sample_upper_triangle(int n, std::uint64_t seed, ProbabilityFn probability) {
  const CounterRng rng(seed);
  std::vector<Edge> edges;
  const auto un = static_cast<std::uint64_t>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = probability(i, j);
      if (rng.uniform(static_cast<std::uint64_t>(i) * un + static_cast<std::uint64_t>(j)) < p) {
        edges.emplace_back(i, j);
      }
    }
  }
  Graph g = Graph::from_edges(n, edges);
  g.seed = seed;
  return g;
}

}  // namespace

Graph sample_adjacency(const Matrix& probabilities, std::uint64_t seed) {
  const auto n = probabilities.rows();
  if (probabilities.cols() != n) throw ShapeError("probability matrix must be square");
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = probabilities(i, j);
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidParameter("probability P(" + std::to_string(i) + "," + std::to_string(j) +
                               ") is outside [0, 1]");
      }
      if (p != probabilities(j, i)) throw ShapeError("probability matrix is not symmetric");
    }
  }
  return sample_upper_triangle(static_cast<int>(n), seed,
                               [&](int i, int j) { return probabilities(i, j); });
}

Graph sample_blockmodel(const BlockModel& model, std::uint64_t seed) {
  return sample_upper_triangle(model.n(), seed,
                               [&](int i, int j) { return model.edge_probability(i, j); });
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << "# nodes=" << graph.n() << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << ' ' << v << '\n';
}

void write_edge_list(const Graph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  write_edge_list(graph, out);
  if (!out) throw IoError("failed writing " + path);
}

namespace {

bool parse_int(const std::string& token, long long& value) {
  const char* end = token.data() + token.size();
  auto result = std::from_chars(token.data(), end, value);
  return result.ec == std::errc() && result.ptr == end;
}

bool parse_header(const std::string& line, long long& n) {
  // Accepts "# nodes=<n>" with optional spaces after '#'.
  std::size_t pos = 1;
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  static const std::string key = "nodes=";
  if (line.compare(pos, key.size(), key) != 0) return false;
  std::string rest = line.substr(pos + key.size());
  while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r' || rest.back() == '\t')) {
    rest.pop_back();
  }
  return parse_int(rest, n);
}

}  // namespace

EdgeListData read_edge_list(std::istream& in) {
  EdgeListData data;
  std::optional<long long> declared_n;
  std::unordered_map<std::string, int> ids;
  std::vector<std::pair<long long, long long>> raw;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      long long n = 0;
      if (parse_header(line.substr(first), n)) {
        if (seen_data) {
          throw ParseError("line " + std::to_string(line_no) +
                           ": \"# nodes=\" header must precede the edges");
        }
        if (n < 0) throw ParseError("line " + std::to_string(line_no) + ": negative node count");
        declared_n = n;
      }
      continue;
    }
    seen_data = true;
    std::istringstream tokens(line);
    std::string a;
    std::string b;
    std::string extra;
    if (!(tokens >> a >> b) || (tokens >> extra)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected two node ids, got \"" +
                       line + "\"");
    }
    if (declared_n) {
      long long u = 0;
      long long v = 0;
      if (!parse_int(a, u) || !parse_int(b, v)) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": node ids must be integers when a \"# nodes=\" header is present");
      }
      if (u < 0 || v < 0 || u >= *declared_n || v >= *declared_n) {
        throw ParseError("line " + std::to_string(line_no) + ": node id outside [0, " +
                         std::to_string(*declared_n) + ")");
      }
      raw.emplace_back(u, v);
    } else {
      auto intern = [&](const std::string& label) {
        auto [it, inserted] = ids.emplace(label, static_cast<int>(data.labels.size()));
        if (inserted) data.labels.push_back(label);
        return it->second;
      };
      const int u = intern(a);
      const int v = intern(b);
      raw.emplace_back(u, v);
    }
  }

  const int n = declared_n ? static_cast<int>(*declared_n) : static_cast<int>(data.labels.size());
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) {
    if (u == v) {
      ++data.self_loops;
      continue;
    }
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  data.graph = Graph::from_edges(n, edges);
  data.duplicate_edges = edges.size() - data.graph.edge_count();
  return data;
}

EdgeListData read_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open edge list " + path);
  try {
    return read_edge_list(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace sbm
