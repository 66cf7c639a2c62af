#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sbm/blockmodel.hpp"
#include "sbm/sampler.hpp"
#include "test_util.hpp"

namespace sbm {
namespace {

TEST(GraphTest, FromEdgesDeduplicates) {
  const Graph g = Graph::from_edges(4, {{0, 1}, {1, 0}, {2, 3}, {0, 1}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(0, 2));
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{0, 1}, {2, 3}}));
}

TEST(GraphTest, RejectsSelfLoopsAndRange) {
  EXPECT_THROW(Graph::from_edges(3, {{1, 1}}), InvalidParameter);
  EXPECT_THROW(Graph::from_edges(3, {{0, 3}}), InvalidParameter);
  EXPECT_THROW(Graph::from_edges(3, {{-1, 0}}), InvalidParameter);
}

TEST(GraphTest, AdjacencyIsSymmetricWithZeroDiagonal) {
  const Graph g = testing::heterophilic_graph();
  const Matrix W = g.adjacency();
  EXPECT_EQ(W, W.transpose());
  EXPECT_EQ(W.diagonal().sum(), 0.0);
  EXPECT_EQ(g.degrees(), Vector::Constant(4, 2.0));
}

TEST(SampleTest, ZeroMatrixGivesEmptyGraph) {
  EXPECT_EQ(sample_adjacency(Matrix::Zero(10, 10), 99).edge_count(), 0u);
}

TEST(SampleTest, AllOnesGivesCompleteGraph) {
  const Graph g = sample_adjacency(Matrix::Ones(7, 7), 5);
  EXPECT_EQ(g.degrees(), Vector::Constant(7, 6.0));
}

TEST(SampleTest, InputValidation) {
  Matrix bad = Matrix::Constant(3, 3, 0.5);
  bad(0, 1) = 1.2;
  bad(1, 0) = 1.2;
  EXPECT_THROW(sample_adjacency(bad, 1), InvalidParameter);
  Matrix asym = Matrix::Constant(3, 3, 0.5);
  asym(0, 1) = 0.4;
  EXPECT_THROW(sample_adjacency(asym, 1), ShapeError);
  EXPECT_THROW(sample_adjacency(Matrix::Zero(2, 3), 1), ShapeError);
}

TEST(SampleTest, DeterministicAndSeedSensitive) {
  const Matrix P = Matrix::Constant(50, 50, 0.3);
  EXPECT_EQ(sample_adjacency(P, 17).edges(), sample_adjacency(P, 17).edges());
  EXPECT_NE(sample_adjacency(P, 17).edges(), sample_adjacency(P, 18).edges());
}

// Pins the draw rule: edge (i, j), i < j, iff u(i n + j) < P_ij.
TEST(SampleTest, CounterRuleIndependentOracle) {
  const int n = 30;
  const Matrix P = Matrix::Constant(n, n, 0.4);
  const Graph g = sample_adjacency(P, 12345);
  // Reimplementation of SplitMix64 for the oracle.
  auto mix = [](std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  const std::uint64_t key = mix(12345);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::uint64_t c = static_cast<std::uint64_t>(i) * n + j;
      const double u = static_cast<double>(mix(key + (c + 1) * 0x9e3779b97f4a7c15ULL) >> 11) *
                       0x1.0p-53;
      EXPECT_EQ(g.has_edge(i, j), u < 0.4);
    }
  }
}

TEST(SampleTest, BlockmodelMatchesDenseSampler) {
  const BlockModel m = make_four_parameter(3, 20, 0.3, 0.1);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    EXPECT_EQ(sample_blockmodel(m, seed).edges(),
              sample_adjacency(population_adjacency(m), seed).edges());
  }
}

TEST(SampleTest, DensityConcentration) {
  const int n = 1000;
  const Matrix P = Matrix::Constant(n, n, 0.5);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double pairs = n * (n - 1) / 2.0;
    const double density = static_cast<double>(sample_adjacency(P, seed).edge_count()) / pairs;
    EXPECT_NEAR(density, 0.5, 0.01);
  }
}

TEST(SampleTest, EdgeFrequencyCalibration) {
  const int n = 24;
  Matrix P(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) P(i, j) = 0.02 + 0.96 * ((i * 7 + j * 7) % 24) / 23.0;
  }
  const int m = 200;
  Matrix counts = Matrix::Zero(n, n);
  for (int s = 0; s < m; ++s) counts += sample_adjacency(P, 1000 + s).adjacency();
  int pairs = 0;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      ++pairs;
      const double tol = 4.0 * std::sqrt(P(i, j) * (1.0 - P(i, j)) / m);
      if (std::abs(counts(i, j) / m - P(i, j)) <= tol) ++inside;
    }
  }
  EXPECT_GE(inside, 0.99 * pairs);
}

TEST(EdgeListTest, RoundTrip) {
  const Graph g = sample_blockmodel(make_four_parameter(2, 10, 0.4, 0.1), 4);
  std::stringstream buf;
  write_edge_list(g, buf);
  EXPECT_EQ(buf.str().rfind("# nodes=20\n", 0), 0u);
  const EdgeListData back = read_edge_list(buf);
  EXPECT_EQ(back.graph.n(), 20);
  EXPECT_EQ(back.graph.edges(), g.edges());
  EXPECT_TRUE(back.labels.empty());
}

TEST(EdgeListTest, HeaderKeepsIsolatedNodes) {
  std::istringstream in("# nodes=5\n0 1\n");
  EXPECT_EQ(read_edge_list(in).graph.n(), 5);
}

TEST(EdgeListTest, StringIdsDuplicatesAndLoops) {
  std::istringstream in("# a comment\nalice bob\nbob alice\ncarol carol\nbob carol\n");
  const EdgeListData d = read_edge_list(in);
  EXPECT_EQ(d.graph.n(), 3);
  EXPECT_EQ(d.labels, (std::vector<std::string>{"alice", "bob", "carol"}));
  EXPECT_EQ(d.graph.edge_count(), 2u);
  EXPECT_EQ(d.duplicate_edges, 1u);
  EXPECT_EQ(d.self_loops, 1u);
  EXPECT_EQ(d.label(2), "carol");
}

TEST(EdgeListTest, MalformedLineNamesLineNumber) {
  std::istringstream in("0 1\n1 2 3\n");
  try {
    read_edge_list(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream out_of_range("# nodes=3\n0 3\n");
  EXPECT_THROW(read_edge_list(out_of_range), ParseError);
  std::istringstream non_numeric("# nodes=3\n0 x\n");
  EXPECT_THROW(read_edge_list(non_numeric), ParseError);
}

}  // namespace
}  // namespace sbm
