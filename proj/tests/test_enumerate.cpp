#include <gtest/gtest.h>

#include <map>
#include <random>

#include "ergx/enumerate.hpp"

using namespace ergx;

namespace {

// Naive reference: every edge subset, adjacency matrix, statistics by
// definition.
struct NaiveGraph {
  int g;
  bool a[9][9] = {};
  int degree(int v) const {
    int d = 0;
    for (int u = 0; u < g; ++u) d += a[v][u];
    return d;
  }
};

std::int64_t naive_stat(const std::string& name, const NaiveGraph& G) {
  std::int64_t s = 0;
  if (name == "edges") {
    for (int i = 0; i < G.g; ++i)
      for (int j = i + 1; j < G.g; ++j) s += G.a[i][j];
  } else if (name == "triangles") {
    for (int i = 0; i < G.g; ++i)
      for (int j = i + 1; j < G.g; ++j)
        for (int k = j + 1; k < G.g; ++k) s += G.a[i][j] && G.a[j][k] && G.a[i][k];
  } else if (name.rfind("kstar", 0) == 0) {
    const int k = std::stoi(name.substr(5));
    // count k-subsets of neighbours directly
    for (int v = 0; v < G.g; ++v) {
      std::vector<int> nb;
      for (int u = 0; u < G.g; ++u)
        if (G.a[v][u]) nb.push_back(u);
      for (unsigned m = 0; m < (1u << nb.size()); ++m) s += std::popcount(m) == k;
    }
  } else if (name.rfind("degree", 0) == 0) {
    const int k = std::stoi(name.substr(6));
    for (int v = 0; v < G.g; ++v) s += G.degree(v) == k;
  }
  return s;
}

std::map<std::vector<std::int64_t>, std::uint64_t> naive_measure(int g, const std::vector<std::string>& stats) {
  std::vector<std::pair<int, int>> pairs;
  for (int j = 1; j < g; ++j)
    for (int i = 0; i < j; ++i) pairs.emplace_back(i, j);  // different slot order than the library
  std::map<std::vector<std::int64_t>, std::uint64_t> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
    NaiveGraph G{g};
    for (std::size_t e = 0; e < pairs.size(); ++e)
      if ((mask >> e) & 1) G.a[pairs[e].first][pairs[e].second] = G.a[pairs[e].second][pairs[e].first] = true;
    std::vector<std::int64_t> t;
    for (const auto& s : stats) t.push_back(naive_stat(s, G));
    ++out[t];
  }
  return out;
}

std::map<std::vector<std::int64_t>, std::uint64_t> as_map(const InducedMeasure& m) {
  std::map<std::vector<std::int64_t>, std::uint64_t> out;
  for (auto& [t, c] : m.support()) out[t] = c;
  return out;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  for (const auto& s : parse_stats(csv)) out.push_back(s.name());
  return out;
}

}  // namespace

class OracleSweep : public ::testing::TestWithParam<std::tuple<int, std::string>> {};

TEST_P(OracleSweep, MatchesBruteForce) {
  const auto& [g, stats] = GetParam();
  auto m = enumerate_measure(g, parse_stats(stats));
  EXPECT_EQ(as_map(m), naive_measure(g, split_names(stats)));
}

INSTANTIATE_TEST_SUITE_P(SmallGraphs, OracleSweep,
                         ::testing::Combine(::testing::Values(4, 5, 6),
                                            ::testing::Values("edges,triangles", "edges", "triangles,edges", "kstar2,triangles",
                                                              "edges,kstar2,kstar3", "degree0,degree2", "degree1,triangles")));

TEST(Enumerate, SevenNodesMatchesBruteForce) {
  auto m = enumerate_measure(7, parse_stats("edges,triangles"));
  EXPECT_EQ(as_map(m), naive_measure(7, {"edges", "triangles"}));
  EXPECT_EQ(m.total(), 2'097'152u);
  EXPECT_EQ(m.support_size(), 110u);
}

TEST(Enumerate, TotalsArePowersOfTwo) {
  for (int g = 3; g <= 8; ++g) {
    auto m = enumerate_measure(g, parse_stats("edges,triangles"));
    EXPECT_EQ(m.total(), std::uint64_t{1} << binomial(g, 2)) << "g=" << g;
  }
}

TEST(Enumerate, WorkerCountDoesNotChangeResult) {
  const auto base = enumerate_measure(7, parse_stats("edges,triangles"), {1});
  const auto general = enumerate_measure(6, parse_stats("kstar2,degree3"), {1});
  for (int w : {2, 8}) {
    EXPECT_EQ(enumerate_measure(7, parse_stats("edges,triangles"), {w}), base) << w;
    EXPECT_EQ(enumerate_measure(6, parse_stats("kstar2,degree3"), {w}), general) << w;
  }
}

TEST(Enumerate, EdgeMarginalIsBinomial) {
  auto m = enumerate_measure(7, parse_stats("edges,triangles"));
  std::vector<std::uint64_t> marginal(22, 0);
  for (auto& [t, c] : m.support()) marginal[static_cast<std::size_t>(t[0])] += c;
  for (int e = 0; e <= 21; ++e) EXPECT_EQ(marginal[static_cast<std::size_t>(e)], binomial(21, e)) << e;
}

TEST(Enumerate, DenseLayoutIsAxisZeroMajor) {
  InducedMeasure m(4, parse_stats("edges,triangles"));
  ASSERT_EQ(m.dims(), (std::vector<std::int64_t>{7, 5}));
  EXPECT_EQ(m.index({2, 3}), 13u);
  EXPECT_EQ(m.point(13), (std::vector<std::int64_t>{2, 3}));
  EXPECT_THROW(m.index({7, 0}), InfeasibleInput);
}

TEST(Enumerate, RejectsInfeasibleRequests) {
  EXPECT_THROW(enumerate_measure(10, parse_stats("edges")), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(12, parse_stats("edges")), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(2, parse_stats("edges")), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(5, {}), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(5, parse_stats("edges,triangles,kstar2,kstar3")), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(5, parse_stats("kstar5")), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(5, parse_stats("edges"), {0}), InfeasibleInput);
  EXPECT_THROW(enumerate_measure(9, parse_stats("kstar2,kstar3,kstar4")), InfeasibleInput);  // cell budget
  EXPECT_THROW(parse_stats("edges,wedges"), InfeasibleInput);
  EXPECT_THROW(parse_stats("kstarx"), InfeasibleInput);
}

TEST(GraphStateOps, FlipTwiceIsIdentity) {
  GraphState s(6);
  auto t = flip_edge(flip_edge(s, 1, 4), 2, 3);
  EXPECT_EQ(t.edge_count, 2);
  EXPECT_EQ(flip_edge(flip_edge(t, 3, 2), 4, 1), s);
  EXPECT_THROW(flip_edge(s, 2, 2), InfeasibleInput);
  EXPECT_THROW(flip_edge(s, 0, 6), InfeasibleInput);
  EXPECT_THROW(flip_edge(s, -1, 2), InfeasibleInput);
}

TEST(GraphStateOps, IncrementalStatsMatchRecompute) {
  std::mt19937 rng(3);
  GraphState s(8);
  for (int step = 0; step < 2000; ++step) {
    int u = static_cast<int>(rng() % 8), v = static_cast<int>(rng() % 8);
    if (u == v) continue;
    s = flip_edge(s, u, v);
    GraphState r = s;
    r.recompute();
    ASSERT_EQ(r, s);
    NaiveGraph G{8};
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) G.a[i][j] = i != j && s.has_edge(i, j);
    for (const char* name : {"edges", "triangles", "kstar2", "kstar4", "degree3"})
      ASSERT_EQ(eval_stat(StatDescriptor::parse(name), s), naive_stat(name, G)) << name;
  }
}

TEST(GraphStateOps, TriangleOnThreeNodes) {
  auto s = flip_edge(flip_edge(flip_edge(GraphState(3), 0, 1), 1, 2), 0, 2);
  EXPECT_EQ(eval_stat(StatDescriptor::triangles(), s), 1);
  EXPECT_EQ(eval_stat(StatDescriptor::k_star(2), s), 3);
  EXPECT_EQ(eval_stat(StatDescriptor::degree_count(2), s), 3);
}

TEST(Quantiles, MidpointAndLowerRules) {
  // values 1..8
  std::vector<std::uint64_t> v{5, 1, 8, 3, 2, 7, 4, 6, 0};
  EXPECT_DOUBLE_EQ(measure_quantile(v, 0.5), 4.5);
  EXPECT_DOUBLE_EQ(measure_quantile(v, 0.25), 2.5);
  EXPECT_DOUBLE_EQ(measure_quantile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(measure_quantile(v, 1.0), 8.0);
  EXPECT_DOUBLE_EQ(measure_quantile(v, 0.5, QuantileRule::lower), 4.0);
  EXPECT_DOUBLE_EQ(measure_quantile(v, 0.26, QuantileRule::lower), 3.0);
  EXPECT_DOUBLE_EQ(measure_quantile(v, 0.0, QuantileRule::lower), 1.0);
  EXPECT_THROW(measure_quantile(v, 1.5), InfeasibleInput);
  EXPECT_THROW(measure_quantile(std::vector<std::uint64_t>{0, 0}, 0.5), InfeasibleInput);
}

TEST(Quantiles, ExtremesAreMinAndMaxCount) {
  auto m = enumerate_measure(6, parse_stats("edges,triangles"));
  std::uint64_t lo = ~0ull, hi = 0;
  for (auto& [t, c] : m.support()) lo = std::min(lo, c), hi = std::max(hi, c);
  EXPECT_EQ(measure_quantile(m, 0.0), static_cast<double>(lo));
  EXPECT_EQ(measure_quantile(m, 1.0), static_cast<double>(hi));
  EXPECT_EQ(lo, 1u);
}
