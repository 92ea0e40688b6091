#include <gtest/gtest.h>

#include <cmath>

#include "hplc/randgraph.hpp"

using namespace hplc;

namespace {

double tail_fraction(const Graph& g, std::size_t min_degree) {
  std::size_t c = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) c += g.degree(v) >= min_degree;
  return static_cast<double>(c) / static_cast<double>(g.node_count());
}

}  // namespace

TEST(Er, EdgeCountWithinThreeSigma) {
  const double n = 2000, p = 6.0 / 2000;
  const double pairs = n * (n - 1) / 2;
  const double sigma = std::sqrt(pairs * p * (1 - p));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = gen_er(2000, 6.0, seed);
    EXPECT_NEAR(static_cast<double>(g.edge_count()), pairs * p, 3 * sigma) << "seed " << seed;
  }
}

TEST(Er, EdgeProbabilityAcrossManyGraphs) {
  // Pooled over 40 small graphs, the empirical p must sit within 3 sigma.
  const double n = 60, k = 4.0, p = k / n;
  const double pairs = 40 * n * (n - 1) / 2;
  std::size_t edges = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) edges += gen_er(60, k, seed).edge_count();
  EXPECT_NEAR(static_cast<double>(edges), pairs * p, 3 * std::sqrt(pairs * p * (1 - p)));
}

TEST(Er, Boundaries) {
  EXPECT_LE(gen_er(500, 1e-9, 1).edge_count(), 1u);
  const auto dense = gen_er(50, 50.0 - 1e-9, 1);
  EXPECT_GE(dense.edge_count(), 1220u);  // of 1225
  EXPECT_THROW(gen_er(10, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(gen_er(10, 10.0, 1), std::invalid_argument);
}

TEST(Er, Deterministic) {
  EXPECT_EQ(gen_er(1000, 5.0, 9).edges(), gen_er(1000, 5.0, 9).edges());
  EXPECT_NE(gen_er(1000, 5.0, 9).edges(), gen_er(1000, 5.0, 10).edges());
}

TEST(Ba, EdgeCountAndMinimumDegree) {
  const auto g = gen_ba(10, 3, 1);
  EXPECT_EQ(g.edge_count(), 24u);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto h = gen_ba(700, 4, seed);
    EXPECT_EQ(h.edge_count(), 6u + 4u * 696u);
    for (NodeId v = 0; v < 700; ++v) ASSERT_GE(h.degree(v), 4u);
  }
}

TEST(Ba, MEqualsOneIsATree) {
  const auto g = gen_ba(200, 1, 3);
  EXPECT_EQ(g.edge_count(), 199u);
  EXPECT_EQ(connected_components(g).count(), 1u);
}

TEST(Ba, HeavyTailBand) {
  // Independent 100-seed reference run: mean 0.01267, sd 0.00094, range [0.0104, 0.0146].
  // Band is mean +- 4 sd. A Poisson(10) graph has P(deg >= 50) ~ 1.9e-19.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const double f = tail_fraction(gen_ba(5000, 5, seed), 50);
    EXPECT_GE(f, 0.00892) << "seed " << seed;
    EXPECT_LE(f, 0.01643) << "seed " << seed;
  }
}

TEST(Ba, TailHeavierThanErAtEqualMeanDegree) {
  const auto ba = gen_ba(5000, 5, 1);
  const auto er = gen_er(5000, 2.0 * static_cast<double>(ba.edge_count()) / 5000, 1);
  double prev = 1.0;
  for (std::size_t d = 5; d <= 100; d += 5) {
    const double f = tail_fraction(ba, d);
    EXPECT_LE(f, prev);
    prev = f;
  }
  for (std::size_t d : {25u, 30u, 40u}) EXPECT_GT(tail_fraction(ba, d), tail_fraction(er, d));
}

TEST(Ba, Deterministic) { EXPECT_EQ(gen_ba(800, 3, 4).edges(), gen_ba(800, 3, 4).edges()); }

TEST(Hidden, ClampedCertainEdge) {
  const std::vector<double> h{1.0, 1.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_EQ(gen_hidden(h, 1.0, seed).edge_count(), 1u);
}

TEST(Hidden, ConstantTagsMatchEr) {
  const std::size_t n = 400;
  const double k = 5;
  const std::vector<double> h(n, k);
  double sum_h = 0, sum_er = 0, sq_h = 0, sq_er = 0;
  const int runs = 60;
  for (int s = 0; s < runs; ++s) {
    const double a = static_cast<double>(gen_hidden(h, k * static_cast<double>(n), 100 + s).edge_count());
    const double b = static_cast<double>(gen_er(n, k, 500 + s).edge_count());
    sum_h += a;
    sum_er += b;
    sq_h += a * a;
    sq_er += b * b;
  }
  const double mh = sum_h / runs, me = sum_er / runs;
  const double vh = sq_h / runs - mh * mh, ve = sq_er / runs - me * me;
  EXPECT_NEAR(mh, me, 4 * std::sqrt((vh + ve) / runs));
  const double expected = k * static_cast<double>(n - 1) / 2;
  EXPECT_NEAR(mh, expected, 4 * std::sqrt(vh / runs) + 1);
}

TEST(Hidden, PairProbabilitiesOnTinyGraph) {
  // Exact edge frequencies for three nodes with distinct tags.
  const std::vector<double> h{0.9, 0.5, 0.2};
  const double beta = 1.0;
  double c01 = 0, c02 = 0, c12 = 0;
  const int runs = 40000;
  for (int s = 0; s < runs; ++s) {
    const auto g = gen_hidden(h, beta, static_cast<std::uint64_t>(s));
    c01 += g.has_edge(0, 1);
    c02 += g.has_edge(0, 2);
    c12 += g.has_edge(1, 2);
  }
  auto sd = [&](double p) { return std::sqrt(p * (1 - p) / runs); };
  EXPECT_NEAR(c01 / runs, 0.45, 4 * sd(0.45));
  EXPECT_NEAR(c02 / runs, 0.18, 4 * sd(0.18));
  EXPECT_NEAR(c12 / runs, 0.10, 4 * sd(0.10));
}

TEST(Hidden, Errors) {
  const std::vector<double> bad{1.0, 0.0};
  EXPECT_THROW(gen_hidden(bad, 1.0, 1), std::invalid_argument);
  const std::vector<double> ok{1.0, 1.0};
  EXPECT_THROW(gen_hidden(ok, 0.0, 1), std::invalid_argument);
}

TEST(BaHiddenSampler, SecondMomentMatchesLogNOverN) {
  for (std::size_t n : {1000u, 10000u}) {
    const double nn = static_cast<double>(n);
    // Sample n tags repeatedly until a million draws are pooled.
    double sum = 0;
    std::size_t count = 0;
    for (std::uint64_t s = 0; count < 1'000'000; ++s) {
      for (double x : sample_ba_hidden(n, s)) {
        ASSERT_GE(x, 1.0 / std::sqrt(nn) - 1e-15);
        ASSERT_LE(x, 1.0);
        sum += x * x;
        ++count;
      }
    }
    EXPECT_NEAR(sum / static_cast<double>(count), std::log(nn) / nn, 0.02 * std::log(nn) / nn) << "n=" << n;
  }
}
