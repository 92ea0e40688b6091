#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hplc/randgraph.hpp"
#include "hplc/spectral.hpp"

using namespace hplc;

namespace {

Graph path(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph::from_edges(n, e);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

Matrix reconstruct(const EigenResult& e) {
  const std::size_t n = e.values.size();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) r(i, j) += e.vectors(i, k) * e.values[k] * e.vectors(j, k);
  return r;
}

double orthonormality_error(const Matrix& v) {
  const std::size_t n = v.size();
  double m = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double dot = 0;
      for (std::size_t i = 0; i < n; ++i) dot += v(i, a) * v(i, b);
      m = std::max(m, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  return m;
}

Matrix random_symmetric(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m(i, j) = m(j, i) = 2.0 * uniform_real(rng) - 1.0;
  return m;
}

// Roots of the characteristic polynomial, ascending.
std::vector<double> charpoly_2x2(const Matrix& a) {
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4 - det));
  return {tr / 2 - disc, tr / 2 + disc};
}

// Trigonometric solution of the symmetric 3x3 cubic.
std::vector<double> charpoly_3x3(const Matrix& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) + (a(2, 2) - q) * (a(2, 2) - q) +
                    2 * p1;
  const double p = std::sqrt(p2 / 6);
  Matrix b(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  const double det_b = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                       b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                       b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(det_b / 2, -1.0, 1.0);
  const double phi = std::acos(r) / 3;
  const double e1 = q + 2 * p * std::cos(phi);
  const double e3 = q + 2 * p * std::cos(phi + 2 * std::numbers::pi / 3);
  const double e2 = 3 * q - e1 - e3;
  std::vector<double> out{e1, e2, e3};
  std::sort(out.begin(), out.end());
  return out;
}

Partition clusters(std::vector<std::uint32_t> c, std::size_t k) {
  Partition p;
  p.cluster = std::move(c);
  p.sizes.assign(k, 0);
  for (auto x : p.cluster) ++p.sizes[x];
  return p;
}

}  // namespace

TEST(LandmarkGraph, HeatKernelWeight) {
  const std::vector<NodeId> lm{0, 2};
  const auto lg = build_landmark_graph(distance_vectors(path(3), lm), 4.0);
  EXPECT_NEAR(lg.weights(0, 1), 0.36787944117144233, 1e-15);
  EXPECT_EQ(lg.weights(0, 1), lg.weights(1, 0));
  EXPECT_EQ(lg.weights(0, 0), 0.0);
  EXPECT_FALSE(lg.t_auto);
}

TEST(LandmarkGraph, AutoTemperatureIsMedianOfSquares) {
  const std::vector<NodeId> lm{0, 1, 3};  // pairwise distances 1, 3, 2
  const auto lg = build_landmark_graph(distance_vectors(path(4), lm));
  EXPECT_TRUE(lg.t_auto);
  EXPECT_DOUBLE_EQ(lg.t, 4.0);
}

TEST(LandmarkGraph, EqualDistancesGiveEqualWeights) {
  std::vector<Edge> e;
  for (NodeId i = 1; i <= 4; ++i) e.emplace_back(0, i);
  const std::vector<NodeId> lm{1, 2, 3, 4};
  const auto lg = build_landmark_graph(distance_vectors(Graph::from_edges(5, e), lm));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      EXPECT_EQ(lg.weights(i, j), lg.weights(0, 1));
    }
}

TEST(LandmarkGraph, UnreachablePairsUseSentinelAndStayPositive) {
  const std::vector<Edge> e{{0, 1}, {2, 3}};
  const std::vector<NodeId> lm{0, 1, 2};
  const auto lg = build_landmark_graph(distance_vectors(Graph::from_edges(4, e), lm), 1e-3);
  EXPECT_EQ(lg.weights(0, 2), kMinLandmarkWeight);
  EXPECT_NO_THROW(normalized_laplacian(lg));
}

TEST(LandmarkGraph, Errors) {
  const std::vector<NodeId> one{0};
  EXPECT_THROW(build_landmark_graph(distance_vectors(path(3), one)), std::invalid_argument);
  const std::vector<NodeId> dup{1, 1};
  EXPECT_THROW(build_landmark_graph(distance_vectors(path(3), dup)), std::invalid_argument);
  const std::vector<NodeId> two{0, 2};
  EXPECT_THROW(build_landmark_graph(distance_vectors(path(3), two), 0.0), std::invalid_argument);
}

TEST(Laplacian, TwoNodesAnyWeight) {
  for (double w : {1e-9, 0.3, 1.0}) {
    Matrix m(2);
    m(0, 1) = m(1, 0) = w;
    const auto l = normalized_laplacian(m);
    EXPECT_NEAR(l(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(l(0, 1), -1.0, 1e-15);
    EXPECT_NEAR(l(1, 1), 1.0, 1e-15);
  }
}

TEST(Laplacian, EqualWeightTriangleSpectrum) {
  Matrix m(3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) m(i, i) = 0;
  const auto e = eigendecompose(normalized_laplacian(m));
  EXPECT_NEAR(e.values[0], 0.0, 1e-12);
  EXPECT_NEAR(e.values[1], 1.5, 1e-12);
  EXPECT_NEAR(e.values[2], 1.5, 1e-12);
  EXPECT_TRUE(e.repeated);
}

TEST(Laplacian, SymmetricUnitDiagonal) {
  const auto g = gen_er(300, 4.0, 3);
  const std::vector<NodeId> lm{0, 10, 50, 99, 150, 220, 299};
  const auto l = normalized_laplacian(build_landmark_graph(distance_vectors(g, lm)));
  EXPECT_TRUE(l.is_symmetric());
  for (std::size_t i = 0; i < l.size(); ++i) EXPECT_NEAR(l(i, i), 1.0, 1e-15);
  EXPECT_THROW(normalized_laplacian(Matrix(3)), std::domain_error);
}

TEST(Jacobi, Identity) {
  const auto e = eigendecompose(Matrix::identity(4));
  for (double v : e.values) EXPECT_EQ(v, 1.0);
  EXPECT_EQ(max_abs_diff(e.vectors, Matrix::identity(4)), 0.0);
}

TEST(Jacobi, TwoByTwoByHand) {
  Matrix l(2);
  l(0, 0) = l(1, 1) = 1;
  l(0, 1) = l(1, 0) = -1;
  const auto e = eigendecompose(l);
  EXPECT_NEAR(e.values[0], 0.0, 1e-15);
  EXPECT_NEAR(e.values[1], 2.0, 1e-15);
  const double r = std::numbers::sqrt2 / 2;
  EXPECT_NEAR(e.vectors(0, 0), r, 1e-15);
  EXPECT_NEAR(e.vectors(1, 0), r, 1e-15);
  EXPECT_NEAR(e.vectors(0, 1), r, 1e-15);
  EXPECT_NEAR(e.vectors(1, 1), -r, 1e-15);
}

TEST(Jacobi, MatchesCharacteristicPolynomial) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto a2 = random_symmetric(2, seed);
    const auto e2 = eigendecompose(a2);
    const auto c2 = charpoly_2x2(a2);
    for (std::size_t i = 0; i < 2; ++i) ASSERT_NEAR(e2.values[i], c2[i], 1e-10);
    const auto a3 = random_symmetric(3, seed + 1000);
    const auto e3 = eigendecompose(a3);
    const auto c3 = charpoly_3x3(a3);
    for (std::size_t i = 0; i < 3; ++i) ASSERT_NEAR(e3.values[i], c3[i], 1e-10) << "seed " << seed;
  }
}

TEST(Jacobi, RandomReconstructionAndOrthonormality) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = random_symmetric(8, seed);
    const auto e = eigendecompose(a);
    EXPECT_TRUE(e.converged);
    EXPECT_LT(max_abs_diff(reconstruct(e), a), 1e-8);
    EXPECT_LT(orthonormality_error(e.vectors), 1e-8);
    EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
  }
}

TEST(Jacobi, RejectsAsymmetric) {
  Matrix a(2);
  a(0, 1) = 1;
  EXPECT_THROW(eigendecompose(a), std::invalid_argument);
}

TEST(Jacobi, CanonicalSigns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = eigendecompose(random_symmetric(6, seed));
    for (std::size_t j = 0; j < 6; ++j) {
      std::size_t arg = 0;
      for (std::size_t i = 1; i < 6; ++i)
        if (std::abs(e.vectors(i, j)) > std::abs(e.vectors(arg, j)) + 1e-12) arg = i;
      EXPECT_GT(e.vectors(arg, j), 0.0);
    }
  }
}

TEST(Spectrum, LandmarkLaplaciansWithinBounds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = seed % 2 ? gen_ba(500, 3, seed) : gen_er(500, 3.0, seed);
    const auto p = fluidc_multi(g, 4 + seed % 12, seed);
    const auto prof = distance_vectors(g, select_landmarks(g, p));
    const auto enc = encode_landmarks(build_landmark_graph(prof), {.seed = seed});
    const auto& ev = enc.eigen.values;
    EXPECT_GE(ev.front(), -1e-9);
    EXPECT_LE(ev.front(), 1e-9);
    EXPECT_LE(ev.back(), 2.0 + 1e-9);
    EXPECT_LT(max_abs_diff(reconstruct(enc.eigen), enc.laplacian), 1e-8);
    EXPECT_LT(orthonormality_error(enc.eigen.vectors), 1e-8);
  }
}

TEST(Spectrum, RepeatedEigenvaluesArePerturbedApart) {
  Matrix m(3, 0.5);
  for (std::size_t i = 0; i < 3; ++i) m(i, i) = 0;
  LandmarkGraph lg{m, 1.0, false};
  const auto enc = encode_landmarks(lg, {.seed = 5});
  EXPECT_GE(enc.perturb_rounds, 1u);
  EXPECT_FALSE(enc.repeated_eigenvalues);
  EXPECT_GE(min_gap(enc.eigen.values), 1e-8);
  EXPECT_TRUE(enc.graph.weights.is_symmetric());
  // Deterministic under the seed.
  EXPECT_EQ(encode_landmarks(lg, {.seed = 5}).eigen.values, enc.eigen.values);
}

TEST(Membership, TwoClusterExample) {
  Matrix w(2);
  w(0, 1) = w(1, 0) = 0.7;
  const auto eig = eigendecompose(normalized_laplacian(w));
  const auto p = clusters({0, 0, 0, 1, 1, 1}, 2);
  const auto mv = assign_memberships(eig, p);
  const double r = std::numbers::sqrt2 / 2;
  EXPECT_NEAR(mv.row(0)[0], r, 1e-12);
  EXPECT_NEAR(mv.row(0)[1], r, 1e-12);
  EXPECT_NEAR(mv.row(3)[0], r, 1e-12);
  EXPECT_NEAR(mv.row(3)[1], -r, 1e-12);
}

TEST(Membership, SharedWithinClusterAndDeterministicFlips) {
  const auto eig = eigendecompose(random_symmetric(3, 1));
  const auto p = clusters({0, 1, 2, 0, 1, 2, 0}, 3);
  const auto mv = assign_memberships(eig, p, 77);
  for (NodeId v = 0; v < 7; ++v) {
    const auto a = mv.row(v), b = mv.row(p.cluster[v]);
    EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
  }
  EXPECT_EQ(assign_memberships(eig, p, 77).values, mv.values);
  EXPECT_THROW(assign_memberships(eig, clusters({0, 1, 0}, 2)), std::invalid_argument);
}

TEST(Membership, DotProductsInvariantUnderFlips) {
  const auto eig = eigendecompose(random_symmetric(5, 9));
  const auto p = clusters({0, 1, 2, 3, 4}, 5);
  const auto base = assign_memberships(eig, p);
  bool any_flip = false;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto f = assign_memberships(eig, p, s);
    any_flip = any_flip || std::count(f.signs.begin(), f.signs.end(), -1) > 0;
    for (NodeId u = 0; u < 5; ++u)
      for (NodeId v = 0; v < 5; ++v) {
        double d0 = 0, d1 = 0;
        for (std::size_t j = 0; j < 5; ++j) {
          d0 += base.row(u)[j] * base.row(v)[j];
          d1 += f.row(u)[j] * f.row(v)[j];
        }
        EXPECT_NEAR(d0, d1, 1e-12);
      }
  }
  EXPECT_TRUE(any_flip);
}
