#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "clustering.hpp"
#include "landmarks.hpp"
#include "rng.hpp"

namespace hplc {

/// Small dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  bool is_symmetric(double tol = 1e-12) const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > tol * std::max(1.0, std::abs((*this)(i, j)))) return false;
    return true;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

// Heat-kernel weights never drop below this, so every landmark keeps a
// positive weighted degree even when exp() underflows.
inline constexpr double kMinLandmarkWeight = 1e-300;

struct LandmarkGraph {
  Matrix weights;  // symmetric, zero diagonal, entries in (0, 1]
  double t = 1.0;
  bool t_auto = false;
};

/// Heat-kernel landmark graph: w_uv = exp(-d(λ_u, λ_v)^2 / T). With no `t`,
/// T is the median of the squared finite inter-landmark distances (at
/// least 1). Unreachable pairs use the profile's sentinel distance.
inline LandmarkGraph build_landmark_graph(const LandmarkProfile& prof, std::optional<double> t = std::nullopt) {
  const std::size_t k = prof.k();
  if (k < 2) throw std::invalid_argument("landmark graph needs at least 2 landmarks");
  if (!prof.complete()) throw std::invalid_argument("landmark profile has no distance vectors");
  if (t && !(*t > 0.0)) throw std::invalid_argument("heat parameter T must be positive");

  Matrix dist(k);
  std::vector<double> finite_sq;
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = u + 1; v < k; ++v) {
      const Hop d = std::min(prof.at(prof.landmarks[u], v), prof.at(prof.landmarks[v], u));
      if (d == 0) throw std::invalid_argument("duplicate landmark");
      dist(u, v) = dist(v, u) = d;
      if (d != prof.sentinel) finite_sq.push_back(static_cast<double>(d) * d);
    }

  LandmarkGraph lg;
  lg.t_auto = !t.has_value();
  if (t) {
    lg.t = *t;
  } else if (finite_sq.empty()) {
    lg.t = 1.0;
  } else {
    std::sort(finite_sq.begin(), finite_sq.end());
    const std::size_t m = finite_sq.size();
    const double median = m % 2 ? finite_sq[m / 2] : 0.5 * (finite_sq[m / 2 - 1] + finite_sq[m / 2]);
    lg.t = std::max(1.0, median);
  }
  lg.weights = Matrix(k);
  for (std::size_t u = 0; u < k; ++u)
    for (std::size_t v = 0; v < k; ++v)
      if (u != v) lg.weights(u, v) = std::max(kMinLandmarkWeight, std::exp(-dist(u, v) * dist(u, v) / lg.t));
  return lg;
}

/// L = I - Δ^{-1/2} W Δ^{-1/2} with Δ_ii = Σ_j W_ij.
inline Matrix normalized_laplacian(const Matrix& w) {
  const std::size_t k = w.size();
  std::vector<double> inv_sqrt(k);
  for (std::size_t i = 0; i < k; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < k; ++j) deg += w(i, j);
    if (!(deg > 0.0)) throw std::domain_error("landmark " + std::to_string(i) + " has zero weighted degree");
    inv_sqrt[i] = 1.0 / std::sqrt(deg);
  }
  Matrix l(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) l(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt[i] * w(i, j) * inv_sqrt[j];
  return l;
}

inline Matrix normalized_laplacian(const LandmarkGraph& lg) { return normalized_laplacian(lg.weights); }

struct EigenResult {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j pairs with values[j]
  std::size_t sweeps = 0;
  bool converged = false;
  bool repeated = false;  // some adjacent gap below the tolerance
};

struct EigenOptions {
  double gap_tol = 1e-8;
  double off_tol = 1e-12;
  std::size_t max_sweeps = 100;
};

inline double min_gap(const std::vector<double>& sorted) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < sorted.size(); ++i) gap = std::min(gap, sorted[i] - sorted[i - 1]);
  return gap;
}

/// Flips each column so its largest-magnitude entry is positive (first such
/// entry when several tie).
inline void canonicalize_signs(Matrix& v) {
  const std::size_t k = v.size();
  for (std::size_t j = 0; j < k; ++j) {
    double max_abs = 0.0;
    for (std::size_t i = 0; i < k; ++i) max_abs = std::max(max_abs, std::abs(v(i, j)));
    for (std::size_t i = 0; i < k; ++i) {
      if (std::abs(v(i, j)) >= max_abs - 1e-12) {
        if (v(i, j) < 0)
          for (std::size_t r = 0; r < k; ++r) v(r, j) = -v(r, j);
        break;
      }
    }
  }
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
inline EigenResult eigendecompose(const Matrix& input, const EigenOptions& opts = {}) {
  if (!input.is_symmetric()) throw std::invalid_argument("eigendecompose: matrix is not symmetric");
  const std::size_t n = input.size();
  Matrix a = input;
  Matrix v = Matrix::identity(n);
  EigenResult res;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a(i, j) * a(i, j);
    return std::sqrt(2.0 * s);
  };

  while (true) {
    if (off_norm() < opts.off_tol) {
      res.converged = true;
      break;
    }
    if (res.sweeps == opts.max_sweeps) break;
    ++res.sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle from the stable tan formula.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });
  res.values.resize(n);
  res.vectors = Matrix(n);
  for (std::size_t j = 0; j < n; ++j) {
    res.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) res.vectors(i, j) = v(i, order[j]);
  }
  canonicalize_signs(res.vectors);
  res.repeated = min_gap(res.values) < opts.gap_tol;
  return res;
}

struct SpectralOptions {
  double gap_tol = 1e-8;
  double perturb_scale = 1e-6;
  std::size_t max_perturb_rounds = 3;
  std::uint64_t seed = 0;
};

struct SpectralEncoding {
  LandmarkGraph graph;  // as finally decomposed (perturbed if rounds > 0)
  Matrix laplacian;
  EigenResult eigen;
  std::size_t perturb_rounds = 0;
  bool repeated_eigenvalues = false;  // still repeated after the last permitted round
};

/// Laplacian spectrum of the landmark graph. Repeated eigenvalues make the
/// eigenvectors ill-defined, so when a gap falls below gap_tol the
/// off-diagonal weights get symmetric uniform noise of magnitude
/// perturb_scale * max weight and the decomposition is redone.
inline SpectralEncoding encode_landmarks(const LandmarkGraph& lg, const SpectralOptions& opts = {}) {
  SpectralEncoding enc;
  enc.graph = lg;
  Rng rng(derive_seed(opts.seed, "spectral-perturb"));
  const EigenOptions eo{opts.gap_tol};
  while (true) {
    enc.laplacian = normalized_laplacian(enc.graph);
    enc.eigen = eigendecompose(enc.laplacian, eo);
    if (!enc.eigen.repeated) break;
    if (enc.perturb_rounds == opts.max_perturb_rounds) {
      enc.repeated_eigenvalues = true;
      break;
    }
    ++enc.perturb_rounds;
    auto& w = enc.graph.weights;
    const std::size_t k = w.size();
    double max_w = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) max_w = std::max(max_w, w(i, j));
    const double scale = opts.perturb_scale * max_w;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j) {
        const double noise = (2.0 * uniform_real(rng) - 1.0) * scale;
        w(i, j) = w(j, i) = std::max(kMinLandmarkWeight, w(i, j) + noise);
      }
  }
  return enc;
}

/// Per-node membership vectors: node v in cluster k gets row k of the
/// eigenvector matrix (landmark k's coordinates over all eigenvectors).
struct MembershipVectors {
  std::size_t k = 0;
  std::vector<double> values;  // N x K row-major
  std::vector<int> signs;      // applied column signs (all +1 without flipping)

  std::span<const double> row(NodeId v) const { return {values.data() + std::size_t{v} * k, k}; }
};

/// With `flip_seed`, every eigenvector column is multiplied by an
/// independent fair ±1 before rows are handed out.
inline MembershipVectors assign_memberships(const EigenResult& eig, const Partition& p,
                                            std::optional<std::uint64_t> flip_seed = std::nullopt) {
  const std::size_t k = eig.values.size();
  if (p.k() != k)
    throw std::invalid_argument("partition has " + std::to_string(p.k()) + " clusters but spectrum has " +
                                std::to_string(k) + " eigenvectors");
  MembershipVectors mv;
  mv.k = k;
  mv.signs.assign(k, 1);
  if (flip_seed) {
    Rng rng(derive_seed(*flip_seed, "sign-flip"));
    for (auto& s : mv.signs) s = coin_flip(rng) ? -1 : 1;
  }
  mv.values.resize(p.cluster.size() * k);
  for (NodeId v = 0; v < p.cluster.size(); ++v) {
    const auto c = p.cluster[v];
    for (std::size_t j = 0; j < k; ++j) mv.values[std::size_t{v} * k + j] = mv.signs[j] * eig.vectors(c, j);
  }
  return mv;
}

}  // namespace hplc
