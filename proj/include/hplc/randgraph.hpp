#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace hplc {

namespace detail {

// Number of failures before the next success of a Bernoulli(p) sequence,
// for 0 < p < 1.
inline std::uint64_t geometric_skip(Rng& rng, double log_q) {
  const double u = 1.0 - uniform_real(rng);  // (0, 1]
  const double skip = std::floor(std::log(u) / log_q);
  return skip >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max() : static_cast<std::uint64_t>(skip);
}

}  // namespace detail

/// Erdős–Rényi graph: every unordered pair independently with p = k_avg / n.
/// Pairs are walked with geometric skips, so the cost is O(n + edges).
inline Graph gen_er(std::size_t n, double k_avg, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("gen_er: n must be at least 2");
  if (!(k_avg > 0.0) || !(k_avg < static_cast<double>(n))) throw std::invalid_argument("gen_er: need 0 < k_avg < n");
  const double p = k_avg / static_cast<double>(n);
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(p * n * (n - 1) / 2 * 1.1) + 16);
  const double log_q = std::log1p(-p);
  // Batagelj–Brandes walk over pairs (v, w), w < v.
  std::uint64_t v = 1;
  std::int64_t w = -1;
  while (v < n) {
    const auto skip = detail::geometric_skip(rng, log_q);
    if (skip >= n * n) break;
    w += 1 + static_cast<std::int64_t>(skip);
    while (w >= static_cast<std::int64_t>(v) && v < n) {
      w -= static_cast<std::int64_t>(v);
      ++v;
    }
    if (v < n) edges.emplace_back(static_cast<NodeId>(w), static_cast<NodeId>(v));
  }
  return Graph::from_edges(n, edges);
}

/// Barabási–Albert graph. The seed is the complete graph on m nodes; each
/// later node attaches to m distinct existing nodes chosen proportionally to
/// degree (uniform draws from the list of edge endpoints, duplicates
/// redrawn). Node index equals arrival order.
inline Graph gen_ba(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (m < 1 || m >= n) throw std::invalid_argument("gen_ba: need 1 <= m < n");
  Rng rng(seed);
  std::vector<Edge> edges;
  edges.reserve(m * (m - 1) / 2 + m * (n - m));
  std::vector<NodeId> endpoints;
  endpoints.reserve(2 * edges.capacity());
  for (NodeId i = 0; i < m; ++i)
    for (NodeId j = i + 1; j < m; ++j) {
      edges.emplace_back(i, j);
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  std::vector<NodeId> targets;
  std::vector<bool> chosen(n, false);
  for (auto t = static_cast<NodeId>(m); t < n; ++t) {
    targets.clear();
    while (targets.size() < m) {
      // A K_1 seed has no endpoints yet; fall back to a uniform pick.
      const NodeId cand = endpoints.empty() ? static_cast<NodeId>(uniform_index(rng, t))
                                            : endpoints[uniform_index(rng, endpoints.size())];
      if (chosen[cand]) continue;
      chosen[cand] = true;
      targets.push_back(cand);
    }
    for (NodeId x : targets) {
      chosen[x] = false;
      edges.emplace_back(x, t);
      endpoints.push_back(x);
      endpoints.push_back(t);
    }
  }
  return Graph::from_edges(n, edges);
}

/// Hidden-variable graph: pair (i, j) is an edge with probability
/// min(1, h_i h_j / beta). Uses the sorted-weight skipping scheme of Miller
/// and Hagberg, exact and O(n log n + edges).
inline Graph gen_hidden(std::span<const double> h, double beta, std::uint64_t seed) {
  const std::size_t n = h.size();
  if (n < 2) throw std::invalid_argument("gen_hidden: need at least 2 nodes");
  if (!(beta > 0.0)) throw std::invalid_argument("gen_hidden: beta must be positive");
  for (double x : h)
    if (!(x > 0.0)) throw std::invalid_argument("gen_hidden: hidden variables must be positive");

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) { return h[a] > h[b]; });

  Rng rng(seed);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a + 1 < n; ++a) {
    const double hu = h[order[a]];
    std::size_t b = a + 1;
    double p = std::min(1.0, hu * h[order[b]] / beta);
    while (b < n && p > 0.0) {
      if (p < 1.0) {
        const double r = 1.0 - uniform_real(rng);
        const double skip = std::floor(std::log(r) / std::log1p(-p));
        if (skip >= static_cast<double>(n - b)) break;
        b += static_cast<std::size_t>(skip);
      }
      if (b >= n) break;
      const double q = std::min(1.0, hu * h[order[b]] / beta);
      // Candidate drawn at rate p; accept with q / p since weights only fall.
      if (uniform_real(rng) < q / p) edges.emplace_back(order[a], order[b]);
      p = q;
      ++b;
    }
  }
  return Graph::from_edges(n, edges);
}

/// Draws n hidden variables from ρ(h) ∝ h^{-3} on [1/√n, 1] (the BA tag
/// density) by inverse CDF, normalized over the interval.
inline std::vector<double> sample_ba_hidden(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("sample_ba_hidden: n must be at least 2");
  Rng rng(seed);
  const double nn = static_cast<double>(n);
  std::vector<double> h(n);
  for (auto& x : h) {
    const double u = uniform_real(rng);
    x = 1.0 / std::sqrt(nn - u * (nn - 1.0));
  }
  return h;
}

}  // namespace hplc
