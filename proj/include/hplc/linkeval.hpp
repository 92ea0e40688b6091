#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "graph.hpp"
#include "landmarks.hpp"
#include "rng.hpp"

namespace hplc {

enum class Label : std::uint8_t { neg = 0, pos = 1 };

struct ScoredPair {
  NodeId u = 0;
  NodeId v = 0;
  double score = 0;
  Label label = Label::neg;
};

using ScoredPairs = std::vector<ScoredPair>;

struct EvalSplit {
  std::array<double, 3> ratios{70, 10, 20};  // train / valid / test, percent
  std::uint64_t seed = 0;
  std::vector<Edge> train, valid, test;
  std::vector<Edge> train_neg, valid_neg, test_neg;
  Graph train_graph;  // full node set, training positives only
};

namespace detail {

inline std::uint64_t pair_key(NodeId u, NodeId v) {
  if (u > v) std::swap(u, v);
  return std::uint64_t{u} << 32 | v;
}

}  // namespace detail

/// Uniform non-edges of `g`, distinct from each other and from `exclude`.
inline std::vector<Edge> sample_non_edges(const Graph& g, std::size_t count, Rng& rng,
                                          std::unordered_set<std::uint64_t>& exclude) {
  const std::uint64_t n = g.node_count();
  const std::uint64_t total = n * (n - 1) / 2 - g.edge_count();
  if (count + exclude.size() > total)
    throw std::invalid_argument("graph too dense: " + std::to_string(count) + " negatives requested, only " +
                                std::to_string(total - std::min<std::uint64_t>(total, exclude.size())) +
                                " non-edges available");
  std::vector<Edge> out;
  out.reserve(count);
  if (2 * (count + exclude.size()) > total) {
    // Dense regime: enumerate what is left and take a random subset.
    std::vector<Edge> all;
    for (NodeId u = 0; u < n; ++u)
      for (NodeId v = u + 1; v < n; ++v)
        if (!g.has_edge(u, v) && !exclude.count(detail::pair_key(u, v))) all.emplace_back(u, v);
    for (std::size_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::size_t>(uniform_index(rng, all.size() - i));
      std::swap(all[i], all[j]);
      out.push_back(all[i]);
      exclude.insert(detail::pair_key(all[i].first, all[i].second));
    }
    return out;
  }
  while (out.size() < count) {
    auto u = static_cast<NodeId>(uniform_index(rng, n));
    auto v = static_cast<NodeId>(uniform_index(rng, n));
    if (u == v || g.has_edge(u, v)) continue;
    if (u > v) std::swap(u, v);
    if (!exclude.insert(detail::pair_key(u, v)).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

/// Random edge split with 1:1 negatives per split. Ratios are percentages
/// that must sum to 100; valid/test counts are rounded, train takes the rest.
inline EvalSplit split_edges(const Graph& g, std::array<double, 3> ratios, std::uint64_t seed) {
  for (double r : ratios)
    if (!(r >= 0)) throw std::invalid_argument("split ratios must be non-negative");
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 100.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 100");
  EvalSplit s;
  s.ratios = ratios;
  s.seed = seed;
  auto edges = g.edges();
  Rng rng(derive_seed(seed, "split"));
  shuffle(std::span(edges), rng);
  const auto m = static_cast<double>(edges.size());
  const auto n_valid = static_cast<std::size_t>(std::llround(m * ratios[1] / 100.0));
  const auto n_test = std::min(edges.size() - n_valid, static_cast<std::size_t>(std::llround(m * ratios[2] / 100.0)));
  s.valid.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_valid));
  s.test.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_valid),
                edges.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test));
  s.train.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_valid + n_test), edges.end());
  for (auto* part : {&s.train, &s.valid, &s.test}) std::sort(part->begin(), part->end());

  Rng neg_rng(derive_seed(seed, "negatives"));
  std::unordered_set<std::uint64_t> used;
  s.train_neg = sample_non_edges(g, s.train.size(), neg_rng, used);
  s.valid_neg = sample_non_edges(g, s.valid.size(), neg_rng, used);
  s.test_neg = sample_non_edges(g, s.test.size(), neg_rng, used);
  s.train_graph = Graph::from_edges(g.node_count(), s.train);
  return s;
}

/// Positives and negatives as unscored pairs, positives first.
inline ScoredPairs make_pairs(std::span<const Edge> pos, std::span<const Edge> neg) {
  ScoredPairs out;
  out.reserve(pos.size() + neg.size());
  for (auto [u, v] : pos) out.push_back({u, v, 0.0, Label::pos});
  for (auto [u, v] : neg) out.push_back({u, v, 0.0, Label::neg});
  return out;
}

namespace detail {

template <typename F>
void for_common_neighbors(const Graph& g, NodeId u, NodeId v, F&& f) {
  auto a = g.neighbors(u), b = g.neighbors(v);
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      f(*i);
      ++i;
      ++j;
    }
  }
}

}  // namespace detail

/// Σ over common neighbors w of 1 / ln deg(w). A common neighbor always has
/// degree >= 2, so the logarithm is positive.
inline ScoredPairs score_adamic_adar(const Graph& train, ScoredPairs pairs) {
  for (auto& p : pairs) {
    double s = 0.0;
    detail::for_common_neighbors(train, p.u, p.v,
                                 [&](NodeId w) { s += 1.0 / std::log(static_cast<double>(train.degree(w))); });
    p.score = s;
  }
  return pairs;
}

inline ScoredPairs score_common_neighbors(const Graph& train, ScoredPairs pairs) {
  for (auto& p : pairs) {
    std::size_t c = 0;
    detail::for_common_neighbors(train, p.u, p.v, [&](NodeId) { ++c; });
    p.score = static_cast<double>(c);
  }
  return pairs;
}

/// Negated shortest landmark detour; pairs with no common reachable
/// landmark score -2 * sentinel.
inline ScoredPairs score_detour(const LandmarkProfile& prof, ScoredPairs pairs) {
  if (!prof.complete()) throw std::invalid_argument("score_detour needs a profile with distance vectors");
  for (auto& p : pairs) {
    const Hop d = min_detour(prof, p.u, p.v);
    p.score = d == kUnreachable ? -2.0 * prof.sentinel : -static_cast<double>(d);
  }
  return pairs;
}

namespace detail {

inline void require_both_labels(std::span<const ScoredPair> sp) {
  bool pos = false, neg = false;
  for (const auto& p : sp) {
    if (!std::isfinite(p.score)) throw std::invalid_argument("non-finite score");
    (p.label == Label::pos ? pos : neg) = true;
  }
  if (!pos || !neg) throw std::invalid_argument("metric needs both positive and negative pairs");
}

}  // namespace detail

/// P(score_pos > score_neg), ties counting one half, via mid-ranks.
inline double metric_auc(std::span<const ScoredPair> sp) {
  detail::require_both_labels(sp);
  std::vector<std::pair<double, Label>> v;
  v.reserve(sp.size());
  for (const auto& p : sp) v.emplace_back(p.score, p.label);
  std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double rank_sum = 0.0, n_pos = 0.0;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j].first == v[i].first) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t t = i; t < j; ++t)
      if (v[t].second == Label::pos) {
        rank_sum += mid;
        n_pos += 1.0;
      }
    i = j;
  }
  const double n_neg = static_cast<double>(v.size()) - n_pos;
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

/// Fraction of positives scored strictly above the k-th highest negative.
inline double metric_hits_at_k(std::span<const ScoredPair> sp, std::size_t k) {
  detail::require_both_labels(sp);
  if (k == 0) throw std::invalid_argument("hits@k needs k >= 1");
  std::vector<double> neg;
  for (const auto& p : sp)
    if (p.label == Label::neg) neg.push_back(p.score);
  if (neg.size() < k)
    throw std::invalid_argument("hits@" + std::to_string(k) + " needs at least " + std::to_string(k) +
                                " negatives, have " + std::to_string(neg.size()));
  std::nth_element(neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(k - 1), neg.end(), std::greater<>());
  const double threshold = neg[k - 1];
  double hits = 0, pos = 0;
  for (const auto& p : sp)
    if (p.label == Label::pos) {
      pos += 1;
      hits += p.score > threshold ? 1 : 0;
    }
  return hits / pos;
}

/// Mean reciprocal rank. Positive i (in list order) is ranked against
/// negatives [i*n, (i+1)*n) (in list order); equal scores rank the positive
/// after the negatives.
inline double metric_mrr(std::span<const ScoredPair> sp, std::size_t negatives_per_positive) {
  detail::require_both_labels(sp);
  if (negatives_per_positive == 0) throw std::invalid_argument("mrr needs at least one negative per positive");
  std::vector<double> pos, neg;
  for (const auto& p : sp) (p.label == Label::pos ? pos : neg).push_back(p.score);
  if (neg.size() < pos.size() * negatives_per_positive)
    throw std::invalid_argument("mrr: " + std::to_string(pos.size()) + " positives need " +
                                std::to_string(pos.size() * negatives_per_positive) + " negatives, have " +
                                std::to_string(neg.size()));
  double total = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    std::size_t rank = 1;
    for (std::size_t j = 0; j < negatives_per_positive; ++j)
      if (neg[i * negatives_per_positive + j] >= pos[i]) ++rank;
    total += 1.0 / static_cast<double>(rank);
  }
  return total / static_cast<double>(pos.size());
}

/// Per-positive negatives for MRR: for each (u, v), `count` nodes w with
/// (u, w) a non-edge of `g`, w not in {u, v}, distinct per positive.
/// `count` is lowered to what every positive can supply.
inline ScoredPairs make_ranking_pairs(const Graph& g, std::span<const Edge> pos, std::size_t count,
                                      std::uint64_t seed, std::size_t* used_count = nullptr) {
  const std::size_t n = g.node_count();
  for (auto [u, v] : pos) count = std::min(count, n - 1 - g.degree(u) - (g.has_edge(u, v) ? 0 : 1));
  if (count == 0) throw std::invalid_argument("no negatives available for ranking");
  if (used_count) *used_count = count;
  Rng rng(derive_seed(seed, "ranking-negatives"));
  ScoredPairs out;
  for (auto [u, v] : pos) out.push_back({u, v, 0.0, Label::pos});
  std::unordered_set<NodeId> taken;
  for (auto [u, v] : pos) {
    taken.clear();
    std::size_t got = 0;
    const bool dense = 2 * count > n - 1 - g.degree(u);
    std::vector<NodeId> pool;
    if (dense) {
      for (NodeId w = 0; w < n; ++w)
        if (w != u && w != v && !g.has_edge(u, w)) pool.push_back(w);
      for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
        out.push_back({u, pool[i], 0.0, Label::neg});
      }
      continue;
    }
    while (got < count) {
      const auto w = static_cast<NodeId>(uniform_index(rng, n));
      if (w == u || w == v || g.has_edge(u, w) || !taken.insert(w).second) continue;
      out.push_back({u, w, 0.0, Label::neg});
      ++got;
    }
  }
  return out;
}

inline void write_scored_pairs_csv(std::ostream& os, const Graph& g, std::span<const ScoredPair> sp) {
  os << "u,v,score,label\n";
  char buf[32];
  for (const auto& p : sp) {
    std::snprintf(buf, sizeof buf, "%.17g", p.score);
    os << g.label(p.u) << ',' << g.label(p.v) << ',' << buf << ',' << (p.label == Label::pos ? "pos" : "neg") << '\n';
  }
}

}  // namespace hplc
