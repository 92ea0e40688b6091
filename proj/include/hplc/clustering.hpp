#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace hplc {

/// Node -> cluster assignment, optionally grouped into macro-clusters.
struct Partition {
  std::vector<std::uint32_t> cluster;  // per node
  std::vector<std::size_t> sizes;      // per cluster
  std::vector<std::uint32_t> macro;    // per cluster; empty when there is no second level
  std::size_t macro_count = 0;

  // Run diagnostics.
  std::size_t requested_k = 0;
  bool k_adjusted = false;  // effective K differs from the request (components, tiny subgraphs)
  bool converged = true;
  std::size_t iterations = 0;
  std::uint64_t candidate_evaluations = 0;

  std::size_t k() const noexcept { return sizes.size(); }
  bool has_macro() const noexcept { return !macro.empty(); }
  std::uint32_t macro_of_node(NodeId v) const { return macro.at(cluster.at(v)); }

  std::vector<std::vector<NodeId>> members() const {
    std::vector<std::vector<NodeId>> out(k());
    for (NodeId v = 0; v < cluster.size(); ++v) out[cluster[v]].push_back(v);
    return out;
  }
};

/// Throws std::logic_error unless `p` covers all n nodes with k non-empty
/// clusters and consistent sizes/macro ids.
inline void validate_partition(const Partition& p, std::size_t n) {
  if (p.cluster.size() != n) throw std::logic_error("partition does not cover every node");
  std::vector<std::size_t> counted(p.k(), 0);
  for (auto c : p.cluster) {
    if (c >= p.k()) throw std::logic_error("cluster id out of range");
    ++counted[c];
  }
  for (std::size_t c = 0; c < p.k(); ++c) {
    if (counted[c] == 0) throw std::logic_error("empty cluster " + std::to_string(c));
    if (counted[c] != p.sizes[c]) throw std::logic_error("cluster size mismatch");
  }
  if (p.has_macro()) {
    if (p.macro.size() != p.k()) throw std::logic_error("macro ids must be given per cluster");
    std::vector<bool> used(p.macro_count, false);
    for (auto m : p.macro) {
      if (m >= p.macro_count) throw std::logic_error("macro id out of range");
      used[m] = true;
    }
    for (bool u : used)
      if (!u) throw std::logic_error("empty macro-cluster");
  }
}

/// Fluid-communities clustering of a connected graph into exactly k clusters.
///
/// Each cluster starts from one random seed node. Nodes are then visited in a
/// freshly shuffled order every pass; node u moves to the cluster maximizing
/// |{u} ∪ N(u) ∩ C| / |C| over the clusters present in its closed
/// neighborhood. u stays put whenever its current cluster attains the
/// maximum, otherwise one maximizer is drawn uniformly. Moves that would
/// empty a cluster are refused. Stops after a pass without changes or after
/// max_iters passes.
inline Partition fluidc(const Graph& g, std::size_t k, std::uint64_t seed, std::size_t max_iters = 100) {
  const std::size_t n = g.node_count();
  if (k < 1) throw std::invalid_argument("fluidc: k must be at least 1");
  if (k > n) throw std::invalid_argument("fluidc: k=" + std::to_string(k) + " exceeds node count " + std::to_string(n));
  if (connected_components(g).count() != 1)
    throw std::invalid_argument("fluidc: graph is disconnected; use fluidc_multi");

  constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();
  Rng rng(seed);
  Partition p;
  p.requested_k = k;
  p.cluster.assign(n, kNone);
  p.sizes.assign(k, 1);

  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  shuffle(std::span(order), rng);
  for (std::uint32_t c = 0; c < k; ++c) p.cluster[order[c]] = c;
  std::size_t assigned = k;

  // Per-cluster scratch: slot[c] indexes into `cand` while c is a candidate.
  std::vector<std::uint32_t> slot(k, kNone);
  std::vector<std::pair<std::uint32_t, std::uint64_t>> cand;
  std::vector<std::uint32_t> best;

  p.converged = false;
  while (p.iterations < max_iters) {
    ++p.iterations;
    shuffle(std::span(order), rng);
    bool changed = false;
    for (NodeId u : order) {
      cand.clear();
      auto touch = [&](NodeId w) {
        const auto c = p.cluster[w];
        ++p.candidate_evaluations;
        if (c == kNone) return;
        if (slot[c] == kNone) {
          slot[c] = static_cast<std::uint32_t>(cand.size());
          cand.emplace_back(c, 0);
        }
        ++cand[slot[c]].second;
      };
      touch(u);
      for (NodeId w : g.neighbors(u)) touch(w);
      if (cand.empty()) continue;

      // Exact comparison of count/size ratios by cross-multiplication.
      best.clear();
      std::uint64_t best_count = 0, best_size = 1;
      for (auto [c, count] : cand) {
        const std::uint64_t size = p.sizes[c];
        const auto lhs = count * best_size, rhs = best_count * size;
        if (best.empty() || lhs > rhs) {
          best.assign(1, c);
          best_count = count;
          best_size = size;
        } else if (lhs == rhs) {
          best.push_back(c);
        }
      }
      for (auto [c, count] : cand) slot[c] = kNone;

      const auto current = p.cluster[u];
      if (current != kNone && std::find(best.begin(), best.end(), current) != best.end()) continue;
      if (current != kNone && p.sizes[current] == 1) continue;
      const auto target = best[uniform_index(rng, best.size())];
      if (current == kNone) {
        ++assigned;
      } else {
        --p.sizes[current];
      }
      p.cluster[u] = target;
      ++p.sizes[target];
      changed = true;
    }
    if (!changed && assigned == n) {
      p.converged = true;
      break;
    }
  }

  if (assigned < n) {
    // Out of passes before the fluid reached everything: hand the remaining
    // nodes to the cluster of their nearest assigned node.
    std::vector<NodeId> frontier;
    for (NodeId v = 0; v < n; ++v)
      if (p.cluster[v] != kNone) frontier.push_back(v);
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId u = frontier[head];
      for (NodeId w : g.neighbors(u)) {
        if (p.cluster[w] == kNone) {
          p.cluster[w] = p.cluster[u];
          ++p.sizes[p.cluster[u]];
          frontier.push_back(w);
        }
      }
    }
  }
  return p;
}

/// Cluster counts per component: proportional to size, at least one each,
/// never more than the component has nodes, summing to k when feasible.
inline std::vector<std::size_t> allocate_clusters(const std::vector<std::size_t>& sizes, std::size_t k) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  std::vector<std::size_t> alloc(sizes.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double share = static_cast<double>(k) * static_cast<double>(sizes[i]) / static_cast<double>(n);
    alloc[i] = std::clamp<std::size_t>(static_cast<std::size_t>(std::llround(share)), 1, sizes[i]);
    total += alloc[i];
  }
  while (total > k) {
    std::size_t pick = sizes.size();
    for (std::size_t i = 0; i < sizes.size(); ++i)
      if (alloc[i] > 1 && (pick == sizes.size() || sizes[i] > sizes[pick])) pick = i;
    if (pick == sizes.size()) break;
    --alloc[pick];
    --total;
  }
  while (total < k) {
    // Most nodes per cluster first.
    std::size_t pick = sizes.size();
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (alloc[i] >= sizes[i]) continue;
      if (pick == sizes.size() || sizes[i] * alloc[pick] > sizes[pick] * alloc[i]) pick = i;
    }
    if (pick == sizes.size()) break;
    ++alloc[pick];
    ++total;
  }
  return alloc;
}

/// fluidc over every connected component. When there are more components
/// than k, K is raised to the component count and k_adjusted is set.
inline Partition fluidc_multi(const Graph& g, std::size_t k, std::uint64_t seed, std::size_t max_iters = 100) {
  const std::size_t n = g.node_count();
  if (n == 0) throw std::invalid_argument("fluidc_multi: empty graph");
  const auto cm = connected_components(g);
  std::size_t effective = std::clamp<std::size_t>(k, cm.count(), n);

  Partition p;
  p.requested_k = k;
  p.k_adjusted = effective != k;
  if (cm.count() == 1) {
    auto single = fluidc(g, effective, derive_seed(seed, "fluidc-component", 0), max_iters);
    single.requested_k = k;
    single.k_adjusted = p.k_adjusted;
    return single;
  }

  const auto alloc = allocate_clusters(cm.sizes, effective);
  p.cluster.assign(n, 0);
  std::vector<std::vector<NodeId>> comp_nodes(cm.count());
  for (NodeId v = 0; v < n; ++v) comp_nodes[cm.component[v]].push_back(v);
  for (std::size_t c = 0; c < cm.count(); ++c) {
    const auto offset = static_cast<std::uint32_t>(p.sizes.size());
    if (alloc[c] == 1) {
      for (NodeId v : comp_nodes[c]) p.cluster[v] = offset;
      p.sizes.push_back(comp_nodes[c].size());
      continue;
    }
    const auto sub = induced_subgraph(g, comp_nodes[c]);
    const auto part = fluidc(sub.graph, alloc[c], derive_seed(seed, "fluidc-component", c), max_iters);
    for (NodeId local = 0; local < sub.to_parent.size(); ++local)
      p.cluster[sub.to_parent[local]] = offset + part.cluster[local];
    p.sizes.insert(p.sizes.end(), part.sizes.begin(), part.sizes.end());
    p.converged = p.converged && part.converged;
    p.iterations = std::max(p.iterations, part.iterations);
    p.candidate_evaluations += part.candidate_evaluations;
  }
  p.k_adjusted = p.k() != k;
  return p;
}

namespace detail {

/// Exactly k clusters on a possibly disconnected graph. With more components
/// than k, the k largest components become the clusters and the remaining
/// fragments join the first (largest) one.
inline Partition fluidc_exact_k(const Graph& g, std::size_t k, std::uint64_t seed, std::size_t max_iters) {
  const auto cm = connected_components(g);
  if (cm.count() <= k) return fluidc_multi(g, k, seed, max_iters);
  std::vector<std::uint32_t> order(cm.count());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cm.sizes[a] > cm.sizes[b]; });
  std::vector<std::uint32_t> cluster_of(cm.count(), 0);
  for (std::uint32_t i = 0; i < k; ++i) cluster_of[order[i]] = i;
  Partition p;
  p.requested_k = k;
  p.cluster.resize(g.node_count());
  p.sizes.assign(k, 0);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    p.cluster[v] = cluster_of[cm.component[v]];
    ++p.sizes[p.cluster[v]];
  }
  return p;
}

}  // namespace detail

/// Cluster counts for the two-level hierarchy.
struct HierarchySizes {
  std::size_t k_base = 0;  // ceil(eta * ln N)
  std::size_t r = 0;       // min(15, floor(k_base / eta)), at least 1
  std::size_t k = 0;       // k_base rounded up to a multiple of r (and capped by N)
  bool rounded = false;
  bool capped = false;
};

inline HierarchySizes hierarchy_sizes(std::size_t n, std::size_t eta) {
  if (n < 2) throw std::invalid_argument("hierarchical partition needs at least 2 nodes");
  if (eta < 1) throw std::invalid_argument("eta must be at least 1");
  HierarchySizes hs;
  hs.k_base = static_cast<std::size_t>(std::ceil(static_cast<double>(eta) * std::log(static_cast<double>(n))));
  hs.k_base = std::max<std::size_t>(hs.k_base, 1);
  hs.r = std::clamp<std::size_t>(hs.k_base / eta, 1, 15);
  hs.k = (hs.k_base + hs.r - 1) / hs.r * hs.r;
  hs.rounded = hs.k != hs.k_base;
  if (hs.k > n) {
    hs.r = std::min(hs.r, n);
    hs.k = n / hs.r * hs.r;
    hs.capped = true;
  }
  return hs;
}

/// Two-level partition: R macro-clusters first, then K/R clusters inside
/// each macro-cluster. Cluster ids are contiguous per macro-cluster.
/// A macro-cluster split into more pieces than K/R keeps K/R clusters; see
/// detail::fluidc_exact_k.
inline Partition hierarchical_partition(const Graph& g, std::size_t eta, std::uint64_t seed,
                                        std::size_t max_iters = 100) {
  const auto hs = hierarchy_sizes(g.node_count(), eta);
  const auto macro = fluidc_multi(g, hs.r, derive_seed(seed, "macro"), max_iters);
  const std::size_t per_macro = hs.k / hs.r;

  Partition p;
  p.requested_k = hs.k;
  p.cluster.assign(g.node_count(), 0);
  p.macro_count = macro.k();
  p.converged = macro.converged;
  p.iterations = macro.iterations;
  p.candidate_evaluations = macro.candidate_evaluations;

  const auto groups = macro.members();
  for (std::uint32_t m = 0; m < groups.size(); ++m) {
    const auto offset = static_cast<std::uint32_t>(p.sizes.size());
    const auto sub = induced_subgraph(g, groups[m]);
    const auto part = detail::fluidc_exact_k(sub.graph, std::min(per_macro, groups[m].size()),
                                             derive_seed(seed, "cluster", m), max_iters);
    for (NodeId local = 0; local < sub.to_parent.size(); ++local)
      p.cluster[sub.to_parent[local]] = offset + part.cluster[local];
    p.sizes.insert(p.sizes.end(), part.sizes.begin(), part.sizes.end());
    p.macro.insert(p.macro.end(), part.k(), m);
    p.converged = p.converged && part.converged;
    p.iterations = std::max(p.iterations, part.iterations);
    p.candidate_evaluations += part.candidate_evaluations;
  }
  p.k_adjusted = hs.capped || p.k() != hs.k || macro.k() != hs.r;
  return p;
}

/// CSV with header `node,cluster,macro_cluster` (macro column empty without
/// a second level).
inline void write_partition_csv(std::ostream& os, const Graph& g, const Partition& p) {
  os << "node,cluster,macro_cluster\n";
  for (NodeId v = 0; v < p.cluster.size(); ++v) {
    os << g.label(v) << ',' << p.cluster[v] << ',';
    if (p.has_macro()) os << p.macro_of_node(v);
    os << '\n';
  }
}

}  // namespace hplc
