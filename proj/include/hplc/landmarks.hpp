#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clustering.hpp"
#include "graph.hpp"
#include "parallel.hpp"

namespace hplc {

enum class Centrality { degree, betweenness, closeness };

inline std::string_view to_string(Centrality c) {
  switch (c) {
    case Centrality::degree: return "degree";
    case Centrality::betweenness: return "betweenness";
    case Centrality::closeness: return "closeness";
  }
  return "?";
}

inline Centrality parse_centrality(std::string_view s) {
  if (s == "degree") return Centrality::degree;
  if (s == "betweenness") return Centrality::betweenness;
  if (s == "closeness") return Centrality::closeness;
  throw std::invalid_argument("unknown centrality '" + std::string(s) + "'");
}

inline constexpr std::size_t kDefaultCentralityCap = 50'000;

namespace detail {

// Brandes accumulation for unweighted graphs. Every unordered pair is seen
// from both endpoints, hence the final halving.
inline std::vector<double> brandes(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0), delta(n);
  std::vector<double> sigma(n);
  std::vector<Hop> dist(n);
  std::vector<NodeId> order;
  order.reserve(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(dist.begin(), dist.end(), kUnreachable);
    std::fill(delta.begin(), delta.end(), 0.0);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const NodeId u = order[head];
      for (NodeId w : g.neighbors(u)) {
        if (dist[w] == kUnreachable) {
          dist[w] = dist[u] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[u] + 1) sigma[w] += sigma[u];
      }
    }
    for (std::size_t i = order.size(); i-- > 1;) {
      const NodeId w = order[i];
      for (NodeId u : g.neighbors(w))
        if (dist[u] + 1 == dist[w]) delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
      bc[w] += delta[w];
    }
  }
  for (auto& x : bc) x *= 0.5;
  return bc;
}

inline std::vector<double> closeness(const Graph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> out(n, 0.0);
  std::vector<Hop> dist;
  std::vector<NodeId> queue;
  for (NodeId s = 0; s < n; ++s) {
    bfs_into(g, s, dist, queue);
    std::uint64_t total = 0, reach = 0;
    for (Hop d : dist)
      if (d != kUnreachable) {
        total += d;
        ++reach;
      }
    out[s] = total ? static_cast<double>(reach - 1) / static_cast<double>(total) : 0.0;
  }
  return out;
}

}  // namespace detail

/// Per-node centrality score. Betweenness is the unnormalized Brandes count
/// over unordered pairs; closeness is (reachable - 1) / sum of distances
/// inside the node's component. The all-pairs kinds refuse graphs above `cap`.
inline std::vector<double> centrality(const Graph& g, Centrality kind, std::size_t cap = kDefaultCentralityCap) {
  if (kind == Centrality::degree) {
    std::vector<double> out(g.node_count());
    for (NodeId u = 0; u < out.size(); ++u) out[u] = static_cast<double>(g.degree(u));
    return out;
  }
  if (g.node_count() > cap)
    throw std::invalid_argument(std::string(to_string(kind)) + " centrality needs all-pairs work; graph has " +
                                std::to_string(g.node_count()) + " nodes, cap is " + std::to_string(cap));
  return kind == Centrality::betweenness ? detail::brandes(g) : detail::closeness(g);
}

/// Landmarks plus the N x K hop-distance matrix (row-major, one row per node).
struct LandmarkProfile {
  std::vector<NodeId> landmarks;  // landmark of cluster k at index k
  std::vector<Hop> distances;     // empty until distance_vectors() ran
  Hop sentinel = 0;               // stands in for "no path"; exceeds every finite entry
  Centrality kind = Centrality::degree;
  std::size_t nodes = 0;

  std::size_t k() const noexcept { return landmarks.size(); }
  bool complete() const noexcept { return distances.size() == nodes * k() && nodes > 0; }
  std::span<const Hop> row(NodeId v) const { return {distances.data() + std::size_t{v} * k(), k()}; }
  Hop at(NodeId v, std::size_t landmark) const { return distances[std::size_t{v} * k() + landmark]; }
  bool reachable(NodeId v, std::size_t landmark) const { return at(v, landmark) != sentinel; }
};

struct SelectOptions {
  Centrality kind = Centrality::degree;
  bool induced = false;  // score inside each cluster's induced subgraph instead of globally
  std::size_t cap = kDefaultCentralityCap;
};

/// One landmark per cluster: the member with the highest centrality, ties to
/// the smallest node index.
inline LandmarkProfile select_landmarks(const Graph& g, const Partition& p, const SelectOptions& opts = {}) {
  if (p.cluster.size() != g.node_count()) throw std::invalid_argument("partition does not match graph");
  LandmarkProfile prof;
  prof.kind = opts.kind;
  prof.nodes = g.node_count();
  const auto groups = p.members();
  prof.landmarks.resize(groups.size());

  auto pick = [](std::span<const NodeId> members, std::span<const double> score) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < members.size(); ++i)
      if (score[i] > score[best]) best = i;  // members ascending, so ties keep the smaller id
    return members[best];
  };

  if (!opts.induced) {
    const auto score = centrality(g, opts.kind, opts.cap);
    for (std::size_t c = 0; c < groups.size(); ++c) {
      std::vector<double> local(groups[c].size());
      for (std::size_t i = 0; i < local.size(); ++i) local[i] = score[groups[c][i]];
      prof.landmarks[c] = pick(groups[c], local);
    }
  } else {
    for (std::size_t c = 0; c < groups.size(); ++c) {
      const auto sub = induced_subgraph(g, groups[c]);
      prof.landmarks[c] = pick(groups[c], centrality(sub.graph, opts.kind, opts.cap));
    }
  }
  return prof;
}

/// Fills the distance matrix with one BFS per landmark. Unreachable entries
/// get the sentinel, which is one more than the largest finite entry.
inline LandmarkProfile distance_vectors(const Graph& g, LandmarkProfile prof, unsigned threads = 1) {
  const std::size_t n = g.node_count();
  const std::size_t k = prof.k();
  for (NodeId l : prof.landmarks)
    if (l >= n) throw std::out_of_range("landmark outside graph");
  prof.nodes = n;
  prof.distances.assign(n * k, kUnreachable);

  std::vector<std::vector<Hop>> columns(k);
  parallel_for(k, threads, [&](std::size_t c) {
    std::vector<NodeId> queue;
    bfs_into(g, prof.landmarks[c], columns[c], queue);
  });

  Hop max_finite = 0;
  for (std::size_t c = 0; c < k; ++c)
    for (NodeId v = 0; v < n; ++v) {
      const Hop d = columns[c][v];
      prof.distances[std::size_t{v} * k + c] = d;
      if (d != kUnreachable) max_finite = std::max(max_finite, d);
    }
  prof.sentinel = max_finite + 1;
  for (auto& d : prof.distances)
    if (d == kUnreachable) d = prof.sentinel;
  return prof;
}

inline LandmarkProfile distance_vectors(const Graph& g, std::span<const NodeId> landmarks, unsigned threads = 1) {
  LandmarkProfile prof;
  prof.landmarks.assign(landmarks.begin(), landmarks.end());
  return distance_vectors(g, std::move(prof), threads);
}

/// Shortest detour u -> landmark -> v over landmarks reachable from both
/// ends; kUnreachable when there is none.
inline Hop min_detour(const LandmarkProfile& prof, NodeId u, NodeId v) {
  if (u >= prof.nodes || v >= prof.nodes) throw std::out_of_range("min_detour: node out of range");
  Hop best = kUnreachable;
  const auto ru = prof.row(u), rv = prof.row(v);
  for (std::size_t i = 0; i < ru.size(); ++i) {
    if (ru[i] == prof.sentinel || rv[i] == prof.sentinel) continue;
    best = std::min(best, ru[i] + rv[i]);
  }
  return best;
}

}  // namespace hplc
