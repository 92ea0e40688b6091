#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hplc {

using NodeId = std::uint32_t;
using Hop = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

inline constexpr Hop kUnreachable = std::numeric_limits<Hop>::max();

/// Input that cannot be turned into a graph. Carries the 1-based line number
/// when the problem is tied to a line (0 otherwise).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct IngestReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops = 0;

  std::string summary() const {
    std::ostringstream os;
    os << "nodes=" << nodes << " edges=" << edges << " dropped_duplicates=" << duplicate_edges
       << " dropped_self_loops=" << self_loops;
    return os.str();
  }
};

/// Immutable undirected graph in compressed adjacency form. Neighbor lists
/// are sorted ascending and free of self-loops and duplicates.
class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  /// Builds a graph on nodes 0..n-1. Self-loops and repeated edges (in either
  /// orientation) are dropped and counted in `report` when given.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges, IngestReport* report = nullptr) {
    IngestReport local;
    std::vector<Edge> canon;
    canon.reserve(edges.size());
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw std::out_of_range("edge endpoint out of range");
      if (u == v) {
        ++local.self_loops;
        continue;
      }
      canon.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(canon.begin(), canon.end());
    const auto last = std::unique(canon.begin(), canon.end());
    local.duplicate_edges = static_cast<std::size_t>(canon.end() - last);
    canon.erase(last, canon.end());

    Graph g;
    g.offsets_.assign(n + 1, 0);
    for (auto [u, v] : canon) {
      ++g.offsets_[u + 1];
      ++g.offsets_[v + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adj_.resize(2 * canon.size());
    std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    // canon is sorted by (min, max), so filling in this order leaves every
    // list sorted except for the back-references, handled by the final sort.
    for (auto [u, v] : canon) {
      g.adj_[cursor[u]++] = v;
      g.adj_[cursor[v]++] = u;
    }
    for (std::size_t u = 0; u < n; ++u) std::sort(g.adj_.begin() + g.offsets_[u], g.adj_.begin() + g.offsets_[u + 1]);

    local.nodes = n;
    local.edges = canon.size();
    if (report) *report = local;
    return g;
  }

  std::size_t node_count() const noexcept { return offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adj_.size() / 2; }

  std::span<const NodeId> neighbors(NodeId u) const {
    return {adj_.data() + offsets_[u], adj_.data() + offsets_[u + 1]};
  }
  std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Every edge once, as (u, v) with u < v, in lexicographic order.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId u = 0; u < node_count(); ++u)
      for (NodeId v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  bool has_labels() const noexcept { return !labels_.empty(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::string label(NodeId u) const { return has_labels() ? labels_[u] : std::to_string(u); }

  std::optional<NodeId> find_label(std::string_view name) const {
    if (!has_labels()) {
      NodeId id = 0;
      auto [ptr, ec] = std::from_chars(name.data(), name.data() + name.size(), id);
      if (ec == std::errc{} && ptr == name.data() + name.size() && id < node_count()) return id;
      return std::nullopt;
    }
    auto it = label_index_.find(std::string(name));
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Attaches external labels (one per node, distinct).
  void set_labels(std::vector<std::string> labels) {
    if (labels.size() != node_count()) throw std::invalid_argument("label count does not match node count");
    label_index_.clear();
    for (NodeId i = 0; i < labels.size(); ++i)
      if (!label_index_.emplace(labels[i], i).second) throw std::invalid_argument("duplicate label " + labels[i]);
    labels_ = std::move(labels);
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adj_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, NodeId> label_index_;
};

struct LoadOptions {
  char delimiter = 0;  // 0: any run of whitespace and/or commas
  std::string comment_prefix = "#";
  bool dedup = true;  // false: a repeated edge is a parse error
};

struct LoadResult {
  Graph graph;
  IngestReport report;
};

namespace detail {

inline std::vector<std::string_view> split_tokens(std::string_view line, char delimiter) {
  std::vector<std::string_view> out;
  auto is_sep = [&](char c) {
    if (delimiter) return c == delimiter;
    return c == ' ' || c == '\t' || c == ',' || c == '\r';
  };
  std::size_t i = 0;
  while (i < line.size()) {
    if (delimiter == 0) {
      while (i < line.size() && is_sep(line[i])) ++i;
      if (i >= line.size()) break;
    }
    std::size_t j = i;
    while (j < line.size() && !is_sep(line[j])) ++j;
    auto tok = line.substr(i, j - i);
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) tok.remove_suffix(1);
    out.push_back(tok);
    i = j + 1;
  }
  return out;
}

}  // namespace detail

/// Parses a whitespace/comma separated edge list. Labels are arbitrary
/// strings, mapped to dense indices in first-seen order. Columns beyond the
/// first two (weights, timestamps) are ignored.
inline LoadResult load_edge_list(std::istream& in, const LoadOptions& opts = {}) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, NodeId> index;
  std::vector<Edge> edges;
  auto intern = [&](std::string_view tok) {
    auto [it, inserted] = index.emplace(std::string(tok), static_cast<NodeId>(labels.size()));
    if (inserted) labels.emplace_back(tok);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> edge_line;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    const auto first = view.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    view.remove_prefix(first);
    if (!opts.comment_prefix.empty() && view.starts_with(opts.comment_prefix)) continue;
    auto tokens = detail::split_tokens(view, opts.delimiter);
    if (tokens.size() < 2 || tokens[0].empty() || tokens[1].empty())
      throw ParseError("expected two endpoint labels, got '" + std::string(view) + "'", lineno);
    const NodeId u = intern(tokens[0]);
    const NodeId v = intern(tokens[1]);
    edges.emplace_back(u, v);
    edge_line.push_back(lineno);
  }
  if (edges.empty()) throw ParseError("edge list is empty", 0);

  if (!opts.dedup) {
    std::vector<std::pair<Edge, std::size_t>> seen;
    seen.reserve(edges.size());
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [u, v] = edges[i];
      if (u != v) seen.push_back({{std::min(u, v), std::max(u, v)}, edge_line[i]});
    }
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 1; i < seen.size(); ++i)
      if (seen[i].first == seen[i - 1].first) throw ParseError("duplicate edge", seen[i].second);
  }

  LoadResult result;
  result.graph = Graph::from_edges(labels.size(), edges, &result.report);
  result.graph.set_labels(std::move(labels));
  return result;
}

inline LoadResult load_edge_list_file(const std::string& path, const LoadOptions& opts = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_edge_list(in, opts);
}

/// Writes `dist` with exact hop counts from `source` (kUnreachable elsewhere).
/// `queue` is scratch space; both buffers are resized as needed.
inline void bfs_into(const Graph& g, NodeId source, std::vector<Hop>& dist, std::vector<NodeId>& queue) {
  const std::size_t n = g.node_count();
  if (source >= n) throw std::out_of_range("bfs source out of range");
  dist.assign(n, kUnreachable);
  queue.resize(n);
  std::size_t head = 0, tail = 0;
  dist[source] = 0;
  queue[tail++] = source;
  while (head < tail) {
    const NodeId u = queue[head++];
    const Hop next = dist[u] + 1;
    for (NodeId v : g.neighbors(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = next;
        queue[tail++] = v;
      }
    }
  }
}

inline std::vector<Hop> bfs_distances(const Graph& g, NodeId source) {
  std::vector<Hop> dist;
  std::vector<NodeId> queue;
  bfs_into(g, source, dist, queue);
  return dist;
}

struct ComponentMap {
  std::vector<std::uint32_t> component;  // per node, dense 0..count-1 in order of lowest member
  std::vector<std::size_t> sizes;

  std::size_t count() const noexcept { return sizes.size(); }
  std::uint32_t largest() const {
    return static_cast<std::uint32_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
  }
  std::vector<NodeId> members(std::uint32_t c) const {
    std::vector<NodeId> out;
    out.reserve(sizes.at(c));
    for (NodeId v = 0; v < component.size(); ++v)
      if (component[v] == c) out.push_back(v);
    return out;
  }
};

inline ComponentMap connected_components(const Graph& g) {
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  const std::size_t n = g.node_count();
  ComponentMap cm;
  cm.component.assign(n, kUnset);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (cm.component[s] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(cm.sizes.size());
    std::size_t size = 0;
    cm.component[s] = id;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      ++size;
      for (NodeId v : g.neighbors(u)) {
        if (cm.component[v] == kUnset) {
          cm.component[v] = id;
          stack.push_back(v);
        }
      }
    }
    cm.sizes.push_back(size);
  }
  return cm;
}

inline std::vector<std::size_t> degrees(const Graph& g) {
  std::vector<std::size_t> out(g.node_count());
  for (NodeId u = 0; u < out.size(); ++u) out[u] = g.degree(u);
  return out;
}

struct Subgraph {
  Graph graph;
  std::vector<NodeId> to_parent;  // local index -> parent node
};

/// Subgraph induced by `nodes` (local ids follow the order given).
inline Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  std::unordered_map<NodeId, NodeId> local;
  local.reserve(nodes.size());
  for (NodeId i = 0; i < nodes.size(); ++i) local.emplace(nodes[i], i);
  std::vector<Edge> edges;
  for (NodeId i = 0; i < nodes.size(); ++i)
    for (NodeId v : g.neighbors(nodes[i])) {
      auto it = local.find(v);
      if (it != local.end() && i < it->second) edges.emplace_back(i, it->second);
    }
  Subgraph sub;
  sub.graph = Graph::from_edges(nodes.size(), edges);
  sub.to_parent.assign(nodes.begin(), nodes.end());
  return sub;
}

}  // namespace hplc
