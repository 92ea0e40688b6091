#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "clustering.hpp"
#include "graph.hpp"
#include "landmarks.hpp"
#include "randgraph.hpp"
#include "rng.hpp"

namespace hplc {

inline constexpr double kEulerGamma = 0.5772156649;

/// Parameters outside the regime where a closed form is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Moments of the hidden-variable model q_ij = h_i h_j / β used by the
/// closed-form evaluators. All logarithms are natural.
struct ModelParams {
  double n = 0;           // N
  double landmarks = 1;   // K(N)
  double h2 = 0;          // <h^2> over all nodes
  double h2_q = 0;        // <h^2> over landmarks
  double beta = 0;
  double mean_log_h = 0;  // <log h>

  /// ER specialization: h ≡ <k>, β = <k> N.
  static ModelParams er(double n, double k_avg, double landmarks) {
    return {n, landmarks, k_avg * k_avg, k_avg * k_avg, k_avg * n, std::log(k_avg)};
  }

  void validate() const {
    if (!(n >= 2)) throw DomainError("N must be at least 2");
    if (!(landmarks >= 1)) throw DomainError("K(N) must be at least 1");
    if (!(h2 > 0) || !(h2_q > 0) || !(beta > 0)) throw DomainError("moments and beta must be positive");
  }
};

/// Tail P(L_ij > s) of the shortest landmark detour between nodes with
/// hidden variables h_i, h_j. Evaluated in log space; s = 1 gives exactly 1.
inline double eval_ccdf(const ModelParams& p, double h_i, double h_j, std::int64_t s) {
  p.validate();
  if (s < 1) throw DomainError("s must be at least 1");
  if (s == 1) return 1.0;
  const double log_rate = std::log(h_i * h_j) - std::log(p.beta * p.n * p.h2) + std::log(p.h2_q * p.landmarks) +
                          std::log(static_cast<double>(s - 1)) +
                          static_cast<double>(s - 1) * std::log(p.h2 * p.n / p.beta);
  if (log_rate > 709.0) return 0.0;
  return std::exp(-std::exp(log_rate));
}

/// Σ_{s≥1} P(L_ij > s), the mean detour length in the form the upper bound
/// is derived from. Truncated once terms drop below 1e-15.
inline double ccdf_mean(const ModelParams& p, double h_i, double h_j) {
  double total = 0.0;
  for (std::int64_t s = 1; s < 100'000; ++s) {
    const double term = eval_ccdf(p, h_i, h_j, s);
    total += term;
    if (term < 1e-15 && s > 1) break;
  }
  return total;
}

/// Upper bound on the mean shortest detour for a general hidden-variable
/// model.
inline double eval_general_bound(const ModelParams& p) {
  p.validate();
  const double denom = std::log(p.n) + std::log(p.h2) - std::log(p.beta);
  if (!(denom > 0.0))
    throw DomainError("general bound needs N<h^2>/beta > 1 (log N + log<h^2> - log beta = " + std::to_string(denom) +
                      ")");
  const double numer = -2.0 * p.mean_log_h - std::log(p.h2_q * p.landmarks) + std::log(p.n * p.beta * p.h2) +
                       std::log(denom) - kEulerGamma;
  return numer / denom + 0.5;
}

inline void require_er_domain(double n, double k_avg) {
  if (!(k_avg > 1.0)) throw DomainError("ER bounds need k_avg > 1 (got " + std::to_string(k_avg) + ")");
  if (!(n >= 2.0)) throw DomainError("ER bounds need n >= 2");
}

/// ER detour bound (2 ln n - ln K) / ln <k>.
inline double eval_er_bound(double n, double k_avg, double landmarks) {
  require_er_domain(n, k_avg);
  if (!(landmarks >= 1.0)) throw DomainError("landmark count must be at least 1");
  // Extended precision so exact ratios such as log(1000)/log(10) round to the exact double.
  const long double num = 2.0L * std::log(static_cast<long double>(n)) - std::log(static_cast<long double>(landmarks));
  return static_cast<double>(num / std::log(static_cast<long double>(k_avg)));
}

/// ER mean shortest-path length ln n / ln <k>.
inline double eval_er_shortest(double n, double k_avg) {
  require_er_domain(n, k_avg);
  return static_cast<double>(std::log(static_cast<long double>(n)) / std::log(static_cast<long double>(k_avg)));
}

inline void require_ba_domain(double n) {
  if (!(n >= 16.0)) throw DomainError("BA bounds need n >= 16 so that ln ln ln n is defined");
}

/// BA detour bound for landmarks with second moment h2_q.
inline double eval_ba_bound(double n, double m, double h2_q, double landmarks) {
  require_ba_domain(n);
  if (!(m >= 3.0)) throw DomainError("BA bound needs m >= 3 so that ln(m/2) > 0");
  if (!(h2_q > 0.0) || !(landmarks >= 1.0)) throw DomainError("h2_q must be positive and K >= 1");
  const double ln_n = std::log(n);
  const double lnln = std::log(ln_n);
  const double numer =
      ln_n - std::log(h2_q * landmarks) + lnln + std::log(lnln) + std::log(2.0 * std::log(m / 2.0) / m);
  return numer / (lnln + std::log(m / 2.0)) + 0.5;
}

/// Landmark second moment when K landmarks come from the top (ln n)·K nodes
/// by hidden variable: ln M / M with M = (ln n)·K.
inline double theorem3_h2_q(double n, double landmarks) {
  const double pool = std::log(n) * landmarks;
  return std::log(pool) / pool;
}

/// BA detour bound for landmarks drawn from the top-(ln n)·K hubs.
inline double eval_theorem3_bound(double n, double landmarks) {
  require_ba_domain(n);
  if (!(landmarks > 1.0)) throw DomainError("top-hub bound needs K > 1 so that ln ln K is defined");
  const double ln_n = std::log(n);
  const double lnln = std::log(ln_n);
  return (ln_n - std::log(std::log(landmarks)) + 2.0 * lnln) / lnln;
}

/// BA mean shortest-path length ln n / ln ln n.
inline double eval_ba_shortest(double n) {
  require_ba_domain(n);
  return std::log(n) / std::log(std::log(n));
}

// ---------------------------------------------------------------------------
// Simulation harness

enum class LandmarkStrategy { uniform, top_degree, cluster_hplc };

inline std::string_view to_string(LandmarkStrategy s) {
  switch (s) {
    case LandmarkStrategy::uniform: return "uniform";
    case LandmarkStrategy::top_degree: return "top-degree";
    case LandmarkStrategy::cluster_hplc: return "cluster-hplc";
  }
  return "?";
}

inline LandmarkStrategy parse_strategy(std::string_view s) {
  if (s == "uniform") return LandmarkStrategy::uniform;
  if (s == "top-degree" || s == "top_degree") return LandmarkStrategy::top_degree;
  if (s == "cluster-hplc" || s == "cluster_hplc" || s == "cluster") return LandmarkStrategy::cluster_hplc;
  throw std::invalid_argument("unknown landmark strategy '" + std::string(s) + "'");
}

struct StrategyConfig {
  LandmarkStrategy kind = LandmarkStrategy::uniform;
  std::size_t pool = 0;  // top_degree pool size; 0 means ceil(ln N * K)
  std::size_t eta = 1;   // cluster_hplc without an explicit K
};

/// One simulation run on one graph.
struct DetourRecord {
  std::string model;
  std::size_t n = 0;
  LandmarkStrategy strategy = LandmarkStrategy::uniform;
  std::size_t landmark_count = 0;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  double mean_true = 0;
  double mean_detour = 0;
  double ratio = 0;  // mean_detour / mean_true
  double bound = std::numeric_limits<double>::quiet_NaN();
  double shortest_formula = std::numeric_limits<double>::quiet_NaN();
  bool with_replacement = false;
  std::vector<double> ccdf;  // ccdf[s] = fraction of sampled pairs with detour > s
  std::vector<NodeId> landmarks;
};

/// Top `pool` nodes by degree (ties to the smaller index).
inline std::vector<NodeId> top_degree_nodes(const Graph& g, std::size_t pool) {
  std::vector<NodeId> order(g.node_count());
  std::iota(order.begin(), order.end(), NodeId{0});
  pool = std::min(pool, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pool), order.end(),
                    [&](NodeId a, NodeId b) { return g.degree(a) != g.degree(b) ? g.degree(a) > g.degree(b) : a < b; });
  order.resize(pool);
  return order;
}

/// Competition ranks by degree: 1 + number of nodes with strictly larger degree.
inline std::vector<std::size_t> degree_ranks(const Graph& g) {
  const std::size_t n = g.node_count();
  std::size_t max_deg = 0;
  for (NodeId v = 0; v < n; ++v) max_deg = std::max(max_deg, g.degree(v));
  std::vector<std::size_t> count(max_deg + 2, 0);
  for (NodeId v = 0; v < n; ++v) ++count[g.degree(v)];
  std::vector<std::size_t> above(max_deg + 2, 0);  // nodes with degree > d
  for (std::size_t d = max_deg; d-- > 0;) above[d] = above[d + 1] + count[d + 1];
  std::vector<std::size_t> rank(n);
  for (NodeId v = 0; v < n; ++v) rank[v] = 1 + above[g.degree(v)];
  return rank;
}

namespace detail {

inline std::vector<NodeId> sample_without_replacement(std::span<const NodeId> from, std::size_t k, Rng& rng) {
  std::vector<NodeId> pool(from.begin(), from.end());
  k = std::min(k, pool.size());
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace detail

/// Chooses landmarks by `strategy`, samples pairs of distinct non-landmark
/// nodes inside the largest component, and compares true distances with the
/// shortest landmark detour. For cluster_hplc, landmark_count = 0 means
/// hierarchical clustering with cfg.eta.
inline DetourRecord simulate_detour(const Graph& g, const StrategyConfig& cfg, std::size_t landmark_count,
                                    std::size_t pair_samples, std::uint64_t seed) {
  if (pair_samples == 0) throw std::invalid_argument("pair_samples must be positive");
  const std::size_t n = g.node_count();
  const auto cm = connected_components(g);
  const auto giant = cm.largest();
  const auto members = cm.members(giant);

  DetourRecord rec;
  rec.n = n;
  rec.strategy = cfg.kind;
  rec.seed = seed;
  Rng rng(derive_seed(seed, "landmarks"));

  switch (cfg.kind) {
    case LandmarkStrategy::uniform:
      if (landmark_count < 1) throw std::invalid_argument("landmark_count must be positive");
      rec.landmarks = detail::sample_without_replacement(members, landmark_count, rng);
      break;
    case LandmarkStrategy::top_degree: {
      if (landmark_count < 1) throw std::invalid_argument("landmark_count must be positive");
      std::size_t pool = cfg.pool;
      if (pool == 0)
        pool = static_cast<std::size_t>(std::ceil(std::log(static_cast<double>(n)) * static_cast<double>(landmark_count)));
      pool = std::max(pool, landmark_count);
      const auto top = top_degree_nodes(g, pool);
      rec.landmarks = detail::sample_without_replacement(top, landmark_count, rng);
      break;
    }
    case LandmarkStrategy::cluster_hplc: {
      const auto part = landmark_count == 0 ? hierarchical_partition(g, cfg.eta, derive_seed(seed, "cluster"))
                                            : fluidc_multi(g, landmark_count, derive_seed(seed, "cluster"));
      rec.landmarks = select_landmarks(g, part).landmarks;
      break;
    }
  }
  rec.landmark_count = rec.landmarks.size();
  const auto prof = distance_vectors(g, rec.landmarks);

  std::vector<bool> is_landmark(n, false);
  for (NodeId l : rec.landmarks) is_landmark[l] = true;
  std::vector<NodeId> cand;
  for (NodeId v : members)
    if (!is_landmark[v]) cand.push_back(v);
  if (cand.size() < 2) throw std::invalid_argument("fewer than two non-landmark nodes in the largest component");

  const std::uint64_t available = static_cast<std::uint64_t>(cand.size()) * (cand.size() - 1) / 2;
  rec.with_replacement = pair_samples > available;
  Rng pair_rng(derive_seed(seed, "pairs"));
  std::vector<Edge> pairs;
  pairs.reserve(pair_samples);
  std::unordered_set<std::uint64_t> seen;
  while (pairs.size() < pair_samples) {
    auto a = cand[uniform_index(pair_rng, cand.size())];
    auto b = cand[uniform_index(pair_rng, cand.size())];
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!rec.with_replacement && !seen.insert(std::uint64_t{a} << 32 | b).second) continue;
    pairs.emplace_back(a, b);
  }

  // Group pairs by first endpoint so each BFS serves all its pairs.
  std::vector<std::size_t> idx(pairs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return pairs[x].first < pairs[y].first; });
  std::vector<Hop> dist;
  std::vector<NodeId> queue;
  std::vector<Hop> detour(pairs.size());
  double sum_true = 0, sum_detour = 0;
  NodeId current = std::numeric_limits<NodeId>::max();
  for (std::size_t i : idx) {
    const auto [a, b] = pairs[i];
    if (a != current) {
      bfs_into(g, a, dist, queue);
      current = a;
    }
    detour[i] = min_detour(prof, a, b);
    sum_true += dist[b];
    sum_detour += detour[i];
  }
  rec.pairs = pairs.size();
  rec.mean_true = sum_true / static_cast<double>(rec.pairs);
  rec.mean_detour = sum_detour / static_cast<double>(rec.pairs);
  rec.ratio = rec.mean_detour / rec.mean_true;

  const Hop max_detour = *std::max_element(detour.begin(), detour.end());
  std::vector<std::size_t> hist(max_detour + 1, 0);
  for (Hop d : detour) ++hist[d];
  rec.ccdf.assign(max_detour + 1, 0.0);
  std::size_t above = rec.pairs;
  for (Hop s = 0; s <= max_detour; ++s) {
    above -= hist[s];
    rec.ccdf[s] = static_cast<double>(above) / static_cast<double>(rec.pairs);
  }
  return rec;
}

/// Aggregate of several records (means of the per-run statistics).
inline DetourRecord summarize(std::span<const DetourRecord> runs) {
  if (runs.empty()) throw std::invalid_argument("no runs to summarize");
  DetourRecord s = runs.front();
  s.seed = 0;
  s.landmarks.clear();
  double t = 0, d = 0, b = 0, lc = 0;
  std::size_t pairs = 0, len = 0;
  for (const auto& r : runs) {
    t += r.mean_true;
    d += r.mean_detour;
    b += r.bound;
    lc += static_cast<double>(r.landmark_count);
    pairs += r.pairs;
    len = std::max(len, r.ccdf.size());
    s.with_replacement = s.with_replacement || r.with_replacement;
  }
  const double m = static_cast<double>(runs.size());
  s.mean_true = t / m;
  s.mean_detour = d / m;
  s.ratio = s.mean_detour / s.mean_true;
  s.bound = b / m;
  s.landmark_count = static_cast<std::size_t>(std::llround(lc / m));
  s.pairs = pairs;
  s.ccdf.assign(len, 0.0);
  for (const auto& r : runs)
    for (std::size_t i = 0; i < r.ccdf.size(); ++i) s.ccdf[i] += r.ccdf[i] / m;
  return s;
}

inline constexpr std::string_view kSimReportVersion = "hplc-simreport/1";

namespace detail {
inline std::string fmt_real(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}
}  // namespace detail

/// CSV: one row per run, then a row whose seed column reads "summary".
inline void write_simreport_csv(std::ostream& os, std::span<const DetourRecord> runs, const DetourRecord& summary) {
  os << "# " << kSimReportVersion << '\n';
  os << "model,n,strategy,landmark_count,seed,pairs,mean_true,mean_detour,ratio,bound,shortest_formula,"
        "with_replacement,ccdf\n";
  auto row = [&](const DetourRecord& r, const std::string& seed) {
    os << r.model << ',' << r.n << ',' << to_string(r.strategy) << ',' << r.landmark_count << ',' << seed << ','
       << r.pairs << ',' << detail::fmt_real(r.mean_true) << ',' << detail::fmt_real(r.mean_detour) << ','
       << detail::fmt_real(r.ratio) << ',' << detail::fmt_real(r.bound) << ','
       << detail::fmt_real(r.shortest_formula) << ',' << (r.with_replacement ? 1 : 0) << ',';
    for (std::size_t i = 0; i < r.ccdf.size(); ++i) os << (i ? ";" : "") << detail::fmt_real(r.ccdf[i]);
    os << '\n';
  };
  for (const auto& r : runs) row(r, std::to_string(r.seed));
  row(summary, "summary");
}

// ---------------------------------------------------------------------------
// Landmark degree-rank experiment

struct RankRow {
  std::size_t n = 0;
  std::size_t landmarks = 0;       // K per run
  std::size_t threshold_rank = 0;  // ceil((ln n)^2)
  double max_rank_pct = 0;         // worst landmark competition rank per run, % of n, mean over seeds
  double mean_rank_pct = 0;        // mean landmark competition rank, % of n
  double threshold_pct = 0;        // threshold_rank as % of n
  double threshold_degree_rank_pct = 0;  // competition rank of the threshold-th node, % of n (mean over seeds)
  double fraction_within = 0;      // landmarks with rank <= threshold_rank
  std::size_t seeds = 0;
};

/// For each n: BA graphs, hierarchical clustering with the given eta, degree
/// landmarks, and where those landmarks sit in the global degree ranking.
inline std::vector<RankRow> landmark_rank_experiment(std::span<const std::size_t> n_list, std::size_t m,
                                                     std::size_t eta, std::size_t seeds, std::uint64_t root_seed) {
  if (seeds == 0) throw std::invalid_argument("need at least one seed");
  std::vector<RankRow> out;
  for (std::size_t n : n_list) {
    RankRow row;
    row.n = n;
    row.seeds = seeds;
    row.threshold_rank = static_cast<std::size_t>(std::ceil(std::pow(std::log(static_cast<double>(n)), 2)));
    row.threshold_pct = 100.0 * static_cast<double>(row.threshold_rank) / static_cast<double>(n);
    double rank_sum = 0, max_sum = 0, within = 0, total = 0, thr_rank_sum = 0, k_sum = 0;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto run_seed = derive_seed(root_seed, "rank-" + std::to_string(n), s);
      const auto g = gen_ba(n, m, derive_seed(run_seed, "ba"));
      const auto part = hierarchical_partition(g, eta, derive_seed(run_seed, "cluster"));
      const auto prof = select_landmarks(g, part);
      const auto rank = degree_ranks(g);
      std::size_t worst = 0;
      for (NodeId l : prof.landmarks) {
        worst = std::max(worst, rank[l]);
        rank_sum += static_cast<double>(rank[l]);
        within += rank[l] <= row.threshold_rank ? 1.0 : 0.0;
        total += 1.0;
      }
      auto sorted = rank;
      std::sort(sorted.begin(), sorted.end());
      thr_rank_sum += static_cast<double>(sorted[std::min(row.threshold_rank, n) - 1]);
      k_sum += static_cast<double>(prof.k());
      max_sum += static_cast<double>(worst);
    }
    row.max_rank_pct = 100.0 * max_sum / static_cast<double>(seeds) / static_cast<double>(n);
    row.mean_rank_pct = 100.0 * rank_sum / total / static_cast<double>(n);
    row.fraction_within = within / total;
    row.threshold_degree_rank_pct = 100.0 * thr_rank_sum / static_cast<double>(seeds) / static_cast<double>(n);
    row.landmarks = static_cast<std::size_t>(std::llround(k_sum / static_cast<double>(seeds)));
    out.push_back(row);
  }
  return out;
}

inline void write_rank_csv(std::ostream& os, std::span<const RankRow> rows) {
  os << "n,landmarks,rank_cluster_landmarks_pct,mean_landmark_rank_pct,rank_top_lnN2_pct,fraction_within_top_lnN2,"
        "threshold_rank,threshold_degree_rank_pct,seeds\n";
  for (const auto& r : rows)
    os << r.n << ',' << r.landmarks << ',' << detail::fmt_real(r.max_rank_pct) << ','
       << detail::fmt_real(r.mean_rank_pct) << ','
       << detail::fmt_real(r.threshold_pct) << ',' << detail::fmt_real(r.fraction_within) << ',' << r.threshold_rank
       << ',' << detail::fmt_real(r.threshold_degree_rank_pct) << ',' << r.seeds << '\n';
}

}  // namespace hplc
