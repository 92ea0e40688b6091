#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "features.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "json.hpp"
#include "linkeval.hpp"
#include "randgraph.hpp"
#include "theory.hpp"

namespace hplc::cli {

enum ExitCode : int { kOk = 0, kPipelineFailure = 1, kUsage = 2 };

/// Bad flags or unreadable input; maps to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs `body`, reporting exceptions on `err` and mapping them to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "error: parse error at line " << e.line() << ": " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: domain error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kPipelineFailure;
  }
}

inline LoadResult load_input(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) throw UsageError("input file not found: " + path);
  return load_edge_list_file(path);
}

/// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  write_file_atomic(path, [&](std::ostream& os) { body(os); });
}

// ---------------------------------------------------------------------------
// preprocess

struct PreprocessArgs {
  std::string input;
  std::size_t eta = 5;
  std::string centrality = "degree";
  bool induced_centrality = false;
  std::string heat_t = "auto";
  bool random_sign_flip = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
  std::vector<std::size_t> eta_sweep;  // one output per value, suffixed .eta<value>
  unsigned threads = 1;
};

inline std::string sweep_path(const std::string& out, std::size_t eta) {
  const std::filesystem::path p(out);
  auto stem = p.stem().string() + ".eta" + std::to_string(eta);
  return (p.parent_path() / (stem + p.extension().string())).string();
}

inline void preprocess(const PreprocessArgs& a, std::ostream& out, std::ostream& log) {
  if (a.out.empty()) throw UsageError("--out is required");
  PreprocessOptions opts;
  try {
    opts.centrality = parse_centrality(a.centrality);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto format = parse_feature_format(a.format);
  opts.induced_centrality = a.induced_centrality;
  if (a.heat_t != "auto") {
    std::size_t used = 0;
    double t = 0;
    try {
      t = std::stod(a.heat_t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != a.heat_t.size() || !(t > 0)) throw UsageError("--heat-t must be 'auto' or a positive number");
    opts.heat_t = t;
  }
  opts.random_sign_flip = a.random_sign_flip;
  opts.seed = a.seed;
  opts.threads = a.threads;
  const auto loaded = load_input(a.input);

  std::vector<std::pair<std::size_t, std::string>> runs;
  if (a.eta_sweep.empty()) {
    runs.emplace_back(a.eta, a.out);
  } else {
    for (std::size_t eta : a.eta_sweep) runs.emplace_back(eta, sweep_path(a.out, eta));
  }
  for (const auto& [eta, path] : runs) {
    opts.eta = eta;
    const auto fs = preprocess(loaded.graph, opts);
    validate_features(fs);
    auto meta = feature_metadata(fs);
    meta["input"] = a.input;
    meta["ingest"] = {{"nodes", loaded.report.nodes},
                      {"edges", loaded.report.edges},
                      {"dropped_duplicates", loaded.report.duplicate_edges},
                      {"dropped_self_loops", loaded.report.self_loops}};
    meta["file_format"] = a.format;
    write_file_atomic(path, [&](std::ostream& os) { write_features(os, fs, format); });
    write_file_atomic(path + ".meta.json", [&](std::ostream& os) { os << meta.dump(2) << '\n'; });
    log << loaded.report.summary() << '\n';
    out << "wrote " << path << " (N=" << fs.size() << " K=" << fs.k << " R=" << fs.r << " eta=" << eta << ")\n";
  }
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string model = "er";
  std::size_t n = 2000;
  double k_avg = 6;
  std::size_t m = 5;
  std::optional<double> beta;
  std::string h_dist;  // "ba"
  std::string h_file;
  std::string strategy = "uniform";
  std::string k = "logn";  // count | logn | sqrt | auto (cluster strategy only)
  std::size_t pool = 0;
  std::size_t eta = 1;
  std::size_t pairs = 500;
  std::size_t seeds = 5;
  std::uint64_t seed = 0;
  std::string out;
};

inline std::size_t resolve_k(const std::string& value, std::size_t n, bool allow_auto) {
  const double nn = static_cast<double>(n);
  if (value == "logn") return static_cast<std::size_t>(std::ceil(std::log(nn)));
  if (value == "sqrt") return static_cast<std::size_t>(std::ceil(std::sqrt(nn)));
  if (value == "auto") {
    if (!allow_auto) throw UsageError("--k auto is only valid with --strategy cluster-hplc");
    return 0;
  }
  std::size_t k = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), k);
  if (ec != std::errc{} || ptr != value.data() + value.size() || k == 0)
    throw UsageError("--k must be a positive count, 'logn' or 'sqrt'");
  return k;
}

inline std::vector<double> read_hidden_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open h file: " + path);
  std::vector<double> h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      h.push_back(std::stod(line.substr(first)));
    } catch (const std::exception&) {
      throw ParseError("bad hidden value", lineno);
    }
  }
  return h;
}

struct SimulationResult {
  std::vector<DetourRecord> runs;
  DetourRecord summary;
};

/// Closed-form bound and mean shortest path for one run, from the model and
/// the landmarks the run actually used.
inline void attach_theory(DetourRecord& r, const SimulateArgs& a, std::span<const double> h, double beta) {
  const double n = static_cast<double>(r.n);
  const double k = static_cast<double>(r.landmark_count);
  if (a.model == "er") {
    r.bound = eval_er_bound(n, a.k_avg, k);
    r.shortest_formula = eval_er_shortest(n, a.k_avg);
  } else if (a.model == "ba") {
    r.shortest_formula = eval_ba_shortest(n);
    if (r.strategy == LandmarkStrategy::top_degree && a.pool == 0) {
      r.bound = eval_theorem3_bound(n, k);
    } else {
      // Arrival order is node order, so landmark λ has h² = 1 / (λ + 1).
      double h2_q = 0;
      for (NodeId l : r.landmarks) h2_q += 1.0 / (static_cast<double>(l) + 1.0);
      r.bound = eval_ba_bound(n, static_cast<double>(a.m), h2_q / k, k);
    }
  } else {
    ModelParams p;
    p.n = n;
    p.landmarks = k;
    p.beta = beta;
    for (double x : h) {
      p.h2 += x * x;
      p.mean_log_h += std::log(x);
    }
    p.h2 /= n;
    p.mean_log_h /= n;
    for (NodeId l : r.landmarks) p.h2_q += h[l] * h[l];
    p.h2_q /= k;
    r.bound = eval_general_bound(p);
  }
}

inline SimulationResult run_simulation(const SimulateArgs& a) {
  if (a.seeds == 0) throw UsageError("--seeds must be at least 1");
  if (a.pairs == 0) throw UsageError("--pairs must be at least 1");
  if (a.model != "er" && a.model != "ba" && a.model != "hidden")
    throw UsageError("--model must be er, ba or hidden");
  StrategyConfig cfg;
  try {
    cfg.kind = parse_strategy(a.strategy);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  cfg.pool = a.pool;
  cfg.eta = a.eta;
  const std::size_t k = resolve_k(a.k, a.n, cfg.kind == LandmarkStrategy::cluster_hplc);

  std::vector<double> h;
  double beta = 0;
  if (a.model == "hidden") {
    if (a.h_file.empty() && a.h_dist.empty()) throw UsageError("--model hidden needs --h-dist or --h-file");
    if (!a.h_file.empty()) {
      h = read_hidden_file(a.h_file);
      if (!a.beta) throw UsageError("--h-file needs --beta");
    } else if (a.h_dist != "ba") {
      throw UsageError("--h-dist must be 'ba'");
    }
    beta = a.beta.value_or(2.0 / static_cast<double>(a.m));
  }

  SimulationResult res;
  for (std::size_t s = 0; s < a.seeds; ++s) {
    const auto run_seed = derive_seed(a.seed, "simulate", s);
    Graph g;
    if (a.model == "er") {
      g = gen_er(a.n, a.k_avg, derive_seed(run_seed, "graph"));
    } else if (a.model == "ba") {
      g = gen_ba(a.n, a.m, derive_seed(run_seed, "graph"));
    } else {
      if (a.h_file.empty()) h = sample_ba_hidden(a.n, derive_seed(run_seed, "hidden"));
      g = gen_hidden(h, beta, derive_seed(run_seed, "graph"));
    }
    auto rec = simulate_detour(g, cfg, k, a.pairs, derive_seed(run_seed, "detour"));
    rec.model = a.model;
    rec.seed = s;
    attach_theory(rec, a, h, beta);
    res.runs.push_back(std::move(rec));
  }
  res.summary = summarize(res.runs);
  double sf = 0;
  for (const auto& r : res.runs) sf += r.shortest_formula;
  res.summary.shortest_formula = sf / static_cast<double>(res.runs.size());
  return res;
}

inline void simulate(const SimulateArgs& a, std::ostream& out) {
  const auto res = run_simulation(a);
  emit(a.out, out, [&](std::ostream& os) { write_simreport_csv(os, res.runs, res.summary); });
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsArgs {
  std::string model = "er";
  double n = 1000;
  double k_avg = 10;
  double m = 5;
  std::string k = "logn";
  std::optional<double> h2_q;  // ba: evaluate the general BA bound with this landmark moment
};

/// One line "bound, shortest" with four decimals.
inline std::string bounds_line(const BoundsArgs& a) {
  if (!(a.n >= 2)) throw DomainError("n must be at least 2");
  const auto k = static_cast<double>(resolve_k(a.k, static_cast<std::size_t>(a.n), false));
  double bound = 0, shortest = 0;
  if (a.model == "er") {
    bound = eval_er_bound(a.n, a.k_avg, k);
    shortest = eval_er_shortest(a.n, a.k_avg);
  } else if (a.model == "ba") {
    bound = a.h2_q ? eval_ba_bound(a.n, a.m, *a.h2_q, k) : eval_theorem3_bound(a.n, k);
    shortest = eval_ba_shortest(a.n);
  } else {
    throw UsageError("--model must be er or ba");
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f, %.4f", bound, shortest);
  return buf;
}

// ---------------------------------------------------------------------------
// landmark-rank

struct RankArgs {
  std::vector<std::size_t> n_list{500, 1000, 2000, 5000};
  std::size_t m = 5;
  std::size_t eta = 1;
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  std::string out;
};

inline void landmark_rank(const RankArgs& a, std::ostream& out) {
  if (a.seeds == 0) throw UsageError("--seeds must be at least 1");
  if (a.n_list.empty()) throw UsageError("--n-list is empty");
  const auto rows = landmark_rank_experiment(a.n_list, a.m, a.eta, a.seeds, a.seed);
  emit(a.out, out, [&](std::ostream& os) { write_rank_csv(os, rows); });
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string input;
  std::string split = "70/10/20";
  std::string scorer = "aa";
  std::string metric = "auc";  // auc | hits@K | mrr
  std::size_t negatives = 1000;  // mrr negatives per positive, capped by availability
  std::size_t eta = 5;
  std::uint64_t seed = 0;
  std::string out;
  std::string pairs_out;
};

inline std::array<double, 3> parse_split(const std::string& s) {
  std::array<double, 3> r{};
  std::stringstream ss(s);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, '/')) {
    if (i == 3) throw UsageError("--split needs three parts like 70/10/20");
    try {
      std::size_t used = 0;
      r[i++] = std::stod(part, &used);
      if (used != part.size()) throw UsageError("bad --split part '" + part + "'");
    } catch (const std::logic_error&) {
      throw UsageError("bad --split part '" + part + "'");
    }
  }
  if (i != 3) throw UsageError("--split needs three parts like 70/10/20");
  return r;
}

inline nlohmann::ordered_json evaluate(const EvalArgs& a, const Graph& g) {
  std::optional<std::size_t> hits_k;
  if (a.metric.starts_with("hits@")) {
    const auto tail = a.metric.substr(5);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), k);
    if (ec != std::errc{} || ptr != tail.data() + tail.size() || k == 0) throw UsageError("bad metric " + a.metric);
    hits_k = k;
  } else if (a.metric != "auc" && a.metric != "mrr") {
    throw UsageError("--metric must be auc, hits@K or mrr");
  }
  if (a.scorer != "aa" && a.scorer != "cn" && a.scorer != "detour") throw UsageError("--scorer must be aa, cn or detour");

  const auto split = split_edges(g, parse_split(a.split), a.seed);
  if (split.test.empty()) throw UsageError("split leaves no test edges");
  std::size_t per_positive = 1;
  ScoredPairs pairs = a.metric == "mrr"
                          ? make_ranking_pairs(split.train_graph, split.test, a.negatives, a.seed, &per_positive)
                          : make_pairs(split.test, split.test_neg);
  if (hits_k) {
    std::size_t negs = 0;
    for (const auto& p : pairs) negs += p.label == Label::neg;
    if (*hits_k > negs)
      throw UsageError("hits@" + std::to_string(*hits_k) + " exceeds the " + std::to_string(negs) + " test negatives");
  }

  if (a.scorer == "aa") {
    pairs = score_adamic_adar(split.train_graph, std::move(pairs));
  } else if (a.scorer == "cn") {
    pairs = score_common_neighbors(split.train_graph, std::move(pairs));
  } else {
    const auto part = hierarchical_partition(split.train_graph, a.eta, derive_seed(a.seed, "partition"));
    auto prof = distance_vectors(split.train_graph, select_landmarks(split.train_graph, part));
    pairs = score_detour(prof, std::move(pairs));
  }

  double value = 0;
  if (a.metric == "auc") value = metric_auc(pairs);
  else if (hits_k) value = metric_hits_at_k(pairs, *hits_k);
  else value = metric_mrr(pairs, per_positive);

  if (!a.pairs_out.empty())
    write_file_atomic(a.pairs_out, [&](std::ostream& os) { write_scored_pairs_csv(os, g, pairs); });

  nlohmann::ordered_json j;
  j["metric"] = hits_k ? "hits" : a.metric;
  j["value"] = value;
  j["k"] = hits_k ? nlohmann::ordered_json(*hits_k) : nlohmann::ordered_json(nullptr);
  j["seed"] = a.seed;
  j["scorer"] = a.scorer;
  j["split"] = a.split;
  j["test_positives"] = split.test.size();
  if (a.metric == "mrr") j["negatives_per_positive"] = per_positive;
  if (a.scorer == "detour") j["eta"] = a.eta;
  return j;
}

inline void eval(const EvalArgs& a, std::ostream& out) {
  const auto loaded = load_input(a.input);
  const auto j = evaluate(a, loaded.graph);
  emit(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

}  // namespace hplc::cli
