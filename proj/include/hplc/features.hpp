#pragma once

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clustering.hpp"
#include "graph.hpp"
#include "io.hpp"
#include "json.hpp"
#include "landmarks.hpp"
#include "rng.hpp"
#include "spectral.hpp"

namespace hplc {

inline constexpr std::string_view kFeatureFormat = "hplc-features/1";

struct PreprocessOptions {
  std::size_t eta = 5;
  Centrality centrality = Centrality::degree;
  bool induced_centrality = false;
  std::optional<double> heat_t;  // empty: median squared landmark distance
  bool random_sign_flip = false;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t max_iters = 100;
  SpectralOptions spectral;  // seed is overridden from `seed`
};

/// Per-node positional features: cluster routing ids, D(v) and M(v).
struct FeatureSet {
  std::size_t k = 0;
  std::size_t r = 0;
  std::size_t eta = 0;
  double t = 0;  // heat-kernel temperature; 0 when K = 1 (no landmark graph)
  std::uint64_t seed = 0;
  Hop sentinel = 0;
  bool random_sign_flip = false;

  std::vector<std::string> labels;
  std::vector<std::uint32_t> cluster;
  std::vector<std::uint32_t> macro;
  std::vector<bool> is_landmark;
  std::vector<Hop> distances;       // N x K
  std::vector<double> memberships;  // N x K

  // Diagnostics for the metadata sidecar; not part of the feature file.
  std::size_t edges = 0;
  std::size_t k_base = 0;
  bool t_auto = false;
  bool k_rounded = false;
  bool k_adjusted = false;
  bool k_capped = false;
  bool converged = true;
  std::size_t perturb_rounds = 0;
  bool repeated_eigenvalues = false;
  std::string centrality = "degree";
  std::vector<double> eigenvalues;
  std::map<std::string, double> timings_ms;

  std::size_t size() const noexcept { return labels.size(); }
  std::span<const Hop> d(NodeId v) const { return {distances.data() + std::size_t{v} * k, k}; }
  std::span<const double> m(NodeId v) const { return {memberships.data() + std::size_t{v} * k, k}; }
};

/// Partition, landmarks, distance vectors and spectral membership vectors
/// for every node of `g`.
inline FeatureSet preprocess(const Graph& g, const PreprocessOptions& opts) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };
  FeatureSet fs;
  fs.eta = opts.eta;
  fs.seed = opts.seed;
  fs.random_sign_flip = opts.random_sign_flip;
  fs.centrality = std::string(to_string(opts.centrality));
  fs.edges = g.edge_count();

  const auto hs = hierarchy_sizes(g.node_count(), opts.eta);
  fs.k_base = hs.k_base;
  fs.k_rounded = hs.rounded;
  fs.k_capped = hs.capped;

  auto t0 = clock::now();
  const auto part = hierarchical_partition(g, opts.eta, derive_seed(opts.seed, "partition"), opts.max_iters);
  fs.timings_ms["partition"] = ms_since(t0);
  fs.k = part.k();
  fs.r = part.macro_count;
  fs.k_adjusted = part.k_adjusted;
  fs.converged = part.converged;

  t0 = clock::now();
  auto prof = select_landmarks(g, part, {opts.centrality, opts.induced_centrality});
  fs.timings_ms["landmarks"] = ms_since(t0);

  t0 = clock::now();
  prof = distance_vectors(g, std::move(prof), opts.threads);
  fs.timings_ms["distances"] = ms_since(t0);
  fs.sentinel = prof.sentinel;

  t0 = clock::now();
  EigenResult eig;
  if (fs.k == 1) {
    eig.values = {0.0};
    eig.vectors = Matrix::identity(1);
    eig.converged = true;
  } else {
    const auto lg = build_landmark_graph(prof, opts.heat_t);
    fs.t = lg.t;
    fs.t_auto = lg.t_auto;
    auto so = opts.spectral;
    so.seed = derive_seed(opts.seed, "spectral");
    const auto enc = encode_landmarks(lg, so);
    fs.perturb_rounds = enc.perturb_rounds;
    fs.repeated_eigenvalues = enc.repeated_eigenvalues;
    eig = enc.eigen;
  }
  const auto mv = assign_memberships(
      eig, part, opts.random_sign_flip ? std::optional(derive_seed(opts.seed, "membership")) : std::nullopt);
  fs.timings_ms["spectral"] = ms_since(t0);
  fs.eigenvalues = eig.values;

  const std::size_t n = g.node_count();
  fs.labels.resize(n);
  for (NodeId v = 0; v < n; ++v) fs.labels[v] = g.label(v);
  fs.cluster = part.cluster;
  fs.macro.resize(n);
  for (NodeId v = 0; v < n; ++v) fs.macro[v] = part.macro_of_node(v);
  fs.is_landmark.assign(n, false);
  for (NodeId l : prof.landmarks) fs.is_landmark[l] = true;
  fs.distances = std::move(prof.distances);
  fs.memberships = mv.values;
  return fs;
}

/// Throws std::logic_error when records disagree with the header.
inline void validate_features(const FeatureSet& fs) {
  const std::size_t n = fs.size();
  auto fail = [](const std::string& what) { throw std::logic_error("feature set: " + what); };
  if (fs.k == 0) fail("K is zero");
  if (fs.cluster.size() != n || fs.macro.size() != n || fs.is_landmark.size() != n) fail("column length mismatch");
  if (fs.distances.size() != n * fs.k || fs.memberships.size() != n * fs.k) fail("vector length differs from K");
  std::vector<std::int64_t> macro_of(fs.k, -1);
  std::vector<std::size_t> landmarks(fs.k, 0);
  for (NodeId v = 0; v < n; ++v) {
    const auto c = fs.cluster[v];
    if (c >= fs.k) fail("cluster id out of range");
    if (fs.macro[v] >= fs.r) fail("macro-cluster id out of range");
    if (macro_of[c] == -1) macro_of[c] = fs.macro[v];
    if (macro_of[c] != fs.macro[v]) fail("cluster split across macro-clusters");
    if (fs.is_landmark[v]) {
      ++landmarks[c];
      if (fs.d(v)[c] != 0) fail("landmark at nonzero distance from itself");
    }
    for (Hop d : fs.d(v))
      if (d > fs.sentinel) fail("distance above sentinel");
    for (double x : fs.m(v))
      if (!std::isfinite(x)) fail("non-finite membership entry");
  }
  for (std::size_t c = 0; c < fs.k; ++c)
    if (landmarks[c] != 1) fail("cluster " + std::to_string(c) + " has " + std::to_string(landmarks[c]) + " landmarks");
}

enum class FeatureFormat { csv, jsonl };

inline FeatureFormat parse_feature_format(std::string_view s) {
  if (s == "csv") return FeatureFormat::csv;
  if (s == "jsonl") return FeatureFormat::jsonl;
  throw std::invalid_argument("unknown feature format '" + std::string(s) + "'");
}

namespace detail {

inline nlohmann::ordered_json feature_header(const FeatureSet& fs) {
  nlohmann::ordered_json h;
  h["format"] = kFeatureFormat;
  h["K"] = fs.k;
  h["R"] = fs.r;
  h["eta"] = fs.eta;
  h["T"] = fs.t;
  h["seed"] = fs.seed;
  h["sentinel"] = fs.sentinel;
  h["random_sign_flip"] = fs.random_sign_flip;
  return h;
}

}  // namespace detail

/// CSV: `# key=value` header lines, then
/// node,cluster,macro_cluster,is_landmark,d_0..d_{K-1},m_0..m_{K-1}.
inline void write_features_csv(std::ostream& os, const FeatureSet& fs) {
  os << "# format=" << kFeatureFormat << '\n'
     << "# K=" << fs.k << '\n'
     << "# R=" << fs.r << '\n'
     << "# eta=" << fs.eta << '\n'
     << "# T=" << format_real(fs.t) << '\n'
     << "# seed=" << fs.seed << '\n'
     << "# sentinel=" << fs.sentinel << '\n'
     << "# random_sign_flip=" << (fs.random_sign_flip ? 1 : 0) << '\n';
  os << "node,cluster,macro_cluster,is_landmark";
  for (std::size_t j = 0; j < fs.k; ++j) os << ",d_" << j;
  for (std::size_t j = 0; j < fs.k; ++j) os << ",m_" << j;
  os << '\n';
  for (NodeId v = 0; v < fs.size(); ++v) {
    os << fs.labels[v] << ',' << fs.cluster[v] << ',' << fs.macro[v] << ',' << (fs.is_landmark[v] ? 1 : 0);
    for (Hop d : fs.d(v)) os << ',' << d;
    for (double x : fs.m(v)) os << ',' << format_real(x);
    os << '\n';
  }
}

/// JSONL: a header object, then one object per node with arrays "d" and "m".
inline void write_features_jsonl(std::ostream& os, const FeatureSet& fs) {
  os << detail::feature_header(fs).dump() << '\n';
  for (NodeId v = 0; v < fs.size(); ++v) {
    nlohmann::ordered_json r;
    r["node"] = fs.labels[v];
    r["cluster"] = fs.cluster[v];
    r["macro_cluster"] = fs.macro[v];
    r["is_landmark"] = static_cast<bool>(fs.is_landmark[v]);
    r["d"] = std::vector<Hop>(fs.d(v).begin(), fs.d(v).end());
    r["m"] = std::vector<double>(fs.m(v).begin(), fs.m(v).end());
    os << r.dump() << '\n';
  }
}

inline void write_features(std::ostream& os, const FeatureSet& fs, FeatureFormat f) {
  f == FeatureFormat::csv ? write_features_csv(os, fs) : write_features_jsonl(os, fs);
}

/// Sidecar metadata: header fields plus counts, timings and decision flags.
inline nlohmann::ordered_json feature_metadata(const FeatureSet& fs) {
  auto meta = detail::feature_header(fs);
  meta["t_auto"] = fs.t_auto;
  meta["nodes"] = fs.size();
  meta["edges"] = fs.edges;
  meta["k_base"] = fs.k_base;
  meta["centrality"] = fs.centrality;
  meta["eigenvalues"] = fs.eigenvalues;
  meta["decisions"] = {
      {"sentinel_rule", "max_finite_distance_plus_one"},
      {"k_rounding", "k_base_rounded_up_to_multiple_of_R"},
      {"k_rounded", fs.k_rounded},
      {"k_capped_at_n", fs.k_capped},
      {"k_adjusted", fs.k_adjusted},
      {"fluidc_converged", fs.converged},
      {"perturb_rounds", fs.perturb_rounds},
      {"repeated_eigenvalues", fs.repeated_eigenvalues},
  };
  meta["timings_ms"] = fs.timings_ms;
  return meta;
}

namespace detail {

template <typename T>
T parse_number(std::string_view s, std::size_t line, std::string_view what) {
  T x{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ParseError("bad " + std::string(what) + " '" + std::string(s) + "'", line);
  return x;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (true) {
    const auto j = line.find(',', i);
    out.push_back(line.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) return out;
    i = j + 1;
  }
}

inline FeatureSet read_features_csv(std::istream& in) {
  FeatureSet fs;
  std::string line;
  std::size_t lineno = 0;
  bool have_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    if (view.empty()) continue;
    if (view.starts_with("#")) {
      view.remove_prefix(1);
      while (!view.empty() && view.front() == ' ') view.remove_prefix(1);
      const auto eq = view.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = view.substr(0, eq), val = view.substr(eq + 1);
      if (key == "format" && val != kFeatureFormat)
        throw ParseError("unsupported format '" + std::string(val) + "'", lineno);
      if (key == "K") fs.k = parse_number<std::size_t>(val, lineno, "K");
      if (key == "R") fs.r = parse_number<std::size_t>(val, lineno, "R");
      if (key == "eta") fs.eta = parse_number<std::size_t>(val, lineno, "eta");
      if (key == "T") fs.t = parse_number<double>(val, lineno, "T");
      if (key == "seed") fs.seed = parse_number<std::uint64_t>(val, lineno, "seed");
      if (key == "sentinel") fs.sentinel = parse_number<Hop>(val, lineno, "sentinel");
      if (key == "random_sign_flip") fs.random_sign_flip = val == "1";
      continue;
    }
    const auto cols = split_commas(view);
    if (!have_columns) {
      if (fs.k == 0) throw ParseError("missing K header", lineno);
      if (cols.size() != 4 + 2 * fs.k || cols[0] != "node")
        throw ParseError("column header does not match K=" + std::to_string(fs.k), lineno);
      have_columns = true;
      continue;
    }
    if (cols.size() != 4 + 2 * fs.k)
      throw ParseError("expected " + std::to_string(4 + 2 * fs.k) + " fields, got " + std::to_string(cols.size()),
                       lineno);
    fs.labels.emplace_back(cols[0]);
    fs.cluster.push_back(parse_number<std::uint32_t>(cols[1], lineno, "cluster"));
    fs.macro.push_back(parse_number<std::uint32_t>(cols[2], lineno, "macro_cluster"));
    fs.is_landmark.push_back(parse_number<int>(cols[3], lineno, "is_landmark") != 0);
    for (std::size_t j = 0; j < fs.k; ++j) fs.distances.push_back(parse_number<Hop>(cols[4 + j], lineno, "distance"));
    for (std::size_t j = 0; j < fs.k; ++j)
      fs.memberships.push_back(parse_number<double>(cols[4 + fs.k + j], lineno, "membership"));
  }
  if (!have_columns) throw ParseError("feature file has no column header", lineno);
  return fs;
}

inline FeatureSet read_features_jsonl(std::istream& in) {
  FeatureSet fs;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      if (!have_header) {
        if (j.at("format").get<std::string>() != kFeatureFormat) throw ParseError("unsupported format", lineno);
        fs.k = j.at("K");
        fs.r = j.at("R");
        fs.eta = j.at("eta");
        fs.t = j.at("T");
        fs.seed = j.at("seed");
        fs.sentinel = j.at("sentinel");
        fs.random_sign_flip = j.at("random_sign_flip");
        have_header = true;
        continue;
      }
      const auto d = j.at("d").get<std::vector<Hop>>();
      const auto m = j.at("m").get<std::vector<double>>();
      if (d.size() != fs.k || m.size() != fs.k) throw ParseError("vector length differs from K", lineno);
      fs.labels.push_back(j.at("node").get<std::string>());
      fs.cluster.push_back(j.at("cluster"));
      fs.macro.push_back(j.at("macro_cluster"));
      fs.is_landmark.push_back(j.at("is_landmark").get<bool>());
      fs.distances.insert(fs.distances.end(), d.begin(), d.end());
      fs.memberships.insert(fs.memberships.end(), m.begin(), m.end());
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!have_header) throw ParseError("feature file is empty", 0);
  return fs;
}

}  // namespace detail

/// Reads either format, chosen by the first byte.
inline FeatureSet read_features(std::istream& in) {
  return in.peek() == '{' ? detail::read_features_jsonl(in) : detail::read_features_csv(in);
}

}  // namespace hplc
