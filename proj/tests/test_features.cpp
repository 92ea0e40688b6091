#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hplc/features.hpp"
#include "hplc/randgraph.hpp"

using namespace hplc;

namespace {

Graph two_triangles() {
  std::istringstream in("a b\nb c\nc a\nd e\ne f\nf d\nc d\n");
  return load_edge_list(in).graph;
}

void expect_same_records(const FeatureSet& a, const FeatureSet& b) {
  EXPECT_EQ(a.k, b.k);
  EXPECT_EQ(a.r, b.r);
  EXPECT_EQ(a.eta, b.eta);
  EXPECT_EQ(a.t, b.t);
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.sentinel, b.sentinel);
  EXPECT_EQ(a.random_sign_flip, b.random_sign_flip);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.cluster, b.cluster);
  EXPECT_EQ(a.macro, b.macro);
  EXPECT_EQ(a.is_landmark, b.is_landmark);
  EXPECT_EQ(a.distances, b.distances);
  EXPECT_EQ(a.memberships, b.memberships);
}

}  // namespace

TEST(Preprocess, TwoTriangles) {
  PreprocessOptions o;
  o.eta = 1;
  const auto fs = preprocess(two_triangles(), o);
  EXPECT_EQ(fs.k, 2u);
  EXPECT_EQ(fs.r, 2u);
  EXPECT_EQ(fs.size(), 6u);
  EXPECT_EQ(fs.labels[0], "a");
  EXPECT_EQ(fs.sentinel, 3u);
  EXPECT_EQ(fs.t, 1.0);
  EXPECT_NO_THROW(validate_features(fs));
  std::size_t landmarks = 0;
  for (NodeId v = 0; v < 6; ++v) {
    landmarks += fs.is_landmark[v];
    for (double x : fs.m(v)) EXPECT_NEAR(std::abs(x), std::sqrt(0.5), 1e-12);
  }
  EXPECT_EQ(landmarks, 2u);
  // Landmarks are the bridge endpoints c and d.
  EXPECT_TRUE(fs.is_landmark[2]);
  EXPECT_TRUE(fs.is_landmark[3]);
}

TEST(Preprocess, RecordsAreConsistentOnBaGraph) {
  PreprocessOptions o;
  o.eta = 3;
  o.seed = 12;
  const auto g = gen_ba(800, 3, 4);
  const auto fs = preprocess(g, o);
  validate_features(fs);
  EXPECT_EQ(fs.k % fs.r, 0u);
  EXPECT_EQ(fs.distances.size(), 800u * fs.k);
  EXPECT_EQ(fs.memberships.size(), 800u * fs.k);
  // Nodes in the same cluster share their membership row.
  std::vector<int> first(fs.k, -1);
  for (NodeId v = 0; v < 800; ++v) {
    auto& f = first[fs.cluster[v]];
    if (f < 0) {
      f = static_cast<int>(v);
      continue;
    }
    const auto a = fs.m(v), b = fs.m(static_cast<NodeId>(f));
    ASSERT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    ASSERT_EQ(fs.macro[v], fs.macro[static_cast<NodeId>(f)]);
  }
}

TEST(Preprocess, SignFlipIsSeeded) {
  PreprocessOptions o;
  o.eta = 2;
  o.random_sign_flip = true;
  o.seed = 3;
  const auto g = gen_ba(300, 2, 1);
  const auto a = preprocess(g, o), b = preprocess(g, o);
  EXPECT_EQ(a.memberships, b.memberships);
  o.random_sign_flip = false;
  const auto c = preprocess(g, o);
  // Flips only change signs.
  for (std::size_t i = 0; i < a.memberships.size(); ++i)
    ASSERT_EQ(std::abs(a.memberships[i]), std::abs(c.memberships[i]));
}

TEST(Preprocess, SingleClusterGraph) {
  std::istringstream in("0 1\n");
  PreprocessOptions o;
  o.eta = 1;
  const auto fs = preprocess(load_edge_list(in).graph, o);
  EXPECT_EQ(fs.k, 1u);
  EXPECT_EQ(fs.t, 0.0);
  EXPECT_EQ(fs.memberships, (std::vector<double>{1.0, 1.0}));
  validate_features(fs);
}

TEST(FeatureFile, CsvRoundTripIsExact) {
  PreprocessOptions o;
  o.eta = 2;
  o.random_sign_flip = true;
  const auto fs = preprocess(gen_er(400, 4, 7), o);
  std::stringstream ss;
  write_features(ss, fs, FeatureFormat::csv);
  const auto text = ss.str();
  EXPECT_EQ(text.rfind("# format=hplc-features/1\n", 0), 0u);
  std::istringstream in(text);
  const auto back = read_features(in);
  expect_same_records(fs, back);
  validate_features(back);
  std::ostringstream again;
  write_features(again, back, FeatureFormat::csv);
  EXPECT_EQ(again.str(), text);
}

TEST(FeatureFile, JsonlRoundTripIsExact) {
  PreprocessOptions o;
  o.eta = 2;
  const auto fs = preprocess(gen_ba(300, 2, 7), o);
  std::stringstream ss;
  write_features(ss, fs, FeatureFormat::jsonl);
  std::istringstream in(ss.str());
  const auto back = read_features(in);
  expect_same_records(fs, back);
  std::size_t lines = 0;
  std::istringstream count(ss.str());
  for (std::string line; std::getline(count, line);) {
    const auto j = nlohmann::json::parse(line);
    if (lines++ == 0) continue;
    EXPECT_EQ(j["d"].size(), fs.k);
    EXPECT_EQ(j["m"].size(), fs.k);
  }
  EXPECT_EQ(lines, 301u);
}

TEST(FeatureFile, MalformedInputReportsLine) {
  std::istringstream in("# format=hplc-features/1\n# K=2\n# R=2\n# eta=1\n# T=1\n# seed=0\n# sentinel=3\n"
                        "# random_sign_flip=0\nnode,cluster,macro_cluster,is_landmark,d_0,d_1,m_0,m_1\n"
                        "a,0,0,1,0,1,0.5\n");
  try {
    read_features(in);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 10u);
  }
}

TEST(FeatureFile, ValidateCatchesBadRecords) {
  PreprocessOptions o;
  o.eta = 1;
  auto fs = preprocess(two_triangles(), o);
  fs.macro[0] = 1 - fs.macro[0];
  EXPECT_THROW(validate_features(fs), std::logic_error);
}

TEST(Metadata, CarriesDecisions) {
  PreprocessOptions o;
  o.eta = 1;
  const auto meta = feature_metadata(preprocess(two_triangles(), o));
  EXPECT_EQ(meta["format"], "hplc-features/1");
  EXPECT_EQ(meta["K"], 2);
  for (const char* key : {"sentinel_rule", "k_rounding", "k_rounded", "k_capped_at_n", "k_adjusted", "fluidc_converged",
                          "perturb_rounds", "repeated_eigenvalues"})
    EXPECT_TRUE(meta["decisions"].contains(key)) << key;
  EXPECT_TRUE(meta["timings_ms"].contains("partition"));
  EXPECT_THROW(parse_feature_format("xml"), std::invalid_argument);
}
