#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hplc/cli.hpp"

namespace cli = hplc::cli;

int main(int argc, char** argv) {
  CLI::App app{"Landmark and cluster positional encodings for graphs, random-graph detour lab, link evaluation"};
  app.set_config("--config", "", "TOML file with flag values; command-line flags win");
  app.require_subcommand(1);

  cli::PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Partition, pick landmarks and write per-node features");
  c_pre->add_option("input", pre.input, "Edge list")->required();
  c_pre->add_option("--eta", pre.eta, "K = ceil(eta ln N)")->capture_default_str()->check(CLI::PositiveNumber);
  c_pre->add_option("--centrality", pre.centrality, "degree | betweenness | closeness")->capture_default_str();
  c_pre->add_flag("--induced-centrality", pre.induced_centrality, "Score centrality inside each cluster");
  c_pre->add_option("--heat-t", pre.heat_t, "Heat-kernel temperature or 'auto'")->capture_default_str();
  c_pre->add_flag("--random-sign-flip", pre.random_sign_flip, "Flip eigenvector signs at random (seeded)");
  c_pre->add_option("--seed", pre.seed, "Root seed")->capture_default_str();
  c_pre->add_option("--out", pre.out, "Feature file path")->required();
  c_pre->add_option("--format", pre.format, "csv | jsonl")->capture_default_str()->check(CLI::IsMember({"csv", "jsonl"}));
  c_pre->add_option("--eta-sweep", pre.eta_sweep, "Comma-separated eta values, one output each")->delimiter(',');
  c_pre->add_option("--threads", pre.threads, "BFS worker threads")->capture_default_str();

  cli::SimulateArgs sim;
  std::optional<double> beta;
  auto* c_sim = app.add_subcommand("simulate", "Measure landmark detours on random graphs against the closed forms");
  c_sim->add_option("--model", sim.model, "er | ba | hidden")->capture_default_str();
  c_sim->add_option("--n", sim.n, "Nodes")->capture_default_str();
  c_sim->add_option("--k-avg", sim.k_avg, "ER mean degree")->capture_default_str();
  c_sim->add_option("--m", sim.m, "BA edges per arrival")->capture_default_str();
  c_sim->add_option("--beta", beta, "Hidden-variable beta (default 2/m with --h-dist ba)");
  c_sim->add_option("--h-dist", sim.h_dist, "Hidden-variable distribution: ba");
  c_sim->add_option("--h-file", sim.h_file, "Hidden variables, one per line");
  c_sim->add_option("--strategy", sim.strategy, "uniform | top-degree | cluster-hplc")->capture_default_str();
  c_sim->add_option("--k", sim.k, "Landmark count, 'logn', 'sqrt', or 'auto' (cluster-hplc)")->capture_default_str();
  c_sim->add_option("--pool", sim.pool, "top-degree pool size (0: ceil(ln N * K))")->capture_default_str();
  c_sim->add_option("--eta", sim.eta, "eta for cluster-hplc with --k auto")->capture_default_str();
  c_sim->add_option("--pairs", sim.pairs, "Sampled pairs per seed")->capture_default_str();
  c_sim->add_option("--seeds", sim.seeds, "Independent graphs")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "Root seed")->capture_default_str();
  c_sim->add_option("--out", sim.out, "CSV path (stdout if omitted)");

  cli::BoundsArgs bnd;
  std::optional<double> h2_q;
  auto* c_bnd = app.add_subcommand("bounds", "Print closed-form detour bound and mean shortest path");
  c_bnd->add_option("--model", bnd.model, "er | ba")->capture_default_str();
  c_bnd->add_option("--n", bnd.n, "Nodes")->capture_default_str();
  c_bnd->add_option("--k-avg", bnd.k_avg, "ER mean degree")->capture_default_str();
  c_bnd->add_option("--m", bnd.m, "BA edges per arrival (with --h2-q)")->capture_default_str();
  c_bnd->add_option("--k", bnd.k, "Landmark count, 'logn' or 'sqrt'")->capture_default_str();
  c_bnd->add_option("--h2-q", h2_q, "BA landmark second moment (default: top-hub selection)");

  cli::RankArgs rank;
  auto* c_rank = app.add_subcommand("landmark-rank", "Degree rank of cluster landmarks in BA graphs");
  c_rank->add_option("--n-list", rank.n_list, "Comma-separated graph sizes")->delimiter(',')->capture_default_str();
  c_rank->add_option("--m", rank.m, "BA edges per arrival")->capture_default_str();
  c_rank->add_option("--eta", rank.eta, "Cluster count multiplier")->capture_default_str();
  c_rank->add_option("--seeds", rank.seeds, "Graphs per size")->capture_default_str();
  c_rank->add_option("--seed", rank.seed, "Root seed")->capture_default_str();
  c_rank->add_option("--out", rank.out, "CSV path (stdout if omitted)");

  cli::EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Heuristic link-prediction score on a random edge split");
  c_eval->add_option("input", ev.input, "Edge list")->required();
  c_eval->add_option("--split", ev.split, "train/valid/test percentages")->capture_default_str();
  c_eval->add_option("--scorer", ev.scorer, "aa | cn | detour")->capture_default_str();
  c_eval->add_option("--metric", ev.metric, "auc | hits@K | mrr")->capture_default_str();
  c_eval->add_option("--negatives", ev.negatives, "MRR negatives per positive")->capture_default_str();
  c_eval->add_option("--eta", ev.eta, "eta for the detour scorer")->capture_default_str();
  c_eval->add_option("--seed", ev.seed, "Root seed")->capture_default_str();
  c_eval->add_option("--out", ev.out, "JSON path (stdout if omitted)");
  c_eval->add_option("--pairs-out", ev.pairs_out, "Scored test pairs as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsage;
  }

  return cli::guarded(std::cerr, [&] {
    if (*c_pre) {
      cli::preprocess(pre, std::cout, std::cerr);
    } else if (*c_sim) {
      sim.beta = beta;
      cli::simulate(sim, std::cout);
    } else if (*c_bnd) {
      bnd.h2_q = h2_q;
      std::cout << cli::bounds_line(bnd) << '\n';
    } else if (*c_rank) {
      cli::landmark_rank(rank, std::cout);
    } else if (*c_eval) {
      cli::eval(ev, std::cout);
    }
  });
}
