// Command-line front-end: feature selection, evaluation sweeps, ablations and
// convergence traces for tabular CSV datasets.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "hpwl/dataset.hpp"
#include "hpwl/errors.hpp"
#include "hpwl/eval.hpp"
#include "hpwl/io.hpp"
#include "hpwl/log.hpp"
#include "hpwl/solver.hpp"
#include "svg_chart.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string input;
  std::optional<std::string> label_column;
  bool has_header = true;
  bool standardize = true;
  std::string output_dir = ".";
  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  hpwl::HpwlParams params;
  hpwl::Variant variant = hpwl::Variant::full;
  bool emit_svg = false;
  int knn_k = 5;
  bool dump_hypergraph = false;
  std::vector<double> grid_tau, grid_rho, grid_kappa;
};

// Command-line values start unset so that explicit flags win over the config file.
struct CliOverrides {
  std::string config_path;
  std::optional<std::string> input, label_column, output_dir, variant;
  std::optional<bool> has_header, standardize, emit_svg, dump_hypergraph;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<double> tau, rho, kappa, tol;
  std::optional<int> rank_r, embed_k, l, m, outer_max, inner_max, knn_k;
  std::vector<double> grid_tau, grid_rho, grid_kappa;
};

void add_common_options(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON config file; flags override its values");
  cmd->add_option("-i,--input", o.input, "input CSV file");
  cmd->add_option("--label-column", o.label_column, "label column (header name or 0-based index)");
  cmd->add_option("-o,--output-dir", o.output_dir, "directory for result files");
  cmd->add_flag("--header,!--no-header", o.has_header, "first row is a header (default: yes)");
  cmd->add_flag("--standardize,!--no-standardize", o.standardize,
                "standardize features before selection (default: yes)");
  cmd->add_option("--tau", o.tau, "global-structure term weight");
  cmd->add_option("--rho", o.rho, "row-sparsity term weight");
  cmd->add_option("--kappa", o.kappa, "hyperedge-weight regularizer");
  cmd->add_option("--rank-r", o.rank_r, "transform rank bound (0 = embed-k)");
  cmd->add_option("--embed-k", o.embed_k, "embedding dimension (0 = auto)");
  cmd->add_option("--neighbors", o.l, "centroid neighbors per hyperedge");
  cmd->add_option("--centroids", o.m, "cluster count (0 = n/10)");
  cmd->add_option("--outer-max", o.outer_max, "outer iteration cap");
  cmd->add_option("--inner-max", o.inner_max, "inner refinement cap");
  cmd->add_option("--tol", o.tol, "convergence threshold");
}

std::vector<std::uint64_t> to_u64_vector(const json& j) {
  std::vector<std::uint64_t> v;
  for (const auto& e : j) v.push_back(e.get<std::uint64_t>());
  return v;
}

RunConfig build_config(const CliOverrides& o) {
  json cfg = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw hpwl::ConfigError("cannot open config file: " + o.config_path);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw hpwl::ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
  }

  RunConfig rc;
  rc.input = o.input ? *o.input : cfg.value("input", std::string{});
  if (rc.input.empty()) throw hpwl::ConfigError("no input file given (flag --input or config)");
  if (o.label_column)
    rc.label_column = *o.label_column;
  else if (cfg.contains("label_column"))
    rc.label_column = cfg["label_column"].get<std::string>();
  rc.has_header = o.has_header ? *o.has_header : cfg.value("has_header", true);
  rc.standardize = o.standardize ? *o.standardize : cfg.value("standardize", true);
  rc.output_dir = o.output_dir ? *o.output_dir : cfg.value("output_dir", std::string("."));
  rc.seed = o.seed ? *o.seed : cfg.value("seed", std::uint64_t{1});
  if (o.seeds)
    rc.seeds = *o.seeds;
  else if (cfg.contains("seeds"))
    rc.seeds = to_u64_vector(cfg["seeds"]);
  rc.variant = hpwl::variant_from_string(o.variant ? *o.variant : cfg.value("variant", "full"));
  rc.emit_svg = o.emit_svg ? *o.emit_svg : cfg.value("emit_svg", false);
  rc.knn_k = o.knn_k ? *o.knn_k : cfg.value("knn_k", 5);
  rc.dump_hypergraph = o.dump_hypergraph ? *o.dump_hypergraph : cfg.value("dump_hypergraph", false);

  const json p = cfg.value("params", json::object());
  rc.params.tau = o.tau ? *o.tau : p.value("tau", rc.params.tau);
  rc.params.rho = o.rho ? *o.rho : p.value("rho", rc.params.rho);
  rc.params.kappa = o.kappa ? *o.kappa : p.value("kappa", rc.params.kappa);
  rc.params.rank_r = o.rank_r ? *o.rank_r : p.value("rank_r", rc.params.rank_r);
  rc.params.embed_k = o.embed_k ? *o.embed_k : p.value("embed_k", rc.params.embed_k);
  rc.params.l = o.l ? *o.l : p.value("l", rc.params.l);
  rc.params.m = o.m ? *o.m : p.value("m", rc.params.m);
  rc.params.outer_max = o.outer_max ? *o.outer_max : p.value("outer_max", rc.params.outer_max);
  rc.params.inner_pq_max =
      o.inner_max ? *o.inner_max : p.value("inner_pq_max", rc.params.inner_pq_max);
  rc.params.tol = o.tol ? *o.tol : p.value("tol", rc.params.tol);
  rc.params.validate();

  rc.grid_tau = !o.grid_tau.empty() ? o.grid_tau
                                    : cfg.value("grid_tau", std::vector<double>{});
  rc.grid_rho = !o.grid_rho.empty() ? o.grid_rho
                                    : cfg.value("grid_rho", std::vector<double>{});
  rc.grid_kappa = !o.grid_kappa.empty() ? o.grid_kappa
                                        : cfg.value("grid_kappa", std::vector<double>{});

  if (!fs::exists(rc.input)) throw hpwl::ConfigError("input file does not exist: " + rc.input);
  fs::create_directories(rc.output_dir);
  return rc;
}

// Removes everything this run wrote when it fails partway.
class OutputTracker {
 public:
  fs::path track(const fs::path& p) {
    paths_.push_back(p);
    return p;
  }
  void discard_all() {
    std::error_code ec;
    for (const auto& p : paths_) fs::remove(p, ec);
  }

 private:
  std::vector<fs::path> paths_;
};

hpwl::DataMatrix load_input(const RunConfig& rc) {
  hpwl::DataMatrix data = hpwl::load_csv(rc.input, rc.has_header, rc.label_column);
  return data;
}

int cmd_select(const RunConfig& rc, bool ranking_output) {
  OutputTracker outputs;
  try {
    hpwl::DataMatrix data = load_input(rc);
    if (rc.standardize) data = hpwl::standardize(data);

    hpwl::SolverState state;
    const hpwl::FeatureRanking ranking = hpwl::fit(data, rc.params, rc.seed, rc.variant, &state);

    const fs::path dir(rc.output_dir);
    if (ranking_output)
      hpwl::write_ranking_csv(outputs.track(dir / "ranking.csv"), ranking, data.feature_names);
    hpwl::write_trace_csv(outputs.track(dir / "trace.csv"), state);
    if (rc.dump_hypergraph) {
      hpwl::write_matrix_csv(outputs.track(dir / "incidence.csv"), state.hypergraph.incidence);
      hpwl::write_matrix_csv(outputs.track(dir / "edge_weights.csv"),
                             state.hypergraph.weights.transpose());
      hpwl::write_matrix_csv(outputs.track(dir / "laplacian.csv"),
                             hpwl::laplacian(state.hypergraph));
    }
    std::cout << "converged after " << state.iterations << " iteration(s); results in "
              << rc.output_dir << "\n";
    return 0;
  } catch (...) {
    outputs.discard_all();
    throw;
  }
}

void write_sweep_outputs(const RunConfig& rc, const hpwl::SweepResult& result,
                         OutputTracker& outputs) {
  const fs::path dir(rc.output_dir);
  hpwl::write_sweep_csv(outputs.track(dir / "sweep.csv"), result);
  hpwl::write_summary_json(outputs.track(dir / "summary.json"), result);
  if (rc.emit_svg) {
    std::vector<double> mean(result.mean.data(), result.mean.data() + result.mean.size());
    std::vector<double> stddev(result.stddev.data(),
                               result.stddev.data() + result.stddev.size());
    hpwl::tools::write_accuracy_chart(outputs.track(dir / "accuracy_vs_features.svg"),
                                      result.feature_counts, mean, stddev,
                                      "KNN accuracy vs. selected features (" +
                                          hpwl::to_string(result.variant) + ")");
  }
}

int cmd_sweep(const RunConfig& rc) {
  OutputTracker outputs;
  try {
    const hpwl::DataMatrix data = load_input(rc);
    if (!data.labels)
      throw hpwl::ConfigError("the sweep protocol needs labels; pass --label-column");

    const bool grid = !rc.grid_tau.empty() || !rc.grid_rho.empty() || !rc.grid_kappa.empty();
    if (!grid) {
      const hpwl::SweepResult result =
          hpwl::run_sweep(data, rc.params, rc.variant, rc.seeds, rc.knn_k, rc.standardize);
      write_sweep_outputs(rc, result, outputs);
      std::cout << "sweep finished; results in " << rc.output_dir << "\n";
      return 0;
    }

    // Grid enumeration: keep the combination with the best overall mean accuracy.
    const auto taus = rc.grid_tau.empty() ? std::vector<double>{rc.params.tau} : rc.grid_tau;
    const auto rhos = rc.grid_rho.empty() ? std::vector<double>{rc.params.rho} : rc.grid_rho;
    const auto kappas =
        rc.grid_kappa.empty() ? std::vector<double>{rc.params.kappa} : rc.grid_kappa;

    std::ofstream grid_csv(outputs.track(fs::path(rc.output_dir) / "grid.csv"));
    grid_csv << "tau,rho,kappa,mean_accuracy\n";
    double best_score = -1.0;
    hpwl::SweepResult best;
    hpwl::HpwlParams best_params = rc.params;
    for (double tau : taus)
      for (double rho : rhos)
        for (double kappa : kappas) {
          hpwl::HpwlParams params = rc.params;
          params.tau = tau;
          params.rho = rho;
          params.kappa = kappa;
          const hpwl::SweepResult result =
              hpwl::run_sweep(data, params, rc.variant, rc.seeds, rc.knn_k, rc.standardize);
          const double score = result.mean.mean();
          grid_csv << hpwl::format_double(tau) << ',' << hpwl::format_double(rho) << ','
                   << hpwl::format_double(kappa) << ',' << hpwl::format_double(score) << '\n';
          if (score > best_score) {
            best_score = score;
            best = result;
            best_params = params;
          }
        }
    grid_csv.close();
    write_sweep_outputs(rc, best, outputs);
    std::cout << "grid sweep finished; best tau=" << best_params.tau << " rho=" << best_params.rho
              << " kappa=" << best_params.kappa << " (mean accuracy "
              << hpwl::format_double(best_score) << "); results in " << rc.output_dir << "\n";
    return 0;
  } catch (...) {
    outputs.discard_all();
    throw;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unsupervised feature selection via soft-hypergraph point weighting "
               "and low-rank transforms"};
  app.require_subcommand(1);

  CliOverrides select_o, sweep_o, ablate_o, trace_o;

  CLI::App* select = app.add_subcommand("select", "rank the features of a CSV dataset");
  add_common_options(select, select_o);
  select->add_option("--seed", select_o.seed, "random seed");
  select->add_option("--variant", select_o.variant, "selector variant (default full)");
  select->add_flag("--dump-hypergraph", select_o.dump_hypergraph,
                   "also write incidence/weights/laplacian CSV dumps");

  CLI::App* sweep = app.add_subcommand(
      "sweep", "half-split KNN evaluation across feature counts (labeled data)");
  add_common_options(sweep, sweep_o);
  sweep->add_option("--seeds", sweep_o.seeds, "split seeds, one repeat each")->delimiter(',');
  sweep->add_option("--knn-k", sweep_o.knn_k, "KNN neighbor count");
  sweep->add_flag("--emit-svg", sweep_o.emit_svg, "write accuracy_vs_features.svg");
  sweep->add_option("--grid-tau", sweep_o.grid_tau, "tau grid values")->delimiter(',');
  sweep->add_option("--grid-rho", sweep_o.grid_rho, "rho grid values")->delimiter(',');
  sweep->add_option("--grid-kappa", sweep_o.grid_kappa, "kappa grid values")->delimiter(',');

  CLI::App* ablate =
      app.add_subcommand("ablate", "evaluation sweep with an ablated selector variant");
  add_common_options(ablate, ablate_o);
  ablate->add_option("--seeds", ablate_o.seeds, "split seeds")->delimiter(',');
  ablate->add_option("--knn-k", ablate_o.knn_k, "KNN neighbor count");
  ablate->add_flag("--emit-svg", ablate_o.emit_svg, "write accuracy_vs_features.svg");
  ablate->add_option("--variant", ablate_o.variant, "identity_d | binary_h | no_global")
      ->required();

  CLI::App* trace = app.add_subcommand("trace", "emit the convergence series only");
  add_common_options(trace, trace_o);
  trace->add_option("--seed", trace_o.seed, "random seed");
  trace->add_option("--variant", trace_o.variant, "selector variant (default full)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (select->parsed()) return cmd_select(build_config(select_o), /*ranking_output=*/true);
    if (sweep->parsed()) return cmd_sweep(build_config(sweep_o));
    if (ablate->parsed()) return cmd_sweep(build_config(ablate_o));
    if (trace->parsed()) return cmd_select(build_config(trace_o), /*ranking_output=*/false);
  } catch (const hpwl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const hpwl::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
