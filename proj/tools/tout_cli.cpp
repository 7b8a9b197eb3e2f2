// tout: benchmark driver for uncertainty-aware tree search.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "tout/error.hpp"
#include "tout/game24.hpp"
#include "tout/harness.hpp"

namespace {

constexpr int kExitAborted = 1;
constexpr int kExitConfig = 2;

struct Options {
  tout::RunConfig run;
  std::string method = "tout_bfs";
  std::string format = "markdown";
  std::string api_base;
  std::string api_key;
  std::string model;
  std::vector<int> ms{5, 10, 20, 50, 100};
};

void add_run_options(CLI::App& app, Options& o) {
  auto& r = o.run;
  auto& s = r.search;
  app.add_option("--task", r.task, "game24 | crosswords | synthetic")->capture_default_str();
  app.add_option("--method", o.method, "io | cot | cot_sc | tot_bfs | tot_dfs | tout_bfs | tout_dfs")
      ->capture_default_str();
  app.add_option("--backend", r.backend, "http | scripted | synthetic")->capture_default_str();
  app.add_option("--dataset", r.dataset, "puzzle file (CSV for game24, JSON for crosswords)");
  app.add_option("--first", r.first, "first episode index (inclusive)");
  app.add_option("--last", r.last, "last episode index (inclusive)");
  app.add_option("--output-dir", r.output_dir, "directory for transcripts and results")->capture_default_str();
  app.add_option("--run-id", r.run_id, "transcript and result file stem");
  app.add_option("--jobs", r.jobs, "episodes run in parallel")->capture_default_str();
  app.add_option("--script", r.script, "scripted backend table (JSON)");
  app.add_option("--cache-dir", r.cache_dir, "on-disk response cache");
  app.add_option("--api-base", o.api_base, "HTTP endpoint base URL (default $TOUT_API_BASE)");
  app.add_option("--api-key", o.api_key, "bearer token (default $TOUT_API_KEY)");
  app.add_option("--model", o.model, "model name (default $TOUT_MODEL)");
  app.add_option("--synthetic-trees", r.synthetic_trees)->capture_default_str();
  app.add_option("--synthetic-family-seed", r.synthetic_family_seed)->capture_default_str();
  app.add_option("--format", o.format, "stdout table format: csv | markdown")->capture_default_str();

  app.add_option("--k", s.k, "proposals per expansion")->capture_default_str();
  app.add_option("--b", s.b, "breadth kept per BFS step")->capture_default_str();
  app.add_option("--steps", s.steps, "step budget, 0 for the task default")->capture_default_str();
  app.add_option("--m", s.m, "value samples per state")->capture_default_str();
  app.add_option("--t-min", s.t_min)->capture_default_str();
  app.add_option("--t-max", s.t_max)->capture_default_str();
  app.add_option("--v-th", s.v_th, "DFS value threshold")->capture_default_str();
  app.add_option("--u-th", s.u_th, "DFS uncertainty threshold")->capture_default_str();
  app.add_option("--epsilon", s.epsilon)->capture_default_str();
  app.add_option("--luq-enabled", s.luq_enabled, "sample values across temperatures")->capture_default_str();
  app.add_option("--ugs-enabled", s.ugs_enabled, "rank by value over uncertainty")->capture_default_str();
  app.add_option("--seed", s.seed)->capture_default_str();
  app.add_option("--max-outputs", s.max_outputs, "DFS outputs recorded before stopping")->capture_default_str();
  app.add_option("--propose-temperature", s.propose_temperature)->capture_default_str();
  app.add_option("--final-temperature", s.final_temperature)->capture_default_str();
  app.add_option("--two-pass-value", s.two_pass_value, "draw the value from a second sample set")
      ->capture_default_str();
  app.add_option("--max-tokens", s.max_tokens)->capture_default_str();
  app.add_option("--n-chains", s.n_chains, "chains for cot_sc")->capture_default_str();
  app.add_option("--eval-jobs", s.eval_jobs, "concurrent state evaluations")->capture_default_str();
}

tout::RunConfig finish(Options& o) {
  tout::RunConfig config = o.run;
  config.method = tout::parse_method(o.method);
  config.http = tout::HttpBackendOptions::from_env(config.http);
  if (!o.api_base.empty()) config.http.base_url = o.api_base;
  if (!o.api_key.empty()) config.http.api_key = o.api_key;
  if (!o.model.empty()) config.http.model = o.model;
  if (o.format != "csv" && o.format != "markdown") {
    throw tout::ConfigError("unknown --format '" + o.format + "' (supported: csv, markdown)");
  }
  config.validate();
  return config;
}

void report(const std::vector<tout::ResultRow>& rows, const Options& o) {
  std::cout << tout::emit_results(rows, o.format);
}

int check_dataset(const tout::RunConfig& config) {
  if (config.dataset.empty()) throw tout::ConfigError("--dataset is required");
  int bad = 0;
  int unsolvable = 0;
  int checked = 0;
  for (const auto& puzzle : tout::game24::load_puzzles_csv(config.dataset)) {
    if (config.first && puzzle.index < *config.first) continue;
    if (config.last && puzzle.index > *config.last) continue;
    ++checked;
    auto witness = tout::game24::brute_force_solvable(puzzle);
    if (!witness) {
      ++unsolvable;
      std::cout << puzzle.index << ' ' << puzzle.to_string() << " unsolvable\n";
      continue;
    }
    const std::string candidate = witness->to_string() + " = 24";
    auto verdict = tout::game24::check_solution(candidate, puzzle);
    if (!verdict) ++bad;
    std::cout << puzzle.index << ' ' << puzzle.to_string() << ' ' << candidate << (verdict ? "" : " CHECK FAILED: ")
              << verdict.reason << '\n';
  }
  std::cout << checked << " puzzles, " << unsolvable << " unsolvable, " << bad << " witnesses rejected\n";
  return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware tree search benchmarks"};
  app.set_config("--config", "", "TOML config file; keys mirror the long flags");
  app.require_subcommand(1);

  Options run_opts, ablate_opts, sweep_opts, check_opts;
  auto* run = app.add_subcommand("run", "run one method over a dataset");
  add_run_options(*run, run_opts);
  auto* ablate = app.add_subcommand("ablate", "run the four estimation/selection on-off combinations");
  add_run_options(*ablate, ablate_opts);
  auto* sweep = app.add_subcommand("sweep-m", "repeat a run for several sample counts");
  add_run_options(*sweep, sweep_opts);
  sweep->add_option("--ms", sweep_opts.ms, "sample counts")->delimiter(',')->capture_default_str();
  auto* check = app.add_subcommand("check", "brute-force every Game of 24 puzzle in a CSV");
  check->add_option("--dataset", check_opts.run.dataset)->required();
  check->add_option("--first", check_opts.run.first);
  check->add_option("--last", check_opts.run.last);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*check) return check_dataset(check_opts.run);
    if (*run) {
      auto config = finish(run_opts);
      report(tout::run_benchmark(config), run_opts);
    } else if (*ablate) {
      auto config = finish(ablate_opts);
      report(tout::run_ablation(config), ablate_opts);
    } else if (*sweep) {
      auto config = finish(sweep_opts);
      report(tout::run_m_sweep(config, sweep_opts.ms), sweep_opts);
    }
    return 0;
  } catch (const tout::RunAborted& e) {
    std::cerr << "tout: " << e.what() << '\n';
    std::cout << tout::emit_results(e.partial(), "markdown");
    return kExitAborted;
  } catch (const tout::ConfigError& e) {
    std::cerr << "tout: invalid configuration: " << e.what() << '\n';
    return kExitConfig;
  } catch (const tout::LoadError& e) {
    std::cerr << "tout: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "tout: " << e.what() << '\n';
    return kExitAborted;
  }
}
