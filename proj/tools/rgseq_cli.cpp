// Command-line front end: evaluate / exhaustive / optimize / simulate / theory.
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgseq/harness.hpp"
#include "rgseq/parallel.hpp"
#include "rgseq/theory.hpp"

namespace {

using namespace rgseq;

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    write_text_file(out_path, content);
}

std::string ranking_csv(const ProblemScenario& s) {
  const auto ranking = exhaustive_ranking(s);
  std::ostringstream os;
  os << "# seed=0 format_version=" << kFormatVersion << "\n";
  os << "rank,sequence,u,logit\n";
  std::uint64_t rank = 1;
  char buf[64];
  for (const auto& [x, u] : ranking) {
    auto fmt = [&](double v) {
      auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      return ec == std::errc() ? std::string(buf, p) : std::string("nan");
    };
    os << rank++ << ',' << sequence_to_string(x) << ',' << fmt(u) << ',' << fmt(logit_of(u))
       << '\n';
  }
  return os.str();
}

std::string theory_csv(int R, int delta, int m_max) {
  std::ostringstream os;
  os << "# seed=0 format_version=" << kFormatVersion << "\n";
  os << "R,delta,M,probability,closed_form\n";
  char buf[64];
  auto fmt = [&](double v) {
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, p) : std::string("nan");
  };
  for (int m = 1; m <= m_max; ++m) {
    os << R << ',' << delta << ',' << m << ',' << fmt(prob_optimal_in_top_m(R, delta, m)) << ',';
    if (delta <= R - 1) os << fmt(prob_corollary(R, delta, m));
    os << '\n';
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequencing reliability-growth tasks with a ranking-model surrogate"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("--workers", workers, "Worker threads for parallel kernels (0 = all)");

  // ---- evaluate ----
  auto* eval_cmd = app.add_subcommand("evaluate", "Expected utility and stage plan of a sequence");
  std::string eval_scenario, eval_sequence;
  eval_cmd->add_option("scenario", eval_scenario, "Scenario JSON file")->required();
  eval_cmd->add_option("sequence", eval_sequence, "Task sequence, e.g. 8-6-4-3-1-7-9-2-5")
      ->required();

  // ---- exhaustive ----
  auto* exh_cmd = app.add_subcommand("exhaustive", "Rank all J! sequences by expected utility");
  std::string exh_scenario, exh_out;
  exh_cmd->add_option("scenario", exh_scenario, "Scenario JSON file")->required();
  exh_cmd->add_option("--out", exh_out, "Output CSV path (default: stdout)");

  // ---- optimize ----
  auto* opt_cmd = app.add_subcommand("optimize", "Budgeted surrogate-guided search");
  std::string opt_scenario, opt_split, opt_model = "benter", opt_corr = "pearson";
  std::string opt_report, opt_diag;
  int opt_budget = 0, opt_starts = 5;
  std::uint64_t opt_seed = 0, opt_sampled = 0;
  bool opt_half = false;
  opt_cmd->add_option("scenario", opt_scenario, "Scenario JSON file")->required();
  opt_cmd->add_option("--budget", opt_budget, "Total evaluation budget B")->required();
  opt_cmd->add_option("--split", opt_split, "Explicit N,M split of the budget");
  opt_cmd->add_flag("--half", opt_half, "Split the budget as N = B/2 (rounded up)");
  opt_cmd->add_option("--seed", opt_seed, "Run seed")->required();
  opt_cmd->add_option("--model", opt_model, "Surrogate model: benter|pl|rpl");
  opt_cmd->add_option("--corr", opt_corr, "Fit objective: pearson|spearman|kendall");
  opt_cmd->add_option("--sampled", opt_sampled,
                      "Candidate proposal by sampling COUNT sequences (default: exhaustive)");
  opt_cmd->add_option("--starts", opt_starts, "Simplex starts (default 5)");
  opt_cmd->add_option("--report", opt_report, "Report JSON path (also printed to stdout)");
  opt_cmd->add_option("--diag", opt_diag, "Diagnostics CSV path");

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "Replicated random-scenario study");
  std::string sim_config, sim_out;
  sim_cmd->add_option("--config", sim_config, "Simulation grid JSON file")->required();
  sim_cmd->add_option("--out", sim_out, "Output CSV path (default: stdout)");

  // ---- theory ----
  auto* thr_cmd = app.add_subcommand("theory", "Top-M capture probability table");
  int thr_R = 0, thr_delta = 0, thr_mmax = 0;
  std::string thr_out;
  thr_cmd->add_option("--R", thr_R, "Number of ranked sequences R")->required();
  thr_cmd->add_option("--delta", thr_delta, "Kendall distance between the two rankings")
      ->required();
  thr_cmd->add_option("--Mmax", thr_mmax, "Print rows for M = 1..Mmax")->required();
  thr_cmd->add_option("--out", thr_out, "Output CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  set_worker_count(workers);

  try {
    if (*eval_cmd) {
      const ProblemScenario s = load_scenario(eval_scenario);
      const Permutation x = sequence_from_string(eval_sequence);
      const ExpectedUtility u = expected_utility(s, x);
      const StagePlan plan = build_stage_plan(s, x);
      nlohmann::ordered_json j;
      j["format_version"] = kFormatVersion;
      j["seed"] = 0;
      j["sequence"] = sequence_to_string(x);
      j["u"] = u.value;
      j["logit"] = u.logit;
      j["stage_plan"] = {{"cum_cost", plan.cum_cost},
                         {"cum_time", plan.cum_time},
                         {"attain_prob", plan.attain_prob},
                         {"first_attain_prob", plan.first_attain_prob},
                         {"residual_prob", plan.residual_prob},
                         {"positive_mean", plan.positive_mean}};
      j["warnings"] = s.warnings();
      std::cout << j.dump(2) << "\n";
    } else if (*exh_cmd) {
      emit(ranking_csv(load_scenario(exh_scenario)), exh_out);
    } else if (*opt_cmd) {
      const ProblemScenario s = load_scenario(opt_scenario);
      SplitRule rule;
      if (!opt_split.empty()) {
        if (opt_half) throw std::invalid_argument("give either --split or --half, not both");
        rule.half = false;
        const auto comma = opt_split.find(',');
        if (comma == std::string::npos)
          throw std::invalid_argument("--split expects N,M (e.g. 60,40)");
        rule.n_train = std::stoi(opt_split.substr(0, comma));
        rule.m_candidates = std::stoi(opt_split.substr(comma + 1));
      }
      const auto [n, m] = budget_split(opt_budget, rule);
      RunConfig cfg;
      cfg.budget = opt_budget;
      cfg.n_train = n;
      cfg.m_candidates = m;
      cfg.seed = opt_seed;
      cfg.model = model_from_string(opt_model);
      cfg.correlation = correlation_from_string(opt_corr);
      cfg.sampled = opt_sampled > 0;
      cfg.sample_count = opt_sampled;
      cfg.starts = opt_starts;
      const PipelineReport report = run_pipeline(s, cfg);
      const std::string payload = report_to_json(report).dump(2) + "\n";
      std::cout << payload;
      if (!opt_report.empty()) write_text_file(opt_report, payload);
      if (!opt_diag.empty()) diagnostics_export(report, opt_diag);
    } else if (*sim_cmd) {
      std::ifstream in(sim_config);
      if (!in) throw std::runtime_error("cannot open simulation config: " + sim_config);
      nlohmann::json j;
      in >> j;
      emit(simulation_csv(simulate_grid(simulation_config_from_json(j))), sim_out);
    } else if (*thr_cmd) {
      emit(theory_csv(thr_R, thr_delta, thr_mmax), thr_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
