#include "rgseq/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "rgseq/parallel.hpp"
#include "rgseq/rng.hpp"

namespace rgseq {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

std::string perm_key(const Permutation& x) {
  std::string k;
  k.reserve(x.size());
  for (int v : x) k.push_back(static_cast<char>(v));
  return k;
}

std::uint64_t factorial_u64(int J) {
  std::uint64_t f = 1;
  for (int k = 2; k <= J; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

bool better_by_utility(double ua, const Permutation& xa, double ub, const Permutation& xb) {
  if (ua != ub) return ua > ub;
  return xa < xb;
}

const nlohmann::json& require_field(const nlohmann::json& j, const char* name,
                                    const std::string& where) {
  auto it = j.find(name);
  if (it == j.end())
    throw std::invalid_argument(where + ": missing field '" + std::string(name) + "'");
  return *it;
}

void validate_run_config(const RunConfig& c) {
  if (c.n_train < 2) throw std::invalid_argument("run config: n_train must be >= 2");
  if (c.m_candidates < 1) throw std::invalid_argument("run config: m_candidates must be >= 1");
  if (c.budget != 0 && c.budget != c.n_train + c.m_candidates)
    throw std::invalid_argument("run config: budget must equal n_train + m_candidates");
  if (c.starts < 1) throw std::invalid_argument("run config: starts must be >= 1");
  if (c.sampled && c.sample_count < 1)
    throw std::invalid_argument("run config: sampled mode needs sample_count >= 1");
}

}  // namespace

std::pair<int, int> budget_split(int B, const SplitRule& rule) {
  if (B < 3) throw std::invalid_argument("budget_split: budget must be >= 3");
  if (rule.half) {
    const int n = (B + 1) / 2;  // ties round toward training
    return {n, B - n};
  }
  const int n = rule.n_train, m = rule.m_candidates;
  if (n < 2) throw std::invalid_argument("budget_split: N must be >= 2");
  if (m < 1) throw std::invalid_argument("budget_split: M must be >= 1");
  if (n + m != B) throw std::invalid_argument("budget_split: N + M must equal the budget");
  return {n, m};
}

ProblemScenario scenario_from_json(const nlohmann::json& j) {
  ProblemScenario s;
  const auto& concerns = require_field(j, "concerns", "scenario");
  if (!concerns.is_array()) throw std::invalid_argument("scenario: 'concerns' must be an array");
  for (std::size_t i = 0; i < concerns.size(); ++i) {
    const std::string where = "scenario concerns[" + std::to_string(i) + "]";
    const auto& cj = concerns[i];
    Concern c;
    c.lambda = require_field(cj, "lambda", where).get<double>();
    c.epsilon = require_field(cj, "epsilon", where).get<double>();
    s.concerns.push_back(c);
  }
  const auto& tasks = require_field(j, "tasks", "scenario");
  if (!tasks.is_array()) throw std::invalid_argument("scenario: 'tasks' must be an array");
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const std::string where = "scenario tasks[" + std::to_string(t) + "]";
    const auto& tj = tasks[t];
    TaskSpec task;
    task.cost = require_field(tj, "cost", where).get<double>();
    task.time = require_field(tj, "time", where).get<double>();
    task.detect = require_field(tj, "detect", where).get<std::vector<double>>();
    s.tasks.push_back(std::move(task));
  }
  s.mission_time = require_field(j, "mission_time", "scenario").get<double>();
  s.target = require_field(j, "target", "scenario").get<double>();
  s.max_cost = require_field(j, "max_cost", "scenario").get<double>();
  s.max_time = require_field(j, "max_time", "scenario").get<double>();
  const auto& w = require_field(j, "weights", "scenario");
  s.weights.q1 = require_field(w, "q1", "scenario weights").get<double>();
  s.weights.q2 = require_field(w, "q2", "scenario weights").get<double>();
  s.weights.q3 = require_field(w, "q3", "scenario weights").get<double>();
  s.validate();
  return s;
}

nlohmann::ordered_json scenario_to_json(const ProblemScenario& s) {
  nlohmann::ordered_json j;
  j["concerns"] = nlohmann::ordered_json::array();
  for (const auto& c : s.concerns)
    j["concerns"].push_back({{"lambda", c.lambda}, {"epsilon", c.epsilon}});
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : s.tasks)
    j["tasks"].push_back({{"cost", t.cost}, {"time", t.time}, {"detect", t.detect}});
  j["mission_time"] = s.mission_time;
  j["target"] = s.target;
  j["max_cost"] = s.max_cost;
  j["max_time"] = s.max_time;
  j["weights"] = {{"q1", s.weights.q1}, {"q2", s.weights.q2}, {"q3", s.weights.q3}};
  return j;
}

ProblemScenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::invalid_argument("scenario file " + path + ": " + e.what());
  }
  return scenario_from_json(j);
}

namespace {

struct BestEntry {
  double u = -HUGE_VAL;
  Permutation x;
  bool valid = false;
};

// Scans all J! sequences in deterministic fixed chunks; `see(chunk, idx, x, u)`
// must only touch chunk-local state.
template <class SeeFn>
void chunked_scan(const SequenceEvaluator& ev, int J, std::size_t chunk_count_hint,
                  const SeeFn& see) {
  const std::uint64_t total = factorial_u64(J);
  const auto chunks = fixed_chunks(static_cast<std::int64_t>(total),
                                   static_cast<int>(chunk_count_hint));
  parallel_for(static_cast<std::int64_t>(chunks.size()), [&](std::int64_t ci) {
    const auto [lo, hi] = chunks[static_cast<std::size_t>(ci)];
    Permutation x = nth_permutation(J, static_cast<std::uint64_t>(lo));
    for (std::int64_t idx = lo; idx < hi; ++idx) {
      see(static_cast<std::size_t>(ci), static_cast<std::uint64_t>(idx), x, ev.value(x));
      std::next_permutation(x.begin(), x.end());
    }
  });
}

void check_enumeration_cap(const ProblemScenario& s) {
  if (s.task_count() > kEnumerationCap)
    throw std::invalid_argument("exhaustive evaluation needs J <= " +
                                std::to_string(kEnumerationCap) +
                                "; run the pipeline with sampled candidates instead");
}

}  // namespace

std::pair<Permutation, ExpectedUtility> exhaustive_optimum(const ProblemScenario& s) {
  s.validate();
  check_enumeration_cap(s);
  const int J = s.task_count();
  const SequenceEvaluator ev(s);
  std::vector<BestEntry> best(64);
  chunked_scan(ev, J, best.size(),
               [&](std::size_t ci, std::uint64_t, const Permutation& x, double u) {
                 auto& b = best[ci];
                 if (!b.valid || better_by_utility(u, x, b.u, b.x)) {
                   b.u = u;
                   b.x = x;
                   b.valid = true;
                 }
               });
  const BestEntry* win = nullptr;
  for (const auto& b : best) {
    if (!b.valid) continue;
    if (!win || better_by_utility(b.u, b.x, win->u, win->x)) win = &b;
  }
  return {win->x, ev.full(win->x)};
}

std::pair<Permutation, ExpectedUtility> exhaustive_optimum_serial(const ProblemScenario& s) {
  s.validate();
  check_enumeration_cap(s);
  const SequenceEvaluator ev(s);
  LexEnumerator en(s.task_count());
  Permutation x;
  BestEntry b;
  while (en.next(x)) {
    const double u = ev.value(x);
    if (!b.valid || better_by_utility(u, x, b.u, b.x)) {
      b.u = u;
      b.x = x;
      b.valid = true;
    }
  }
  return {b.x, ev.full(b.x)};
}

std::vector<std::pair<Permutation, double>> exhaustive_ranking(const ProblemScenario& s) {
  s.validate();
  check_enumeration_cap(s);
  const int J = s.task_count();
  const std::uint64_t total = factorial_u64(J);
  const SequenceEvaluator ev(s);
  std::vector<double> us(total);
  chunked_scan(ev, J, 64, [&](std::size_t, std::uint64_t idx, const Permutation&, double u) {
    us[idx] = u;
  });
  std::vector<std::uint64_t> order(total);
  for (std::uint64_t i = 0; i < total; ++i) order[i] = i;
  // Lexicographic enumeration index doubles as the tie-break key.
  std::sort(order.begin(), order.end(), [&](std::uint64_t a, std::uint64_t b) {
    if (us[a] != us[b]) return us[a] > us[b];
    return a < b;
  });
  std::vector<std::pair<Permutation, double>> out(total);
  parallel_for(static_cast<std::int64_t>(total), [&](std::int64_t i) {
    const std::uint64_t idx = order[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = {nth_permutation(J, idx), us[idx]};
  });
  return out;
}

std::vector<double> exhaustive_utilities_sorted(const ProblemScenario& s) {
  s.validate();
  check_enumeration_cap(s);
  const SequenceEvaluator ev(s);
  std::vector<double> us(factorial_u64(s.task_count()));
  chunked_scan(ev, s.task_count(), 64,
               [&](std::size_t, std::uint64_t idx, const Permutation&, double u) { us[idx] = u; });
  std::sort(us.begin(), us.end());
  return us;
}

std::vector<Permutation> sample_training_sequences(int J, int N, std::uint64_t seed) {
  if (J < 1) throw std::invalid_argument("sample_training_sequences: J must be >= 1");
  if (N < 1) throw std::invalid_argument("sample_training_sequences: N must be >= 1");
  if (J <= kEnumerationCap && static_cast<std::uint64_t>(N) > factorial_u64(J))
    throw std::invalid_argument("sample_training_sequences: N exceeds J!");
  Rng rng(seed);
  std::unordered_set<std::string> seen;
  std::vector<Permutation> out;
  out.reserve(static_cast<std::size_t>(N));
  Permutation base(static_cast<std::size_t>(J));
  for (int i = 0; i < J; ++i) base[static_cast<std::size_t>(i)] = i + 1;
  while (static_cast<int>(out.size()) < N) {
    Permutation x = base;
    rng.shuffle(x);
    if (seen.insert(perm_key(x)).second) out.push_back(std::move(x));
  }
  return out;
}

PipelineReport run_pipeline(const ProblemScenario& s, const RunConfig& config) {
  s.validate();
  RunConfig cfg = config;
  if (cfg.budget == 0) cfg.budget = cfg.n_train + cfg.m_candidates;
  validate_run_config(cfg);
  const int J = s.task_count();
  if (J < 2) throw std::invalid_argument("run_pipeline: need at least 2 tasks");
  if (!cfg.sampled) check_enumeration_cap(s);

  PipelineReport report;
  report.seed = cfg.seed;
  report.config = cfg;
  report.warnings = s.warnings();

  // Stage 1: uniform training sample, scored with the exact model.
  const SequenceEvaluator ev(s);
  std::vector<Permutation> train_seqs =
      sample_training_sequences(J, cfg.n_train, derive_seed(cfg.seed, 1));
  std::vector<double> train_u(train_seqs.size());
  parallel_for(static_cast<std::int64_t>(train_seqs.size()), [&](std::int64_t i) {
    train_u[static_cast<std::size_t>(i)] = ev.value(train_seqs[static_cast<std::size_t>(i)]);
  });
  TrainingSet training = make_training_set(train_seqs, train_u);

  // Stage 2: fit the surrogate.
  FitConfig fit_cfg;
  fit_cfg.starts = cfg.starts;
  fit_cfg.seed = derive_seed(cfg.seed, 2);
  report.fit = fit_surrogate(training, cfg.correlation, cfg.model, fit_cfg);
  for (const auto& w : report.fit.warnings) report.warnings.push_back("fit: " + w);

  // Stage 3: candidates — surrogate-guided, or uniform fallback when the fit
  // produced nothing usable.
  std::vector<Permutation> candidates;
  if (report.fit.degenerate) {
    report.warnings.push_back("pipeline: degenerate fit; candidates drawn uniformly at random");
    Rng rng(derive_seed(cfg.seed, 4));
    std::unordered_set<std::string> seen;
    for (const auto& x : training.sequences) seen.insert(perm_key(x));
    Permutation base(static_cast<std::size_t>(J));
    for (int i = 0; i < J; ++i) base[static_cast<std::size_t>(i)] = i + 1;
    const std::uint64_t attempts_cap =
        64ull * static_cast<std::uint64_t>(cfg.n_train + cfg.m_candidates) + 1024ull;
    for (std::uint64_t a = 0; a < attempts_cap && static_cast<int>(candidates.size()) <
                                                      cfg.m_candidates;
         ++a) {
      Permutation x = base;
      rng.shuffle(x);
      if (seen.insert(perm_key(x)).second) candidates.push_back(std::move(x));
    }
    if (static_cast<int>(candidates.size()) < cfg.m_candidates)
      report.warnings.push_back("pipeline: uniform fallback exhausted the sequence pool");
  } else {
    CandidateMode mode;
    mode.sampled = cfg.sampled;
    mode.sample_count = cfg.sample_count;
    mode.seed = derive_seed(cfg.seed, 3);
    candidates =
        propose_candidates(report.fit, cfg.m_candidates, mode, training.sequences,
                           &report.warnings);
  }

  // Stage 4: spend the remaining budget on the candidates.
  std::vector<double> cand_u(candidates.size());
  parallel_for(static_cast<std::int64_t>(candidates.size()), [&](std::int64_t i) {
    cand_u[static_cast<std::size_t>(i)] = ev.value(candidates[static_cast<std::size_t>(i)]);
  });

  // Stage 5: assemble the log (training by increasing u, candidates in
  // proposal order) and pick the best of everything evaluated.
  const int N = training.size();
  std::vector<int> tr_order(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) tr_order[static_cast<std::size_t>(i)] = i;
  std::sort(tr_order.begin(), tr_order.end(), [&](int a, int b) {
    const double ua = training.utilities[static_cast<std::size_t>(a)];
    const double ub = training.utilities[static_cast<std::size_t>(b)];
    if (ua != ub) return ua < ub;
    return training.sequences[static_cast<std::size_t>(a)] <
           training.sequences[static_cast<std::size_t>(b)];
  });
  report.evaluation_log.reserve(static_cast<std::size_t>(N) + candidates.size());
  for (int i : tr_order) {
    EvalRecord r;
    r.sequence = training.sequences[static_cast<std::size_t>(i)];
    r.u = training.utilities[static_cast<std::size_t>(i)];
    r.logit = training.logits[static_cast<std::size_t>(i)];
    r.source = "training";
    r.f_star = adjusted_value(r.sequence, report.fit);
    report.evaluation_log.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    EvalRecord r;
    r.sequence = candidates[i];
    r.u = cand_u[i];
    r.logit = logit_of(r.u);
    r.source = "candidate";
    r.f_star = adjusted_value(r.sequence, report.fit);
    report.evaluation_log.push_back(std::move(r));
  }

  const EvalRecord* best = nullptr;
  for (const auto& r : report.evaluation_log)
    if (!best || better_by_utility(r.u, r.sequence, best->u, best->sequence)) best = &r;
  report.putative_optimum = best->sequence;
  report.optimum_utility = {best->u, best->logit};
  report.plan = build_stage_plan(s, report.putative_optimum);
  if (report.plan.positive_mean)
    report.warnings.push_back(
        "stage plan: rare-event mean exceeded 0 at some stage (approximation artifact)");
  return report;
}

nlohmann::ordered_json report_to_json(const PipelineReport& r) {
  nlohmann::ordered_json j;
  j["format_version"] = kFormatVersion;
  j["seed"] = r.seed;
  j["config"] = {{"budget", r.config.budget},
                 {"n_train", r.config.n_train},
                 {"m_candidates", r.config.m_candidates},
                 {"model", to_string(r.config.model)},
                 {"correlation", to_string(r.config.correlation)},
                 {"candidate_mode", r.config.sampled ? "sampled" : "exhaustive"},
                 {"sample_count", r.config.sample_count},
                 {"starts", r.config.starts}};
  j["putative_optimum"] = {{"sequence", sequence_to_string(r.putative_optimum)},
                           {"u", r.optimum_utility.value},
                           {"logit", r.optimum_utility.logit}};
  j["fit"] = fit_to_json(r.fit);
  j["stage_plan"] = {{"sequence", sequence_to_string(r.plan.sequence)},
                     {"cum_cost", r.plan.cum_cost},
                     {"cum_time", r.plan.cum_time},
                     {"attain_prob", r.plan.attain_prob},
                     {"first_attain_prob", r.plan.first_attain_prob},
                     {"residual_prob", r.plan.residual_prob},
                     {"positive_mean", r.plan.positive_mean}};
  j["evaluation_log"] = nlohmann::ordered_json::array();
  int index = 1;
  for (const auto& rec : r.evaluation_log) {
    j["evaluation_log"].push_back({{"index", index++},
                                   {"source", rec.source},
                                   {"sequence", sequence_to_string(rec.sequence)},
                                   {"u", rec.u},
                                   {"logit", rec.logit},
                                   {"f_star", rec.f_star}});
  }
  j["warnings"] = r.warnings;
  return j;
}

std::string diagnostics_csv(const PipelineReport& r) {
  std::ostringstream os;
  os << "# seed=" << r.seed << " format_version=" << kFormatVersion << "\n";
  os << "index,source,sequence,u,logit_u,f_star\n";
  int index = 1;
  for (const auto& rec : r.evaluation_log) {
    os << index++ << ',' << rec.source << ',' << sequence_to_string(rec.sequence) << ','
       << fmt_double(rec.u) << ',' << fmt_double(rec.logit) << ',' << fmt_double(rec.f_star)
       << '\n';
  }
  return os.str();
}

void diagnostics_export(const PipelineReport& r, const std::string& path) {
  write_text_file(path, diagnostics_csv(r));
}

ProblemScenario random_scenario(const GeneratorConfig& g, Rng& rng) {
  if (g.concern_count < 1 || g.task_count < 1)
    throw std::invalid_argument("generator: needs at least one concern and one task");
  ProblemScenario s;
  for (int i = 0; i < g.concern_count; ++i) {
    Concern c;
    c.lambda = rng.uniform(0.0, g.lambda_max);
    c.epsilon = g.epsilon;
    s.concerns.push_back(c);
  }
  double total_cost = 0.0;
  for (int j = 0; j < g.task_count; ++j) {
    TaskSpec t;
    t.cost = rng.uniform(0.0, g.cost_max);
    t.time = rng.uniform(0.0, g.time_max);
    t.detect.resize(static_cast<std::size_t>(g.concern_count));
    for (int i = 0; i < g.concern_count; ++i) {
      if (rng.uniform() < g.p_zero_prob)
        t.detect[static_cast<std::size_t>(i)] = 0.0;
      else
        t.detect[static_cast<std::size_t>(i)] = rng.uniform(0.0, g.p_max);
    }
    total_cost += t.cost;
    s.tasks.push_back(std::move(t));
  }
  s.mission_time = g.mission_time;
  s.target = g.target;
  s.max_cost = total_cost;
  s.max_time = g.max_time;
  s.weights = g.weights;
  s.validate();
  return s;
}

SimulationSummary simulate_grid(const SimulationConfig& cfg) {
  if (cfg.replications < 1) throw std::invalid_argument("simulate_grid: replications must be >= 1");
  if (cfg.cells.empty()) throw std::invalid_argument("simulate_grid: no grid cells");
  if (cfg.generator.task_count < 2 || cfg.generator.task_count > kEnumerationCap)
    throw std::invalid_argument("simulate_grid: task count must lie in 2.." +
                                std::to_string(kEnumerationCap));

  struct RepCell {
    bool captured_u = false;
    bool captured_seq = false;
    std::int64_t rank = 0;
  };
  const std::size_t C = cfg.cells.size();
  const std::size_t R = static_cast<std::size_t>(cfg.replications);
  std::vector<RepCell> results(R * C);

  parallel_for(static_cast<std::int64_t>(R), [&](std::int64_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));
    Rng gen_rng(derive_seed(rep_seed, 1));
    const ProblemScenario scenario = random_scenario(cfg.generator, gen_rng);
    const SequenceEvaluator ev(scenario);
    const int J = scenario.task_count();
    const std::uint64_t total = factorial_u64(J);

    // One serial scan per replication: utilities for rank queries plus the
    // lexicographically-first argmax (replications are the parallel axis).
    std::vector<double> us(total);
    Permutation x(static_cast<std::size_t>(J));
    for (int i = 0; i < J; ++i) x[static_cast<std::size_t>(i)] = i + 1;
    Permutation best_x;
    double best_u = -HUGE_VAL;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      const double u = ev.value(x);
      us[idx] = u;
      if (u > best_u) {  // strict: first hit in lexicographic order wins
        best_u = u;
        best_x = x;
      }
      std::next_permutation(x.begin(), x.end());
    }
    std::sort(us.begin(), us.end());

    for (std::size_t ci = 0; ci < C; ++ci) {
      const GridCell& cell = cfg.cells[ci];
      RunConfig rc;
      rc.n_train = cell.n_train;
      rc.m_candidates = cell.m_candidates;
      rc.model = cell.model;
      rc.correlation = cell.correlation;
      rc.starts = cfg.starts;
      rc.seed = derive_seed(rep_seed, 100 + static_cast<std::uint64_t>(ci));
      const PipelineReport report = run_pipeline(scenario, rc);

      RepCell& out = results[static_cast<std::size_t>(rep) * C + ci];
      const double u_put = report.optimum_utility.value;
      const auto above = us.end() - std::upper_bound(us.begin(), us.end(), u_put);
      out.rank = static_cast<std::int64_t>(above) + 1;
      out.captured_u = u_put == us.back();
      out.captured_seq = report.putative_optimum == best_x;
    }
  });

  SimulationSummary summary;
  summary.replications = cfg.replications;
  summary.seed = cfg.seed;
  for (std::size_t ci = 0; ci < C; ++ci) {
    CellSummary cs;
    cs.cell = cfg.cells[ci];
    cs.replications = cfg.replications;
    std::vector<std::int64_t> ranks;
    ranks.reserve(R);
    int cap_u = 0, cap_seq = 0;
    for (std::size_t rep = 0; rep < R; ++rep) {
      const RepCell& rc = results[rep * C + ci];
      cap_u += rc.captured_u ? 1 : 0;
      cap_seq += rc.captured_seq ? 1 : 0;
      ranks.push_back(rc.rank);
    }
    std::sort(ranks.begin(), ranks.end());
    const std::size_t n = ranks.size();
    cs.median_rank = n % 2 == 1 ? static_cast<double>(ranks[n / 2])
                                : 0.5 * static_cast<double>(ranks[n / 2 - 1] + ranks[n / 2]);
    cs.capture_rate = static_cast<double>(cap_u) / static_cast<double>(cfg.replications);
    cs.capture_sequence_rate = static_cast<double>(cap_seq) / static_cast<double>(cfg.replications);
    summary.cells.push_back(cs);
  }
  return summary;
}

std::string simulation_csv(const SimulationSummary& s) {
  std::ostringstream os;
  os << "n_train,m_candidates,model,correlation,capture_rate,capture_sequence_rate,"
        "median_rank,replications,seed,format_version\n";
  for (const auto& c : s.cells) {
    os << c.cell.n_train << ',' << c.cell.m_candidates << ',' << to_string(c.cell.model) << ','
       << to_string(c.cell.correlation) << ',' << fmt_double(c.capture_rate) << ','
       << fmt_double(c.capture_sequence_rate) << ',' << fmt_double(c.median_rank) << ','
       << c.replications << ',' << s.seed << ',' << kFormatVersion << '\n';
  }
  return os.str();
}

SimulationConfig simulation_config_from_json(const nlohmann::json& j) {
  SimulationConfig cfg;
  cfg.replications = require_field(j, "replications", "simulation config").get<int>();
  cfg.seed = require_field(j, "seed", "simulation config").get<std::uint64_t>();
  if (j.contains("starts")) cfg.starts = j.at("starts").get<int>();
  if (j.contains("generator")) {
    const auto& g = j.at("generator");
    auto opt = [&](const char* name, double& slot) {
      if (g.contains(name)) slot = g.at(name).get<double>();
    };
    if (g.contains("concern_count")) cfg.generator.concern_count = g.at("concern_count").get<int>();
    if (g.contains("task_count")) cfg.generator.task_count = g.at("task_count").get<int>();
    opt("lambda_max", cfg.generator.lambda_max);
    opt("p_zero_prob", cfg.generator.p_zero_prob);
    opt("p_max", cfg.generator.p_max);
    opt("cost_max", cfg.generator.cost_max);
    opt("time_max", cfg.generator.time_max);
    opt("epsilon", cfg.generator.epsilon);
    opt("mission_time", cfg.generator.mission_time);
    opt("target", cfg.generator.target);
    opt("max_time", cfg.generator.max_time);
    if (g.contains("weights")) {
      const auto& w = g.at("weights");
      cfg.generator.weights.q1 = require_field(w, "q1", "generator weights").get<double>();
      cfg.generator.weights.q2 = require_field(w, "q2", "generator weights").get<double>();
      cfg.generator.weights.q3 = require_field(w, "q3", "generator weights").get<double>();
    }
  }
  const auto& cells = require_field(j, "cells", "simulation config");
  if (!cells.is_array() || cells.empty())
    throw std::invalid_argument("simulation config: 'cells' must be a non-empty array");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string where = "simulation config cells[" + std::to_string(i) + "]";
    const auto& cj = cells[i];
    GridCell cell;
    cell.n_train = require_field(cj, "n_train", where).get<int>();
    cell.m_candidates = require_field(cj, "m_candidates", where).get<int>();
    if (cj.contains("model")) cell.model = model_from_string(cj.at("model").get<std::string>());
    if (cj.contains("correlation"))
      cell.correlation = correlation_from_string(cj.at("correlation").get<std::string>());
    cfg.cells.push_back(cell);
  }
  return cfg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace rgseq
