#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rgseq/emulator.hpp"
#include "rgseq/utility.hpp"

namespace rgseq {

inline constexpr const char* kFormatVersion = "1";

/// How a budget of B evaluations is divided between training and candidates.
struct SplitRule {
  bool half = true;  // N = B/2 rounded up, M = the rest
  int n_train = 0;   // explicit split when half == false
  int m_candidates = 0;
};

/// (N, M) for a budget B: either the explicit validated split or the
/// round-half rule. Requires B >= 3, N >= 2, M >= 1, N + M = B.
std::pair<int, int> budget_split(int B, const SplitRule& rule);

struct RunConfig {
  int budget = 0;
  int n_train = 0;
  int m_candidates = 0;
  std::uint64_t seed = 0;
  CorrelationKind correlation = CorrelationKind::Pearson;
  ModelKind model = ModelKind::Benter;
  bool sampled = false;            // candidate proposal mode
  std::uint64_t sample_count = 0;  // draws in sampled mode
  int starts = 5;
};

struct EvalRecord {
  Permutation sequence;
  double u = 0.0;
  double logit = 0.0;
  std::string source;  // "training" or "candidate"
  double f_star = 0.0; // adjusted surrogate value under the final fit
};

struct PipelineReport {
  Permutation putative_optimum;
  ExpectedUtility optimum_utility;
  /// Training rows sorted by increasing u, then candidate rows in decreasing
  /// f* order; never contains a sequence twice.
  std::vector<EvalRecord> evaluation_log;
  FitResult fit;
  StagePlan plan;  // stage plan of the putative optimum
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  RunConfig config;
};

ProblemScenario scenario_from_json(const nlohmann::json& j);
nlohmann::ordered_json scenario_to_json(const ProblemScenario& s);

/// Reads and validates a scenario file; validation failures carry the field
/// name and index. Scenario-level warnings are available via
/// ProblemScenario::warnings().
ProblemScenario load_scenario(const std::string& path);

/// Global argmax of expected utility over all J! sequences (J capped), with
/// lexicographic tie-break. Parallel; results independent of worker count.
std::pair<Permutation, ExpectedUtility> exhaustive_optimum(const ProblemScenario& s);

/// Single-threaded reference implementation of the same scan; kept for
/// equivalence tests and benchmarks.
std::pair<Permutation, ExpectedUtility> exhaustive_optimum_serial(const ProblemScenario& s);

/// Every sequence with its expected utility, ordered by decreasing u
/// (lexicographic tie-break).
std::vector<std::pair<Permutation, double>> exhaustive_ranking(const ProblemScenario& s);

/// All J! expected utilities sorted ascending (for rank queries).
std::vector<double> exhaustive_utilities_sorted(const ProblemScenario& s);

/// N distinct sequences drawn uniformly from the J! possibilities.
std::vector<Permutation> sample_training_sequences(int J, int N, std::uint64_t seed);

/// Train -> fit -> propose -> evaluate -> report. Deterministic given
/// (scenario, config): every random draw flows from config.seed through
/// fixed-purpose derived streams, and parallel sections reduce in a fixed
/// order, so the report is byte-identical for any worker count.
PipelineReport run_pipeline(const ProblemScenario& s, const RunConfig& config);

nlohmann::ordered_json report_to_json(const PipelineReport& r);

/// Diagnostic data behind the training-vs-candidate logit plot:
/// CSV columns (index, source, sequence, u, logit_u, f_star).
std::string diagnostics_csv(const PipelineReport& r);
void diagnostics_export(const PipelineReport& r, const std::string& path);

// ---- Simulation study -----------------------------------------------------

/// Random-scenario generator settings (defaults follow the simulation setup:
/// lambda ~ U(0, 0.5); p = 0 with probability 1/2 else U(0, 0.5); cost
/// ~ U(0, 50); time ~ U(0, 20); epsilon = 0.02; t = 100; R0 = 0.8; max time
/// 90; max cost = the scenario's total task cost).
struct GeneratorConfig {
  int concern_count = 15;
  int task_count = 9;
  double lambda_max = 0.5;
  double p_zero_prob = 0.5;
  double p_max = 0.5;
  double cost_max = 50.0;
  double time_max = 20.0;
  double epsilon = 0.02;
  double mission_time = 100.0;
  double target = 0.8;
  double max_time = 90.0;
  TradeoffWeights weights{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
};

ProblemScenario random_scenario(const GeneratorConfig& g, Rng& rng);

struct GridCell {
  int n_train = 0;
  int m_candidates = 0;
  ModelKind model = ModelKind::Benter;
  CorrelationKind correlation = CorrelationKind::Pearson;
};

struct SimulationConfig {
  GeneratorConfig generator;
  std::vector<GridCell> cells;
  int replications = 100;
  std::uint64_t seed = 0;
  int starts = 5;
};

struct CellSummary {
  GridCell cell;
  /// Fraction of replications where the putative optimum's utility equals
  /// the global maximum (ties count as capture)...
  double capture_rate = 0.0;
  /// ...and the stricter fraction where the sequence itself matches the
  /// lexicographically-first argmax.
  double capture_sequence_rate = 0.0;
  /// Median over replications of the putative optimum's competition rank
  /// (1 + the number of sequences with strictly higher utility).
  double median_rank = 0.0;
  int replications = 0;
};

struct SimulationSummary {
  std::vector<CellSummary> cells;
  int replications = 0;
  std::uint64_t seed = 0;
};

/// Per replication: draws a scenario, finds the exhaustive optimum, runs
/// every grid cell's pipeline with a replication/cell-derived seed, records
/// capture and rank. Replications run in parallel; aggregation is by fixed
/// index order, so the summary is deterministic for any worker count.
SimulationSummary simulate_grid(const SimulationConfig& cfg);

std::string simulation_csv(const SimulationSummary& s);

SimulationConfig simulation_config_from_json(const nlohmann::json& j);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace rgseq
