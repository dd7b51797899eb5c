#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgseq/perm.hpp"

namespace rgseq {

enum class ModelKind { Benter, PlackettLuce, ReversePlackettLuce };
enum class CorrelationKind { Pearson, Spearman, Kendall };

std::string to_string(ModelKind m);
std::string to_string(CorrelationKind k);
ModelKind model_from_string(const std::string& s);
CorrelationKind correlation_from_string(const std::string& s);

/// Parameters of the ranking-model surrogate
///   f(x; theta, alpha) = sum_j [ alpha_j log theta_{x_j}
///                                - log sum_{m=j..J} theta_{x_m}^{alpha_j} ].
/// alpha.back() == 0 always (the last stage is forced and contributes 0).
/// PlackettLuce fixes alpha = (1,...,1,0); ReversePlackettLuce evaluates the
/// PL form on the reversed sequence.
struct SurrogateParams {
  std::vector<double> theta;
  std::vector<double> alpha;
  ModelKind model = ModelKind::Benter;

  int dimension() const { return static_cast<int>(theta.size()); }
  void validate() const;
};

double surrogate_value(const Permutation& x, const SurrogateParams& params);

/// Flat scorer for hot loops: no allocation per call, raw index access.
class SurrogateScorer {
 public:
  explicit SurrogateScorer(const SurrogateParams& params);
  /// x points at J task ids (1-based). Returns the surrogate value.
  double fhat(const int* x) const;
  int dimension() const { return static_cast<int>(log_theta_.size()); }

 private:
  std::vector<double> log_theta_;
  std::vector<double> alpha_;
  bool reversed_ = false;
};

struct TrainingSet {
  std::vector<Permutation> sequences;
  std::vector<double> utilities;
  std::vector<double> logits;

  int size() const { return static_cast<int>(sequences.size()); }
  void validate() const;  // N >= 2, consistent lengths, distinct sequences
};

/// Builds a training set from (sequence, utility) pairs; logits are the
/// clamped log-odds of the utilities.
TrainingSet make_training_set(std::vector<Permutation> sequences, std::vector<double> utilities);

double correlation(const std::vector<double>& a, const std::vector<double>& b,
                   CorrelationKind kind);

struct FitConfig {
  int starts = 5;
  std::uint64_t seed = 0;
  /// Simplex stops when the objective spread falls below this...
  double spread_tol = 1e-8;
  /// ...or after max_evals_per_dim * dimension objective evaluations.
  int max_evals_per_dim = 500;
};

struct FitResult {
  SurrogateParams params;
  /// Cubic regression coefficients reported on the raw surrogate value:
  /// f*(x) = beta[0] + beta[1] fhat + beta[2] fhat^2 + beta[3] fhat^3.
  /// Evaluation uses the standardized form below, which is algebraically the
  /// same polynomial; the raw coefficients can be astronomically large when
  /// the fitted surrogate values barely vary, so evaluating them directly
  /// would cancel catastrophically.
  std::array<double, 4> beta{0.0, 0.0, 0.0, 0.0};
  /// Standardization of the training surrogate values used by the regression
  /// (z = (fhat - fhat_mean) / fhat_scale) and the coefficients on that
  /// basis: f*(x) = beta_std[0] + beta_std[1] z + beta_std[2] z^2 +
  /// beta_std[3] z^3. This is the form adjusted_value evaluates.
  double fhat_mean = 0.0;
  double fhat_scale = 1.0;
  std::array<double, 4> beta_std{0.0, 0.0, 0.0, 0.0};
  double correlation_raw = 0.0;
  double correlation_adjusted = 0.0;
  CorrelationKind correlation_kind = CorrelationKind::Pearson;
  int starts_used = 0;
  std::uint64_t seed = 0;
  /// True when no start produced a usable objective value; params then sit at
  /// the initial point and both correlations are reported as 0.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

/// Maximizes the chosen correlation between training logits and surrogate
/// values by multi-start Nelder-Mead simplex search in log-parameter space
/// (theta_1 fixed at 1; log theta in [-50,50], log alpha in [-30,30];
/// start 0 is the theta=1, alpha=1 point, further starts draw standard-Normal
/// log-parameters from seeds derived per start). Deterministic given
/// config.seed for any worker count. Finishes with the cubic regression
/// adjustment.
FitResult fit_surrogate(const TrainingSet& training, CorrelationKind kind, ModelKind model,
                        const FitConfig& config);

/// Ordinary least squares of `logits` on the cubic basis of `fhat_values`
/// (standardized internally for conditioning; returned in the raw basis).
/// Rank-deficient designs fall back to the linear fit (beta2 = beta3 = 0)
/// and note it in `warnings` when given.
std::array<double, 4> regression_adjust(const std::vector<double>& fhat_values,
                                        const std::vector<double>& logits,
                                        std::vector<std::string>* warnings = nullptr);

/// f*(x): the regression-adjusted surrogate value.
double adjusted_value(const Permutation& x, const FitResult& fit);
/// f†(x) = exp(f*)/(1+exp(f*)), back on the utility scale.
double inverse_logit_value(const Permutation& x, const FitResult& fit);

struct CandidateMode {
  bool sampled = false;
  std::uint64_t sample_count = 0;  // draws when sampled
  std::uint64_t seed = 0;          // sampling seed
};

/// The M distinct sequences not in `exclude` with the highest f* values over
/// the scored pool: every J! sequence in exhaustive mode (J capped), or the
/// deduplicated draws from the fitted model in sampled mode. Ties break
/// lexicographically; output is ordered by decreasing f*. A sampled pool
/// smaller than M returns everything available and appends a warning.
std::vector<Permutation> propose_candidates(const FitResult& fit, int M, const CandidateMode& mode,
                                            const std::vector<Permutation>& exclude,
                                            std::vector<std::string>* warnings = nullptr);

/// JSON round-trip for FitResult (bit-exact on all serialized fields).
nlohmann::ordered_json fit_to_json(const FitResult& fit);
FitResult fit_from_json(const nlohmann::json& j);

}  // namespace rgseq
