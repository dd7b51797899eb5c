#pragma once

#include <vector>

#include "rgseq/relmodel.hpp"

namespace rgseq {

/// Stage-by-stage view of executing a sequence under the stop-at-target rule.
struct StagePlan {
  Permutation sequence;
  std::vector<double> cum_cost;          // cumulative cost through stage j
  std::vector<double> cum_time;          // cumulative time through stage j
  std::vector<double> attain_prob;       // alpha_j: target met after j tasks
  std::vector<double> first_attain_prob; // w_j: stopping occurs exactly at j
  double residual_prob = 1.0;            // w_empty: target never met
  bool positive_mean = false;            // any stage saw m > 0 (approximation artifact)
};

struct ExpectedUtility {
  double value = 0.0;
  double logit = 0.0;
};

/// 1 - (amount/maximum)^2. Equals 1 at zero spend and 0 at the maximum;
/// negative beyond the maximum (allowed; flagged at scenario load).
double marginal_utility(double amount, double maximum);

/// q1*U(C) + q2*U(T) + q3*U(C)*U(T) at the given cumulative spend.
double stage_utility(double cum_cost, double cum_time, const ProblemScenario& s);

/// alpha_j from the rare-event moments of the first j tasks;
/// w_j = alpha_j * prod_{k<j} (1-alpha_k); w_empty = prod_k (1-alpha_k).
StagePlan build_stage_plan(const ProblemScenario& s, const Permutation& x);

/// U(x) = sum_j w_j * stage_utility(stage j) + w_empty * stage_utility(stage J).
ExpectedUtility expected_utility(const ProblemScenario& s, const Permutation& x);

/// log(u/(1-u)) with u clamped into [1e-12, 1-1e-12] first.
double logit_of(double u);
double inverse_logit(double eta);

/// Evaluates expected utility in O(J) per sequence via per-task aggregates
/// precomputed from the scenario. Exactly the same model as
/// expected_utility(); this is the form used inside exhaustive scans and
/// pipelines, where millions of sequences are scored.
class SequenceEvaluator {
 public:
  explicit SequenceEvaluator(const ProblemScenario& s);

  /// Expected utility of `x` (no validation; callers pass known-valid
  /// sequences inside hot loops).
  double value(const Permutation& x) const;

  ExpectedUtility full(const Permutation& x) const;

  int task_count() const { return static_cast<int>(dm_.size()); }

 private:
  double base_sum_ = 0.0;           // sum_i (1-R_i) lambda_i
  double log_target_ = 0.0;         // log R0
  std::vector<double> dm_;          // per-task increment of the mean correction
  std::vector<double> dv_;          // per-task increment of the variance
  std::vector<double> cost_, time_;
  double max_cost_ = 1.0, max_time_ = 1.0;
  double q1_ = 0.0, q2_ = 0.0, q3_ = 0.0;
};

}  // namespace rgseq
