#pragma once

#include <string>
#include <vector>

#include "rgseq/perm.hpp"

namespace rgseq {

/// A latent design concern: present with prior probability `lambda`, and if
/// present it fails in service at rate `epsilon` per unit time (exponential).
struct Concern {
  double lambda = 0.0;
  double epsilon = 0.0;
};

/// One development task: its cost, duration, and the probability detect[i]
/// of revealing concern i when the task is performed.
struct TaskSpec {
  double cost = 0.0;
  double time = 0.0;
  std::vector<double> detect;
};

/// Weights of the cost/time trade-off: q1*U(C) + q2*U(T) + q3*U(C)*U(T).
struct TradeoffWeights {
  double q1 = 0.5;
  double q2 = 0.5;
  double q3 = 0.0;

  void validate() const;
};

struct ProblemScenario {
  std::vector<Concern> concerns;
  std::vector<TaskSpec> tasks;
  double mission_time = 0.0;  // t
  double target = 0.9;       // R0
  double max_cost = 1.0;     // Y0
  double max_time = 1.0;     // chi0
  TradeoffWeights weights;

  int concern_count() const { return static_cast<int>(concerns.size()); }
  int task_count() const { return static_cast<int>(tasks.size()); }

  /// Throws std::invalid_argument naming the offending field and index.
  void validate() const;

  /// Non-fatal conditions worth surfacing (possible budget overrun, possible
  /// positive log-reliability mean under the rare-event approximation).
  std::vector<std::string> warnings() const;
};

/// First two moments of the approximate log-reliability g(t,z) ~ N(m, v).
struct ReliabilityMoments {
  double m = 0.0;
  double v = 0.0;
};

/// exp(-epsilon * t): survival probability of a component whose concern is
/// actually present.
double component_reliability(const Concern& concern, double t);

/// Posterior probability the concern is present given that none of the
/// performed tasks (with detection probabilities `detect_probs`) flagged it:
/// lambda * prod(1-p) / (1 - lambda * (1 - prod(1-p))).
double posterior_fault_prob(double lambda, const std::vector<double>& detect_probs);

/// Closed-form prior expectation of mission reliability after performing the
/// given task subset: prod_i [1 - (1-R_i(t)) * lambda_i * prod_j (1-p_ij)].
/// `performed` holds distinct 1-based task ids.
double expected_reliability(const ProblemScenario& s, const std::vector<int>& performed, double t);

/// Brute-force expectation over every fault configuration z in {0,1}^I and
/// every detection outcome of the performed tasks; detected faults are
/// removed with certainty. Guarded to I <= 12. Agrees with
/// expected_reliability; exists as an independent check.
double oracle_expected_reliability(const ProblemScenario& s, const std::vector<int>& performed,
                                   double t);

/// Rare-event approximation moments of g(t,z) = log R(t,z):
///   m = -[ sum_i (1-R_i) lambda_i - sum_i (1-R_i) lambda_i sum_j kappa_j (1-p_ij) ]
///   v =    sum_i ((1-R_i) lambda_i)^2 sum_j kappa_j (1-p_ij) p_ij
/// with kappa_j = 1 exactly for performed tasks. Implemented as printed:
/// m may come out positive; callers surface that as a warning, not an error.
ReliabilityMoments rare_event_moments(const ProblemScenario& s, const std::vector<int>& performed,
                                      double t);

/// Pr(R >= R0) = 1 - Phi((log R0 - m)/sqrt(v)); for v = 0 the weak limit,
/// a step function 1[m >= log R0].
double prob_meets_target(const ReliabilityMoments& moments, double R0);

}  // namespace rgseq
