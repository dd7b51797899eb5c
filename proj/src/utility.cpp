#include "rgseq/utility.hpp"

#include <cmath>
#include <stdexcept>

namespace rgseq {

namespace {
constexpr double kLogitClamp = 1e-12;

double normal_upper_tail(double z) {
  // 1 - Phi(z), evaluated stably through erfc.
  return 0.5 * std::erfc(z / 1.4142135623730950488);
}
}  // namespace

double marginal_utility(double amount, double maximum) {
  if (!(maximum > 0.0)) throw std::invalid_argument("marginal_utility: maximum must be > 0");
  if (!(amount >= 0.0)) throw std::invalid_argument("marginal_utility: amount must be >= 0");
  const double frac = amount / maximum;
  return 1.0 - frac * frac;
}

double stage_utility(double cum_cost, double cum_time, const ProblemScenario& s) {
  const double uc = marginal_utility(cum_cost, s.max_cost);
  const double ut = marginal_utility(cum_time, s.max_time);
  const auto& q = s.weights;
  return q.q1 * uc + q.q2 * ut + q.q3 * uc * ut;
}

StagePlan build_stage_plan(const ProblemScenario& s, const Permutation& x) {
  require_permutation(x);
  const int J = s.task_count();
  if (static_cast<int>(x.size()) != J)
    throw std::invalid_argument("build_stage_plan: sequence length differs from task count");

  StagePlan plan;
  plan.sequence = x;
  plan.cum_cost.resize(static_cast<std::size_t>(J));
  plan.cum_time.resize(static_cast<std::size_t>(J));
  plan.attain_prob.resize(static_cast<std::size_t>(J));
  plan.first_attain_prob.resize(static_cast<std::size_t>(J));

  std::vector<int> prefix;
  prefix.reserve(static_cast<std::size_t>(J));
  double cost = 0.0, time = 0.0, none_before = 1.0;
  for (int j = 0; j < J; ++j) {
    const int task = x[static_cast<std::size_t>(j)];
    prefix.push_back(task);
    const auto& spec = s.tasks[static_cast<std::size_t>(task - 1)];
    cost += spec.cost;
    time += spec.time;
    plan.cum_cost[static_cast<std::size_t>(j)] = cost;
    plan.cum_time[static_cast<std::size_t>(j)] = time;

    const ReliabilityMoments mo = rare_event_moments(s, prefix, s.mission_time);
    if (mo.m > 0.0) plan.positive_mean = true;
    const double alpha = prob_meets_target(mo, s.target);
    plan.attain_prob[static_cast<std::size_t>(j)] = alpha;
    plan.first_attain_prob[static_cast<std::size_t>(j)] = alpha * none_before;
    none_before *= 1.0 - alpha;
  }
  plan.residual_prob = none_before;
  return plan;
}

ExpectedUtility expected_utility(const ProblemScenario& s, const Permutation& x) {
  const StagePlan plan = build_stage_plan(s, x);
  const int J = s.task_count();
  double u = 0.0;
  for (int j = 0; j < J; ++j)
    u += plan.first_attain_prob[static_cast<std::size_t>(j)] *
         stage_utility(plan.cum_cost[static_cast<std::size_t>(j)],
                       plan.cum_time[static_cast<std::size_t>(j)], s);
  u += plan.residual_prob * stage_utility(plan.cum_cost[static_cast<std::size_t>(J - 1)],
                                          plan.cum_time[static_cast<std::size_t>(J - 1)], s);
  return {u, logit_of(u)};
}

double logit_of(double u) {
  double c = u;
  if (c < kLogitClamp) c = kLogitClamp;
  if (c > 1.0 - kLogitClamp) c = 1.0 - kLogitClamp;
  return std::log(c / (1.0 - c));
}

double inverse_logit(double eta) {
  // Symmetric form avoids overflow for large |eta|.
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

SequenceEvaluator::SequenceEvaluator(const ProblemScenario& s) {
  s.validate();
  const int I = s.concern_count(), J = s.task_count();
  log_target_ = std::log(s.target);
  max_cost_ = s.max_cost;
  max_time_ = s.max_time;
  q1_ = s.weights.q1;
  q2_ = s.weights.q2;
  q3_ = s.weights.q3;

  std::vector<double> weight(static_cast<std::size_t>(I));
  for (int i = 0; i < I; ++i) {
    const auto& c = s.concerns[static_cast<std::size_t>(i)];
    weight[static_cast<std::size_t>(i)] = (1.0 - component_reliability(c, s.mission_time)) *
                                          c.lambda;
    base_sum_ += weight[static_cast<std::size_t>(i)];
  }
  dm_.assign(static_cast<std::size_t>(J), 0.0);
  dv_.assign(static_cast<std::size_t>(J), 0.0);
  cost_.resize(static_cast<std::size_t>(J));
  time_.resize(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    const auto& t = s.tasks[static_cast<std::size_t>(j)];
    cost_[static_cast<std::size_t>(j)] = t.cost;
    time_[static_cast<std::size_t>(j)] = t.time;
    for (int i = 0; i < I; ++i) {
      const double w = weight[static_cast<std::size_t>(i)];
      const double p = t.detect[static_cast<std::size_t>(i)];
      dm_[static_cast<std::size_t>(j)] += w * (1.0 - p);
      dv_[static_cast<std::size_t>(j)] += w * w * p * (1.0 - p);
    }
  }
}

double SequenceEvaluator::value(const Permutation& x) const {
  // The mean correction and variance both decompose into sums of per-task
  // contributions, so each stage's moments come from running totals.
  const int J = task_count();
  double miss = 0.0, var = 0.0, cost = 0.0, time = 0.0;
  double none_before = 1.0, u = 0.0, last_stage_u = 0.0;
  for (int j = 0; j < J; ++j) {
    const std::size_t task = static_cast<std::size_t>(x[static_cast<std::size_t>(j)] - 1);
    miss += dm_[task];
    var += dv_[task];
    cost += cost_[task];
    time += time_[task];

    const double m = -(base_sum_ - miss);
    double alpha;
    if (var <= 0.0)
      alpha = m >= log_target_ ? 1.0 : 0.0;
    else
      alpha = normal_upper_tail((log_target_ - m) / std::sqrt(var));

    const double fc = cost / max_cost_, ft = time / max_time_;
    const double uc = 1.0 - fc * fc, ut = 1.0 - ft * ft;
    const double stage_u = q1_ * uc + q2_ * ut + q3_ * uc * ut;
    u += none_before * alpha * stage_u;
    none_before *= 1.0 - alpha;
    last_stage_u = stage_u;
  }
  u += none_before * last_stage_u;
  return u;
}

ExpectedUtility SequenceEvaluator::full(const Permutation& x) const {
  const double u = value(x);
  return {u, logit_of(u)};
}

}  // namespace rgseq
