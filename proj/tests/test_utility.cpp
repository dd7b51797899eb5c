#include <doctest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "rgseq/harness.hpp"
#include "rgseq/rng.hpp"
#include "rgseq/utility.hpp"

using namespace rgseq;

namespace {

ProblemScenario random_scenario_for_utility(Rng& rng, int max_concerns = 4, int max_tasks = 5) {
  ProblemScenario s;
  const int I = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_concerns)));
  const int J = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_tasks)));
  for (int i = 0; i < I; ++i) s.concerns.push_back({rng.uniform(0.0, 0.5), rng.uniform(0.0, 0.05)});
  double total_cost = 0.0, total_time = 0.0;
  for (int j = 0; j < J; ++j) {
    TaskSpec t;
    t.cost = rng.uniform(1.0, 20.0);
    t.time = rng.uniform(1.0, 10.0);
    total_cost += t.cost;
    total_time += t.time;
    for (int i = 0; i < I; ++i) t.detect.push_back(rng.uniform() < 0.4 ? 0.0 : rng.uniform(0.0, 0.5));
    s.tasks.push_back(t);
  }
  s.mission_time = rng.uniform(10.0, 100.0);
  s.target = rng.uniform(0.5, 0.95);
  s.max_cost = total_cost * rng.uniform(1.0, 1.5);
  s.max_time = total_time * rng.uniform(1.0, 1.5);
  s.weights = {0.5, 0.5, 0.0};
  return s;
}

Permutation random_sequence(int J, Rng& rng) {
  Permutation x(static_cast<std::size_t>(J));
  std::iota(x.begin(), x.end(), 1);
  rng.shuffle(x);
  return x;
}

// First-principles recomputation of the expected utility of x: stage moments,
// attainment chain, and the utility mixture, all spelled out longhand without
// the library's incremental bookkeeping.
double straight_line_expected_utility(const ProblemScenario& s, const Permutation& x) {
  const int I = s.concern_count();
  const int J = static_cast<int>(x.size());
  const double log_r0 = std::log(s.target);

  std::vector<double> weight(static_cast<std::size_t>(I));
  for (int i = 0; i < I; ++i)
    weight[static_cast<std::size_t>(i)] =
        (1.0 - std::exp(-s.concerns[static_cast<std::size_t>(i)].epsilon * s.mission_time)) *
        s.concerns[static_cast<std::size_t>(i)].lambda;

  std::vector<double> alpha(static_cast<std::size_t>(J));
  std::vector<double> cum_cost(static_cast<std::size_t>(J)), cum_time(static_cast<std::size_t>(J));
  double running_cost = 0.0, running_time = 0.0;
  for (int j = 0; j < J; ++j) {
    const int task = x[static_cast<std::size_t>(j)];
    running_cost += s.tasks[static_cast<std::size_t>(task - 1)].cost;
    running_time += s.tasks[static_cast<std::size_t>(task - 1)].time;
    cum_cost[static_cast<std::size_t>(j)] = running_cost;
    cum_time[static_cast<std::size_t>(j)] = running_time;

    double m = 0.0, v = 0.0;
    for (int i = 0; i < I; ++i) {
      double miss = 0.0, var = 0.0;
      for (int k = 0; k <= j; ++k) {
        const double p =
            s.tasks[static_cast<std::size_t>(x[static_cast<std::size_t>(k)] - 1)].detect
                [static_cast<std::size_t>(i)];
        miss += 1.0 - p;
        var += p * (1.0 - p);
      }
      m += -weight[static_cast<std::size_t>(i)] +
           weight[static_cast<std::size_t>(i)] * miss;
      v += weight[static_cast<std::size_t>(i)] * weight[static_cast<std::size_t>(i)] * var;
    }
    if (v <= 0.0)
      alpha[static_cast<std::size_t>(j)] = m >= log_r0 ? 1.0 : 0.0;
    else
      alpha[static_cast<std::size_t>(j)] =
          1.0 - 0.5 * std::erfc(-((log_r0 - m) / std::sqrt(v)) / std::sqrt(2.0));
  }

  const auto util_at = [&](int j) {
    const double uc = 1.0 - std::pow(cum_cost[static_cast<std::size_t>(j)] / s.max_cost, 2.0);
    const double ut = 1.0 - std::pow(cum_time[static_cast<std::size_t>(j)] / s.max_time, 2.0);
    return s.weights.q1 * uc + s.weights.q2 * ut + s.weights.q3 * uc * ut;
  };

  double total = 0.0, none_before = 1.0;
  for (int j = 0; j < J; ++j) {
    total += alpha[static_cast<std::size_t>(j)] * none_before * util_at(j);
    none_before *= 1.0 - alpha[static_cast<std::size_t>(j)];
  }
  total += none_before * util_at(J - 1);
  return total;
}

ProblemScenario fixture() { return load_scenario(std::string(RGSEQ_DATA_DIR) + "/example_j9.json"); }

}  // namespace

TEST_SUITE("utility") {

TEST_CASE("marginal_utility: pinned values") {
  CHECK(marginal_utility(0.0, 132.0) == 1.0);
  CHECK(marginal_utility(132.0, 132.0) == 0.0);
  CHECK(marginal_utility(66.0, 132.0) == 0.75);
  CHECK(marginal_utility(150.0, 132.0) < 0.0);
  CHECK_THROWS_AS(marginal_utility(-1.0, 132.0), std::invalid_argument);
  CHECK_THROWS_AS(marginal_utility(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("stage_utility: pinned values") {
  ProblemScenario s;
  s.max_cost = 1.0;
  s.max_time = 1.0;

  s.weights = {0.5, 0.5, 0.0};
  CHECK(stage_utility(0.0, 0.0, s) == 1.0);

  s.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  CHECK(stage_utility(1.0, 1.0, s) == 0.0);

  s.weights = {0.5, 0.5, 0.0};
  s.max_cost = 132.0;
  s.max_time = 150.0;
  // U(C) = 0.75 at cost 66, U(T) = 0.96 at time 30.
  CHECK(stage_utility(66.0, 30.0, s) == doctest::Approx(0.855).epsilon(1e-12));
}

TEST_CASE("reference scenario: cumulative cost and time are exact") {
  const ProblemScenario s = fixture();
  const Permutation x = {8, 6, 4, 3, 1, 7, 9, 2, 5};
  const StagePlan plan = build_stage_plan(s, x);
  const std::vector<double> cost = {7, 23, 31, 37, 48, 60, 66, 115, 132};
  const std::vector<double> time = {10, 24, 26, 28, 29, 48, 61, 63, 73};
  REQUIRE(plan.cum_cost.size() == 9);
  for (int j = 0; j < 9; ++j) {
    CHECK(plan.cum_cost[static_cast<std::size_t>(j)] == cost[static_cast<std::size_t>(j)]);
    CHECK(plan.cum_time[static_cast<std::size_t>(j)] == time[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("reference scenario: published attainment-probability row") {
  // Published row: (0.00, 0.08, 0.48, 0.87, 0.98, 0.99, 1.00, 1.00, 1.00).
  // The moment formulas implemented exactly as printed give a different
  // profile (first entry ~0.18, saturation from stage 2); kept here verbatim
  // so the mismatch stays visible.
  const ProblemScenario s = fixture();
  const StagePlan plan = build_stage_plan(s, {8, 6, 4, 3, 1, 7, 9, 2, 5});
  const std::vector<double> published = {0.00, 0.08, 0.48, 0.87, 0.98, 0.99, 1.00, 1.00, 1.00};
  for (int j = 0; j < 9; ++j) {
    INFO("stage ", j + 1, ": got ", plan.attain_prob[static_cast<std::size_t>(j)], ", published ",
         published[static_cast<std::size_t>(j)]);
    CHECK(std::abs(plan.attain_prob[static_cast<std::size_t>(j)] -
                   published[static_cast<std::size_t>(j)]) <= 0.03);
  }
}

TEST_CASE("reference scenario: published expected utility") {
  // Published value 0.9185209; the formulas as printed give ~0.9764.
  const ProblemScenario s = fixture();
  const ExpectedUtility u = expected_utility(s, {8, 6, 4, 3, 1, 7, 9, 2, 5});
  INFO("got ", u.value);
  CHECK(std::abs(u.value - 0.9185) <= 0.005);
}

TEST_CASE("stage plan chain: weights always form a distribution") {
  Rng rng(404);
  for (int trial = 0; trial < 500; ++trial) {
    const ProblemScenario s = random_scenario_for_utility(rng);
    const Permutation x = random_sequence(s.task_count(), rng);
    const StagePlan plan = build_stage_plan(s, x);
    double mass = plan.residual_prob;
    double prev_cost = 0.0, prev_time = 0.0;
    for (std::size_t j = 0; j < plan.attain_prob.size(); ++j) {
      const double a = plan.attain_prob[j];
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      CHECK(plan.first_attain_prob[j] >= 0.0);
      mass += plan.first_attain_prob[j];
      CHECK(plan.cum_cost[j] >= prev_cost);
      CHECK(plan.cum_time[j] >= prev_time);
      prev_cost = plan.cum_cost[j];
      prev_time = plan.cum_time[j];
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("instant-attainment scenario stops at stage one") {
  ProblemScenario s;
  s.concerns = {{0.0, 0.02}};
  TaskSpec t;
  t.cost = 5.0;
  t.time = 5.0;
  t.detect = {0.5};
  s.tasks = {t, t, t};
  s.mission_time = 100.0;
  s.target = 0.8;
  s.max_cost = 30.0;
  s.max_time = 30.0;
  // No faults: the moments are (0,0) at every stage, so the target is met at
  // the first check with certainty.
  const StagePlan plan = build_stage_plan(s, {2, 1, 3});
  for (double a : plan.attain_prob) CHECK(a == 1.0);
  CHECK(plan.first_attain_prob[0] == 1.0);
  CHECK(plan.first_attain_prob[1] == 0.0);
  CHECK(plan.residual_prob == 0.0);
  const ExpectedUtility u = expected_utility(s, {2, 1, 3});
  CHECK(u.value == stage_utility(5.0, 5.0, s));
}

TEST_CASE("positive linearized mean is flagged") {
  ProblemScenario s;
  s.concerns = {{0.5, 0.1}};
  TaskSpec t;
  t.cost = 1.0;
  t.time = 1.0;
  t.detect = {0.0};
  s.tasks = {t, t, t};
  s.mission_time = 10.0;
  s.target = 0.8;
  s.max_cost = 10.0;
  s.max_time = 10.0;
  // With zero detection probability, the mean correction grows with each
  // stage and turns the approximate log-reliability positive.
  const StagePlan plan = build_stage_plan(s, {1, 2, 3});
  CHECK(plan.positive_mean);
}

TEST_CASE("single-task program reduces to its stage utility") {
  for (double lambda : {0.0, 0.3, 0.9}) {
    ProblemScenario s;
    s.concerns = {{lambda, 0.05}};
    TaskSpec t;
    t.cost = 4.0;
    t.time = 2.0;
    t.detect = {0.5};
    s.tasks = {t};
    s.mission_time = 50.0;
    s.target = 0.7;
    s.max_cost = 8.0;
    s.max_time = 8.0;
    const ExpectedUtility u = expected_utility(s, {1});
    CHECK(u.value == stage_utility(4.0, 2.0, s));
  }
}

TEST_CASE("expected_utility matches a straight-line recomputation") {
  Rng rng(909);
  for (int trial = 0; trial < 300; ++trial) {
    const ProblemScenario s = random_scenario_for_utility(rng);
    const Permutation x = random_sequence(s.task_count(), rng);
    const double direct = straight_line_expected_utility(s, x);
    const ExpectedUtility u = expected_utility(s, x);
    INFO("trial ", trial, " J=", s.task_count());
    CHECK(u.value == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("sequences agreeing up to a certainly-attained stage have equal utility") {
  const ProblemScenario s = fixture();
  // At this prefix the attainment probability saturates to exactly 1 under
  // the printed formulas, so nothing after the third task can matter.
  const StagePlan probe = build_stage_plan(s, {8, 6, 4, 3, 1, 7, 9, 2, 5});
  REQUIRE(probe.attain_prob[2] == 1.0);
  const ExpectedUtility a = expected_utility(s, {8, 6, 4, 3, 1, 7, 9, 2, 5});
  const ExpectedUtility b = expected_utility(s, {8, 6, 4, 5, 9, 2, 1, 3, 7});
  const ExpectedUtility c = expected_utility(s, {8, 6, 4, 9, 7, 1, 2, 5, 3});
  CHECK(a.value == b.value);
  CHECK(a.value == c.value);
}

TEST_CASE("never-attained program pays the full-program utility") {
  // Saturated detection probabilities make each stage's attainment chance
  // underflow to exactly zero, leaving only the residual full-program term.
  ProblemScenario s;
  s.concerns = {{1.0, 10.0}, {1.0, 10.0}, {1.0, 10.0}, {1.0, 10.0}};
  TaskSpec t;
  t.cost = 3.0;
  t.time = 2.0;
  t.detect = {1.0 - 1e-6, 1.0 - 1e-6, 1.0 - 1e-6, 1.0 - 1e-6};
  s.tasks = {t, t, t};
  s.mission_time = 10.0;
  s.target = 0.9;
  s.max_cost = 18.0;
  s.max_time = 12.0;
  const StagePlan plan = build_stage_plan(s, {1, 2, 3});
  for (double a : plan.attain_prob) CHECK(a == 0.0);
  CHECK(plan.residual_prob == 1.0);
  const ExpectedUtility u = expected_utility(s, {1, 2, 3});
  CHECK(u.value == stage_utility(9.0, 6.0, s));
}

TEST_CASE("cutting a task's cost never lowers expected utility") {
  Rng rng(555);
  for (int trial = 0; trial < 100; ++trial) {
    const ProblemScenario s = random_scenario_for_utility(rng);
    const Permutation x = random_sequence(s.task_count(), rng);
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.task_count())));
    ProblemScenario cheaper = s;
    cheaper.tasks[static_cast<std::size_t>(j)].cost *= rng.uniform(0.1, 0.9);
    CHECK(expected_utility(cheaper, x).value >= expected_utility(s, x).value - 1e-15);
  }
}

TEST_CASE("logit round trip and boundary clamping") {
  CHECK(logit_of(0.5) == 0.0);
  CHECK(logit_of(0.9) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
  const double top = logit_of(1.0);
  const double bottom = logit_of(0.0);
  CHECK(std::isfinite(top));
  CHECK(std::isfinite(bottom));
  // The clamp works on the double nearest to 1 - 1e-12, whose distance from 1
  // is only representable to the grid spacing near 1 (~1.1e-16), so expected
  // values are computed the same way and symmetry is checked to that grain.
  const double hi = 1.0 - 1e-12;
  CHECK(top == std::log(hi / (1.0 - hi)));
  CHECK(bottom == std::log(1e-12 / (1.0 - 1e-12)));
  CHECK(bottom == doctest::Approx(-top).epsilon(1e-4));
  CHECK(logit_of(2.0) == top);    // clamped
  CHECK(logit_of(-1.0) == bottom);
  for (double u : {1e-6, 0.2, 0.5, 0.77, 1.0 - 1e-6})
    CHECK(inverse_logit(logit_of(u)) == doctest::Approx(u).epsilon(1e-9));
  CHECK(inverse_logit(1000.0) == 1.0);
  CHECK(inverse_logit(-1000.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("fast evaluator agrees with the definitional form everywhere") {
  Rng rng(2121);
  for (int trial = 0; trial < 200; ++trial) {
    const ProblemScenario s = random_scenario_for_utility(rng, 6, 6);
    const SequenceEvaluator eval(s);
    CHECK(eval.task_count() == s.task_count());
    for (int k = 0; k < 5; ++k) {
      const Permutation x = random_sequence(s.task_count(), rng);
      const ExpectedUtility definitional = expected_utility(s, x);
      CHECK(std::abs(eval.value(x) - definitional.value) <= 1e-12);
      const ExpectedUtility via_fast = eval.full(x);
      CHECK(via_fast.value == eval.value(x));
      CHECK(via_fast.logit == doctest::Approx(definitional.logit).epsilon(1e-9));
    }
  }
}

TEST_CASE("fast evaluator agrees with the definitional form on the reference scenario") {
  const ProblemScenario s = fixture();
  const SequenceEvaluator eval(s);
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const Permutation x = random_sequence(9, rng);
    CHECK(std::abs(eval.value(x) - expected_utility(s, x).value) <= 1e-12);
  }
}

}  // TEST_SUITE
