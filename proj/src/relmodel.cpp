#include "rgseq/relmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rgseq {

namespace {

void check_unit_interval(double x, const std::string& what) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument(what + " must lie in [0,1]");
}

// Validates and marks the performed task ids (1-based, distinct).
std::vector<char> performed_mask(const ProblemScenario& s, const std::vector<int>& performed) {
  const int J = s.task_count();
  std::vector<char> mask(static_cast<std::size_t>(J), 0);
  for (int id : performed) {
    if (id < 1 || id > J)
      throw std::invalid_argument("performed set: unknown task id " + std::to_string(id));
    auto& slot = mask[static_cast<std::size_t>(id - 1)];
    if (slot) throw std::invalid_argument("performed set: task id " + std::to_string(id) +
                                          " listed twice");
    slot = 1;
  }
  return mask;
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488); }

}  // namespace

void TradeoffWeights::validate() const {
  if (!(q1 >= 0.0)) throw std::invalid_argument("weights.q1 must be >= 0");
  if (!(q2 >= 0.0)) throw std::invalid_argument("weights.q2 must be >= 0");
  if (std::abs(q1 + q2 + q3 - 1.0) > 1e-12)
    throw std::invalid_argument("weights: q1+q2+q3 must equal 1");
  const double lo = -std::min(q1, q2), hi = 1.0 - std::max(q1, q2);
  if (q3 < lo - 1e-12 || q3 > hi + 1e-12)
    throw std::invalid_argument("weights.q3 out of admissible range");
}

void ProblemScenario::validate() const {
  if (concerns.empty()) throw std::invalid_argument("concerns: list is empty");
  if (tasks.empty()) throw std::invalid_argument("tasks: list is empty");
  const std::size_t I = concerns.size();
  for (std::size_t i = 0; i < I; ++i) {
    const auto& c = concerns[i];
    if (!(c.lambda >= 0.0 && c.lambda <= 1.0))
      throw std::invalid_argument("concerns[" + std::to_string(i) + "].lambda must lie in [0,1]");
    if (!(c.epsilon >= 0.0))
      throw std::invalid_argument("concerns[" + std::to_string(i) + "].epsilon must be >= 0");
  }
  for (std::size_t j = 0; j < tasks.size(); ++j) {
    const auto& t = tasks[j];
    if (!(t.cost >= 0.0))
      throw std::invalid_argument("tasks[" + std::to_string(j) + "].cost must be >= 0");
    if (!(t.time >= 0.0))
      throw std::invalid_argument("tasks[" + std::to_string(j) + "].time must be >= 0");
    if (t.detect.size() != I)
      throw std::invalid_argument("tasks[" + std::to_string(j) + "].detect must have length " +
                                  std::to_string(I));
    for (std::size_t i = 0; i < I; ++i)
      if (!(t.detect[i] >= 0.0 && t.detect[i] <= 1.0))
        throw std::invalid_argument("tasks[" + std::to_string(j) + "].detect[" +
                                    std::to_string(i) + "] must lie in [0,1]");
  }
  if (!(mission_time >= 0.0)) throw std::invalid_argument("mission_time must be >= 0");
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target must lie in (0,1)");
  if (!(max_cost > 0.0)) throw std::invalid_argument("max_cost must be > 0");
  if (!(max_time > 0.0)) throw std::invalid_argument("max_time must be > 0");
  weights.validate();
}

std::vector<std::string> ProblemScenario::warnings() const {
  std::vector<std::string> w;
  double total_cost = 0.0, total_time = 0.0;
  for (const auto& t : tasks) {
    total_cost += t.cost;
    total_time += t.time;
  }
  if (total_cost > max_cost)
    w.push_back("total task cost " + std::to_string(total_cost) + " exceeds max_cost " +
                std::to_string(max_cost) + "; marginal cost utility can go negative");
  if (total_time > max_time)
    w.push_back("total task time " + std::to_string(total_time) + " exceeds max_time " +
                std::to_string(max_time) + "; marginal time utility can go negative");
  // The linearized log-reliability mean can exceed 0 whenever a concern's
  // detection-miss sum can exceed 1 across the full program.
  for (std::size_t i = 0; i < concerns.size(); ++i) {
    double miss_sum = 0.0;
    for (const auto& t : tasks) miss_sum += 1.0 - t.detect[i];
    if (concerns[i].lambda > 0.0 && miss_sum > 1.0) {
      w.push_back(
          "rare-event approximation can produce a positive log-reliability mean "
          "for this scenario (first such concern index " +
          std::to_string(i) + ")");
      break;
    }
  }
  return w;
}

double component_reliability(const Concern& concern, double t) {
  if (t < 0.0) throw std::invalid_argument("component_reliability: t must be >= 0");
  return std::exp(-concern.epsilon * t);
}

double posterior_fault_prob(double lambda, const std::vector<double>& detect_probs) {
  check_unit_interval(lambda, "posterior_fault_prob: lambda");
  double miss = 1.0;
  for (double p : detect_probs) {
    check_unit_interval(p, "posterior_fault_prob: detection probability");
    miss *= 1.0 - p;
  }
  const double denom = 1.0 - lambda * (1.0 - miss);
  if (denom <= 0.0) return 0.0;  // only reachable at lambda=1, miss=0
  return lambda * miss / denom;
}

double expected_reliability(const ProblemScenario& s, const std::vector<int>& performed,
                            double t) {
  const auto mask = performed_mask(s, performed);
  double prod = 1.0;
  for (int i = 0; i < s.concern_count(); ++i) {
    const auto& c = s.concerns[static_cast<std::size_t>(i)];
    double miss = 1.0;
    for (int j = 0; j < s.task_count(); ++j)
      if (mask[static_cast<std::size_t>(j)])
        miss *= 1.0 - s.tasks[static_cast<std::size_t>(j)].detect[static_cast<std::size_t>(i)];
    const double r = component_reliability(c, t);
    prod *= 1.0 - (1.0 - r) * c.lambda * miss;
  }
  return prod;
}

double oracle_expected_reliability(const ProblemScenario& s, const std::vector<int>& performed,
                                   double t) {
  const int I = s.concern_count();
  if (I > 12) throw std::invalid_argument("oracle_expected_reliability: I must be <= 12");
  const auto mask = performed_mask(s, performed);
  std::vector<int> done;
  for (int j = 0; j < s.task_count(); ++j)
    if (mask[static_cast<std::size_t>(j)]) done.push_back(j);
  const int K = static_cast<int>(done.size());

  double total = 0.0;
  for (std::uint32_t z = 0; z < (1u << I); ++z) {
    double pz = 1.0;
    for (int i = 0; i < I; ++i) {
      const double lam = s.concerns[static_cast<std::size_t>(i)].lambda;
      pz *= (z >> i) & 1u ? lam : 1.0 - lam;
    }
    if (pz == 0.0) continue;
    // For each present fault, enumerate detection outcomes over performed
    // tasks; any detection designs the fault out, otherwise it survives into
    // the mission and contributes its component reliability.
    double rel_given_z = 1.0;
    for (int i = 0; i < I; ++i) {
      if (!((z >> i) & 1u)) continue;
      double undetected = 0.0;
      for (std::uint32_t d = 0; d < (1u << K); ++d) {
        double pd = 1.0;
        bool any = false;
        for (int k = 0; k < K; ++k) {
          const double p =
              s.tasks[static_cast<std::size_t>(done[static_cast<std::size_t>(k)])].detect
                  [static_cast<std::size_t>(i)];
          if ((d >> k) & 1u) {
            pd *= p;
            any = true;
          } else {
            pd *= 1.0 - p;
          }
        }
        if (!any) undetected += pd;
      }
      const double r = component_reliability(s.concerns[static_cast<std::size_t>(i)], t);
      rel_given_z *= (1.0 - undetected) * 1.0 + undetected * r;
    }
    total += pz * rel_given_z;
  }
  return total;
}

ReliabilityMoments rare_event_moments(const ProblemScenario& s, const std::vector<int>& performed,
                                      double t) {
  const auto mask = performed_mask(s, performed);
  double m_base = 0.0, m_correction = 0.0, v = 0.0;
  for (int i = 0; i < s.concern_count(); ++i) {
    const auto& c = s.concerns[static_cast<std::size_t>(i)];
    const double w = (1.0 - component_reliability(c, t)) * c.lambda;
    m_base += w;
    double miss_sum = 0.0, var_sum = 0.0;
    for (int j = 0; j < s.task_count(); ++j) {
      if (!mask[static_cast<std::size_t>(j)]) continue;
      const double p = s.tasks[static_cast<std::size_t>(j)].detect[static_cast<std::size_t>(i)];
      miss_sum += 1.0 - p;
      var_sum += (1.0 - p) * p;
    }
    m_correction += w * miss_sum;
    v += w * w * var_sum;
  }
  return {-(m_base - m_correction), v};
}

double prob_meets_target(const ReliabilityMoments& moments, double R0) {
  if (!(R0 > 0.0 && R0 < 1.0))
    throw std::invalid_argument("prob_meets_target: R0 must lie in (0,1)");
  const double log_r0 = std::log(R0);
  if (moments.v <= 0.0) return moments.m >= log_r0 ? 1.0 : 0.0;
  return 1.0 - standard_normal_cdf((log_r0 - moments.m) / std::sqrt(moments.v));
}

}  // namespace rgseq
