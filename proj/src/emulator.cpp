#include "rgseq/emulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "rgseq/parallel.hpp"
#include "rgseq/utility.hpp"

namespace rgseq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogThetaBound = 50.0;
constexpr double kLogAlphaLo = -30.0;
constexpr double kLogAlphaHi = 30.0;
constexpr int kMaxScorerDim = 64;

std::string perm_key(const Permutation& x) {
  std::string k;
  k.reserve(x.size());
  for (int v : x) k.push_back(static_cast<char>(v));
  return k;
}

double cubic_horner(const std::array<double, 4>& b, double f) {
  return b[0] + f * (b[1] + f * (b[2] + f * b[3]));
}

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa <= 0.0 || sbb <= 0.0)
    throw std::domain_error("correlation: undefined on a constant input vector");
  return sab / std::sqrt(saa * sbb);
}

double kendall_tau_b(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  std::int64_t concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j], db = b[i] - b[j];
      if (da == 0.0 && db == 0.0) continue;
      if (da == 0.0) {
        ++ties_a;
      } else if (db == 0.0) {
        ++ties_b;
      } else if ((da > 0.0) == (db > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  const double n0 = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  std::int64_t pair_ties_a = 0, pair_ties_b = 0;
  // tau-b needs the tie counts per distinct value; recompute them directly.
  {
    std::vector<double> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && sa[j + 1] == sa[i]) ++j;
      const std::int64_t t = static_cast<std::int64_t>(j - i + 1);
      pair_ties_a += t * (t - 1) / 2;
      i = j + 1;
    }
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j + 1 < n && sb[j + 1] == sb[i]) ++j;
      const std::int64_t t = static_cast<std::int64_t>(j - i + 1);
      pair_ties_b += t * (t - 1) / 2;
      i = j + 1;
    }
  }
  const double den_a = n0 - static_cast<double>(pair_ties_a);
  const double den_b = n0 - static_cast<double>(pair_ties_b);
  if (den_a <= 0.0 || den_b <= 0.0)
    throw std::domain_error("correlation: undefined on a constant input vector");
  return static_cast<double>(concordant - discordant) / std::sqrt(den_a * den_b);
}

// ---- Nelder-Mead simplex minimization (pinned coefficients 1, 2, 0.5, 0.5).

struct SimplexResult {
  std::vector<double> x;
  double f = kInf;
};

template <class F>
SimplexResult nelder_mead(const F& fn, const std::vector<double>& x0, double step, double tol,
                          int max_evals) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> pts(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
  std::vector<double> fv(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    fv[i] = fn(pts[i]);
    ++evals;
  }
  std::vector<std::size_t> order(n + 1);

  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], second_worst = order[n - 1], worst = order[n];
    if (fv[best] == kInf) break;  // nothing usable anywhere
    const double spread = fv[worst] - fv[best];
    if (spread == spread && spread < tol) break;  // NaN-safe

    std::vector<double> centroid(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == worst) continue;
      for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[k][d];
    }
    for (std::size_t d = 0; d < n; ++d) centroid[d] /= static_cast<double>(n);

    auto blend = [&](double coef) {
      std::vector<double> p(n);
      for (std::size_t d = 0; d < n; ++d) p[d] = centroid[d] + coef * (centroid[d] - pts[worst][d]);
      return p;
    };

    std::vector<double> xr = blend(1.0);
    const double fr = fn(xr);
    ++evals;
    if (fr < fv[best]) {
      std::vector<double> xe = blend(2.0);
      const double fe = fn(xe);
      ++evals;
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second_worst]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
      continue;
    }
    if (fr < fv[worst]) {  // outside contraction
      std::vector<double> xc = blend(0.5);
      const double fc = fn(xc);
      ++evals;
      if (fc <= fr) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
        continue;
      }
    } else {  // inside contraction
      std::vector<double> xc = blend(-0.5);
      const double fc = fn(xc);
      ++evals;
      if (fc < fv[worst]) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
        continue;
      }
    }
    // Shrink toward the best vertex.
    for (std::size_t k = 0; k <= n; ++k) {
      if (k == best) continue;
      for (std::size_t d = 0; d < n; ++d)
        pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
      fv[k] = fn(pts[k]);
      ++evals;
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i <= n; ++i)
    if (fv[i] < fv[best]) best = i;
  return {pts[best], fv[best]};
}

double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

SurrogateParams decode_free_vector(const std::vector<double>& v, int J, ModelKind model) {
  SurrogateParams p;
  p.model = model;
  p.theta.resize(static_cast<std::size_t>(J));
  p.alpha.assign(static_cast<std::size_t>(J), 1.0);
  p.theta[0] = 1.0;
  for (int k = 1; k < J; ++k)
    p.theta[static_cast<std::size_t>(k)] =
        std::exp(clamp(v[static_cast<std::size_t>(k - 1)], -kLogThetaBound, kLogThetaBound));
  if (model == ModelKind::Benter) {
    for (int j = 0; j + 1 < J; ++j)
      p.alpha[static_cast<std::size_t>(j)] = std::exp(
          clamp(v[static_cast<std::size_t>(J - 1 + j)], kLogAlphaLo, kLogAlphaHi));
  }
  p.alpha[static_cast<std::size_t>(J - 1)] = 0.0;
  return p;
}

// (worse-at-front heap comparator lives in propose_candidates below)
struct ScoredPerm {
  double f = 0.0;
  Permutation x;
};

bool better_candidate(const ScoredPerm& a, const ScoredPerm& b) {
  if (a.f != b.f) return a.f > b.f;
  return a.x < b.x;
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Benter: return "benter";
    case ModelKind::PlackettLuce: return "pl";
    case ModelKind::ReversePlackettLuce: return "rpl";
  }
  return "benter";
}

std::string to_string(CorrelationKind k) {
  switch (k) {
    case CorrelationKind::Pearson: return "pearson";
    case CorrelationKind::Spearman: return "spearman";
    case CorrelationKind::Kendall: return "kendall";
  }
  return "pearson";
}

ModelKind model_from_string(const std::string& s) {
  if (s == "benter") return ModelKind::Benter;
  if (s == "pl") return ModelKind::PlackettLuce;
  if (s == "rpl") return ModelKind::ReversePlackettLuce;
  throw std::invalid_argument("unknown model '" + s + "' (expected benter|pl|rpl)");
}

CorrelationKind correlation_from_string(const std::string& s) {
  if (s == "pearson") return CorrelationKind::Pearson;
  if (s == "spearman") return CorrelationKind::Spearman;
  if (s == "kendall") return CorrelationKind::Kendall;
  throw std::invalid_argument("unknown correlation '" + s +
                              "' (expected pearson|spearman|kendall)");
}

void SurrogateParams::validate() const {
  const std::size_t J = theta.size();
  if (J == 0) throw std::invalid_argument("surrogate params: empty theta");
  if (alpha.size() != J) throw std::invalid_argument("surrogate params: alpha/theta size mismatch");
  for (double t : theta)
    if (!(t > 0.0)) throw std::invalid_argument("surrogate params: theta must be positive");
  for (double a : alpha)
    if (!(a >= 0.0)) throw std::invalid_argument("surrogate params: alpha must be >= 0");
  if (alpha[J - 1] != 0.0)
    throw std::invalid_argument("surrogate params: final alpha must be exactly 0");
  if (model != ModelKind::Benter) {
    for (std::size_t j = 0; j + 1 < J; ++j)
      if (alpha[j] != 1.0)
        throw std::invalid_argument("surrogate params: PL/RPL require alpha = (1,...,1,0)");
  }
}

SurrogateScorer::SurrogateScorer(const SurrogateParams& params) {
  params.validate();
  const int J = params.dimension();
  if (J > kMaxScorerDim)
    throw std::invalid_argument("surrogate scorer: dimension above " +
                                std::to_string(kMaxScorerDim));
  log_theta_.resize(static_cast<std::size_t>(J));
  for (int k = 0; k < J; ++k)
    log_theta_[static_cast<std::size_t>(k)] = std::log(params.theta[static_cast<std::size_t>(k)]);
  alpha_ = params.alpha;
  reversed_ = params.model == ModelKind::ReversePlackettLuce;
}

double SurrogateScorer::fhat(const int* x) const {
  const int J = dimension();
  double lt[kMaxScorerDim];
  for (int m = 0; m < J; ++m) {
    const int id = reversed_ ? x[J - 1 - m] : x[m];
    lt[m] = log_theta_[static_cast<std::size_t>(id - 1)];
  }
  double total = 0.0;
  for (int j = 0; j < J; ++j) {
    const double a = alpha_[static_cast<std::size_t>(j)];
    // log-sum-exp over the remaining suffix keeps theta^alpha in range.
    double mx = -kInf;
    for (int m = j; m < J; ++m) mx = std::max(mx, a * lt[m]);
    double s = 0.0;
    for (int m = j; m < J; ++m) s += std::exp(a * lt[m] - mx);
    total += a * lt[j] - (mx + std::log(s));
  }
  return total;
}

double surrogate_value(const Permutation& x, const SurrogateParams& params) {
  params.validate();
  if (static_cast<int>(x.size()) != params.dimension())
    throw std::invalid_argument("surrogate_value: sequence length differs from parameter "
                                "dimension");
  require_permutation(x);
  return SurrogateScorer(params).fhat(x.data());
}

void TrainingSet::validate() const {
  const int N = size();
  if (N < 2) throw std::invalid_argument("training set: need at least 2 sequences");
  if (static_cast<int>(utilities.size()) != N || static_cast<int>(logits.size()) != N)
    throw std::invalid_argument("training set: sequences/utilities/logits size mismatch");
  const std::size_t J = sequences[0].size();
  std::unordered_set<std::string> seen;
  for (int i = 0; i < N; ++i) {
    const auto& x = sequences[static_cast<std::size_t>(i)];
    if (x.size() != J)
      throw std::invalid_argument("training set: sequence " + std::to_string(i) +
                                  " has inconsistent length");
    require_permutation(x);
    if (!seen.insert(perm_key(x)).second)
      throw std::invalid_argument("training set: duplicate sequence at index " +
                                  std::to_string(i));
  }
}

TrainingSet make_training_set(std::vector<Permutation> sequences, std::vector<double> utilities) {
  TrainingSet t;
  t.sequences = std::move(sequences);
  t.utilities = std::move(utilities);
  t.logits.reserve(t.utilities.size());
  for (double u : t.utilities) t.logits.push_back(logit_of(u));
  t.validate();
  return t;
}

double correlation(const std::vector<double>& a, const std::vector<double>& b,
                   CorrelationKind kind) {
  if (a.size() != b.size()) throw std::invalid_argument("correlation: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("correlation: need at least 2 observations");
  switch (kind) {
    case CorrelationKind::Pearson: return pearson(a, b);
    case CorrelationKind::Spearman: return pearson(average_ranks(a), average_ranks(b));
    case CorrelationKind::Kendall: return kendall_tau_b(a, b);
  }
  throw std::invalid_argument("correlation: unknown kind");
}

namespace {

// Least-squares cubic on the standardized basis z = (f - mean)/scale. This
// is the form kept for evaluation: expressing the same polynomial on the raw
// f basis can require coefficients so large that evaluating them cancels
// catastrophically whenever the fitted values barely vary.
struct StdCubic {
  double mean = 0.0;
  double scale = 1.0;
  std::array<double, 4> b{0.0, 0.0, 0.0, 0.0};
};

StdCubic regression_core(const std::vector<double>& fhat_values,
                         const std::vector<double>& logits,
                         std::vector<std::string>* warnings) {
  const std::size_t n = fhat_values.size();
  if (logits.size() != n) throw std::invalid_argument("regression_adjust: length mismatch");
  if (n < 2) throw std::invalid_argument("regression_adjust: need at least 2 points");

  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  double mu = 0.0;
  for (double f : fhat_values) mu += f;
  mu /= static_cast<double>(n);
  double var = 0.0;
  for (double f : fhat_values) var += (f - mu) * (f - mu);
  var /= static_cast<double>(n);
  const double sigma = std::sqrt(var);

  double eta_mean = 0.0;
  for (double e : logits) eta_mean += e;
  eta_mean /= static_cast<double>(n);

  if (sigma <= 0.0) {
    warn("regression adjustment: constant surrogate values; intercept-only fit");
    return {mu, 1.0, {eta_mean, 0.0, 0.0, 0.0}};
  }

  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = (fhat_values[i] - mu) / sigma;

  // Normal equations on the standardized basis (1, z, z^2, z^3).
  double pw[7] = {0, 0, 0, 0, 0, 0, 0};
  double rhs4[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    double zp = 1.0;
    for (int k = 0; k < 7; ++k) {
      pw[k] += zp;
      if (k < 4) rhs4[k] += zp * logits[i];
      zp *= z[i];
    }
  }

  auto solve_spd = [](int k, const double* A_flat, const double* b, double* x) -> bool {
    // Cholesky on a k x k SPD matrix stored row-major; false when a pivot
    // collapses (rank deficiency).
    double L[16] = {0};
    double scale = 0.0;
    for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(A_flat[i * k + i]));
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j <= i; ++j) {
        double s = A_flat[i * k + j];
        for (int t = 0; t < j; ++t) s -= L[i * 4 + t] * L[j * 4 + t];
        if (i == j) {
          if (s <= 1e-12 * scale) return false;
          L[i * 4 + i] = std::sqrt(s);
        } else {
          L[i * 4 + j] = s / L[j * 4 + j];
        }
      }
    }
    double y[4];
    for (int i = 0; i < k; ++i) {
      double s = b[i];
      for (int t = 0; t < i; ++t) s -= L[i * 4 + t] * y[t];
      y[i] = s / L[i * 4 + i];
    }
    for (int i = k - 1; i >= 0; --i) {
      double s = y[i];
      for (int t = i + 1; t < k; ++t) s -= L[t * 4 + i] * x[t];
      x[i] = s / L[i * 4 + i];
    }
    return true;
  };

  double b_std[4] = {0, 0, 0, 0};
  bool cubic_ok = false;
  if (n >= 5) {
    const double A4[16] = {pw[0], pw[1], pw[2], pw[3], pw[1], pw[2], pw[3], pw[4],
                           pw[2], pw[3], pw[4], pw[5], pw[3], pw[4], pw[5], pw[6]};
    cubic_ok = solve_spd(4, A4, rhs4, b_std);
  }
  if (!cubic_ok) {
    warn(n >= 5 ? "regression adjustment: cubic basis rank-deficient; linear fallback"
                : "regression adjustment: too few points for the cubic; linear fallback");
    const double A2[4] = {pw[0], pw[1], pw[1], pw[2]};
    double b2[2] = {0, 0};
    if (solve_spd(2, A2, rhs4, b2)) {
      b_std[0] = b2[0];
      b_std[1] = b2[1];
      b_std[2] = b_std[3] = 0.0;
    } else {
      warn("regression adjustment: linear basis rank-deficient; intercept-only fit");
      return {mu, sigma, {eta_mean, 0.0, 0.0, 0.0}};
    }
  }

  return {mu, sigma, {b_std[0], b_std[1], b_std[2], b_std[3]}};
}

// The same polynomial expressed on the raw f basis, for reporting. With a
// tiny scale these coefficients can be astronomically large (their terms
// cancel almost exactly when evaluated); if the mapping overflows outright,
// the report degrades to the polynomial's value at the training mean.
std::array<double, 4> raw_basis(const StdCubic& fit) {
  const double a = 1.0 / fit.scale, d = -fit.mean / fit.scale;
  const auto& b = fit.b;
  std::array<double, 4> beta{};
  beta[3] = b[3] * a * a * a;
  beta[2] = b[2] * a * a + 3.0 * b[3] * a * a * d;
  beta[1] = b[1] * a + 2.0 * b[2] * a * d + 3.0 * b[3] * a * d * d;
  beta[0] = b[0] + b[1] * d + b[2] * d * d + b[3] * d * d * d;
  for (double c : beta)
    if (!std::isfinite(c)) return {b[0], 0.0, 0.0, 0.0};
  return beta;
}

double std_cubic_value(const FitResult& fit, double fhat) {
  return cubic_horner(fit.beta_std, (fhat - fit.fhat_mean) / fit.fhat_scale);
}

}  // namespace

std::array<double, 4> regression_adjust(const std::vector<double>& fhat_values,
                                        const std::vector<double>& logits,
                                        std::vector<std::string>* warnings) {
  return raw_basis(regression_core(fhat_values, logits, warnings));
}

FitResult fit_surrogate(const TrainingSet& training, CorrelationKind kind, ModelKind model,
                        const FitConfig& config) {
  training.validate();
  if (config.starts < 1) throw std::invalid_argument("fit config: starts must be >= 1");
  const int N = training.size();
  const int J = static_cast<int>(training.sequences[0].size());
  if (J < 2) throw std::invalid_argument("fit: sequences must have at least 2 tasks");

  FitResult out;
  out.correlation_kind = kind;
  out.seed = config.seed;
  out.starts_used = config.starts;
  if (N < 2 * J)
    out.warnings.push_back("training set smaller than 2*J sequences; fit may be unstable");

  const int dim = (J - 1) + (model == ModelKind::Benter ? J - 1 : 0);
  const int max_evals = config.max_evals_per_dim * dim;

  // Objective: negated correlation between training logits and surrogate
  // values; undefined correlations rank as +inf so the search avoids them.
  auto objective = [&](const std::vector<double>& v) -> double {
    const SurrogateParams p = decode_free_vector(v, J, model);
    const SurrogateScorer scorer(p);
    std::vector<double> fh(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
      fh[static_cast<std::size_t>(i)] = scorer.fhat(training.sequences[static_cast<std::size_t>(i)].data());
    double c;
    try {
      c = correlation(training.logits, fh, kind);
    } catch (const std::domain_error&) {
      return kInf;
    }
    if (!std::isfinite(c)) return kInf;
    return -c;
  };

  std::vector<SimplexResult> results(static_cast<std::size_t>(config.starts));
  parallel_for(config.starts, [&](std::int64_t s) {
    std::vector<double> x0(static_cast<std::size_t>(dim), 0.0);
    if (s > 0) {
      Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s)));
      for (double& v : x0) v = rng.normal();
    }
    results[static_cast<std::size_t>(s)] =
        nelder_mead(objective, x0, 0.5, config.spread_tol, max_evals);
  });

  std::size_t best = 0;
  for (std::size_t s = 1; s < results.size(); ++s)
    if (results[s].f < results[best].f) best = s;

  if (!(results[best].f < kInf)) {
    out.degenerate = true;
    out.warnings.push_back(
        "degenerate fit: no start produced a usable objective value; returning the initial "
        "point with zero correlation");
    out.params = decode_free_vector(std::vector<double>(static_cast<std::size_t>(dim), 0.0), J,
                                    model);
    out.correlation_raw = 0.0;
  } else {
    out.params = decode_free_vector(results[best].x, J, model);
    out.correlation_raw = -results[best].f;
  }

  std::vector<double> fh(static_cast<std::size_t>(N));
  const SurrogateScorer scorer(out.params);
  for (int i = 0; i < N; ++i)
    fh[static_cast<std::size_t>(i)] =
        scorer.fhat(training.sequences[static_cast<std::size_t>(i)].data());
  const StdCubic adj = regression_core(fh, training.logits, &out.warnings);
  out.fhat_mean = adj.mean;
  out.fhat_scale = adj.scale;
  out.beta_std = adj.b;
  out.beta = raw_basis(adj);

  std::vector<double> fstar(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i)
    fstar[static_cast<std::size_t>(i)] = std_cubic_value(out, fh[static_cast<std::size_t>(i)]);
  try {
    out.correlation_adjusted = correlation(training.logits, fstar, kind);
  } catch (const std::domain_error&) {
    out.warnings.push_back("adjusted correlation undefined (constant fitted values); reported 0");
    out.correlation_adjusted = 0.0;
  }
  return out;
}

double adjusted_value(const Permutation& x, const FitResult& fit) {
  return std_cubic_value(fit, surrogate_value(x, fit.params));
}

double inverse_logit_value(const Permutation& x, const FitResult& fit) {
  const double fs = adjusted_value(x, fit);
  if (fs >= 0.0) return 1.0 / (1.0 + std::exp(-fs));
  const double e = std::exp(fs);
  return e / (1.0 + e);
}

std::vector<Permutation> propose_candidates(const FitResult& fit, int M, const CandidateMode& mode,
                                            const std::vector<Permutation>& exclude,
                                            std::vector<std::string>* warnings) {
  fit.params.validate();
  if (M < 1) throw std::invalid_argument("propose_candidates: M must be >= 1");
  const int J = fit.params.dimension();

  std::unordered_set<std::string> excluded;
  for (const auto& x : exclude) {
    if (static_cast<int>(x.size()) != J)
      throw std::invalid_argument("propose_candidates: excluded sequence of wrong length");
    excluded.insert(perm_key(x));
  }

  const SurrogateScorer scorer(fit.params);
  auto score = [&](const int* x) { return std_cubic_value(fit, scorer.fhat(x)); };

  std::vector<ScoredPerm> pool;

  if (!mode.sampled) {
    if (J > kEnumerationCap)
      throw std::invalid_argument(
          "propose_candidates: exhaustive mode needs J <= " + std::to_string(kEnumerationCap) +
          "; use sampled mode");
    std::uint64_t total = 1;
    for (int k = 2; k <= J; ++k) total *= static_cast<std::uint64_t>(k);

    // Fixed chunking (independent of worker count) with per-chunk top-M
    // selections merged in chunk order keeps the result deterministic.
    const auto chunks = fixed_chunks(static_cast<std::int64_t>(total));
    std::vector<std::vector<ScoredPerm>> local(chunks.size());
    const auto worse_at_front = [](const ScoredPerm& a, const ScoredPerm& b) {
      return better_candidate(a, b);
    };
    parallel_for(static_cast<std::int64_t>(chunks.size()), [&](std::int64_t ci) {
      const auto [lo, hi] = chunks[static_cast<std::size_t>(ci)];
      Permutation x = nth_permutation(J, static_cast<std::uint64_t>(lo));
      auto& heap = local[static_cast<std::size_t>(ci)];
      heap.reserve(static_cast<std::size_t>(M) + 1);
      for (std::int64_t idx = lo; idx < hi; ++idx) {
        if (excluded.empty() || !excluded.count(perm_key(x))) {
          const double f = score(x.data());
          if (static_cast<int>(heap.size()) < M) {
            heap.push_back({f, x});
            std::push_heap(heap.begin(), heap.end(), worse_at_front);
          } else if (better_candidate({f, x}, heap.front())) {
            std::pop_heap(heap.begin(), heap.end(), worse_at_front);
            heap.back() = {f, x};
            std::push_heap(heap.begin(), heap.end(), worse_at_front);
          }
        }
        std::next_permutation(x.begin(), x.end());
      }
    });
    for (auto& l : local)
      for (auto& e : l) pool.push_back(std::move(e));
  } else {
    Rng rng(mode.seed);
    std::vector<double> pl_alpha(static_cast<std::size_t>(J), 1.0);
    pl_alpha[static_cast<std::size_t>(J - 1)] = 0.0;
    std::unordered_set<std::string> seen;
    std::vector<Permutation> uniques;
    for (std::uint64_t c = 0; c < mode.sample_count; ++c) {
      Permutation x;
      switch (fit.params.model) {
        case ModelKind::Benter: x = sample_benter(fit.params.theta, fit.params.alpha, rng); break;
        case ModelKind::PlackettLuce: x = sample_benter(fit.params.theta, pl_alpha, rng); break;
        case ModelKind::ReversePlackettLuce:
          x = sample_benter(fit.params.theta, pl_alpha, rng);
          std::reverse(x.begin(), x.end());
          break;
      }
      const std::string key = perm_key(x);
      if (excluded.count(key)) continue;
      if (seen.insert(key).second) uniques.push_back(std::move(x));
    }
    pool.resize(uniques.size());
    parallel_for(static_cast<std::int64_t>(uniques.size()), [&](std::int64_t i) {
      auto& slot = pool[static_cast<std::size_t>(i)];
      slot.x = std::move(uniques[static_cast<std::size_t>(i)]);
      slot.f = score(slot.x.data());
    });
    if (static_cast<int>(pool.size()) < M && warnings)
      warnings->push_back("candidate pool holds only " + std::to_string(pool.size()) +
                          " sequences after deduplication/exclusion (requested " +
                          std::to_string(M) + ")");
  }

  std::sort(pool.begin(), pool.end(), better_candidate);
  if (static_cast<int>(pool.size()) > M) pool.resize(static_cast<std::size_t>(M));
  std::vector<Permutation> out;
  out.reserve(pool.size());
  for (auto& e : pool) out.push_back(std::move(e.x));
  return out;
}

nlohmann::ordered_json fit_to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["model"] = to_string(fit.params.model);
  j["correlation_kind"] = to_string(fit.correlation_kind);
  j["theta"] = fit.params.theta;
  j["alpha"] = fit.params.alpha;
  j["beta"] = fit.beta;
  j["fhat_mean"] = fit.fhat_mean;
  j["fhat_scale"] = fit.fhat_scale;
  j["beta_std"] = fit.beta_std;
  j["correlation_raw"] = fit.correlation_raw;
  j["correlation_adjusted"] = fit.correlation_adjusted;
  j["seed"] = fit.seed;
  return j;
}

FitResult fit_from_json(const nlohmann::json& j) {
  FitResult fit;
  fit.params.model = model_from_string(j.at("model").get<std::string>());
  fit.correlation_kind = correlation_from_string(j.at("correlation_kind").get<std::string>());
  fit.params.theta = j.at("theta").get<std::vector<double>>();
  fit.params.alpha = j.at("alpha").get<std::vector<double>>();
  const auto b = j.at("beta").get<std::vector<double>>();
  if (b.size() != 4) throw std::invalid_argument("fit JSON: beta must have 4 entries");
  std::copy(b.begin(), b.end(), fit.beta.begin());
  fit.fhat_mean = j.at("fhat_mean").get<double>();
  fit.fhat_scale = j.at("fhat_scale").get<double>();
  const auto bs = j.at("beta_std").get<std::vector<double>>();
  if (bs.size() != 4) throw std::invalid_argument("fit JSON: beta_std must have 4 entries");
  std::copy(bs.begin(), bs.end(), fit.beta_std.begin());
  fit.correlation_raw = j.at("correlation_raw").get<double>();
  fit.correlation_adjusted = j.at("correlation_adjusted").get<double>();
  fit.seed = j.at("seed").get<std::uint64_t>();
  fit.params.validate();
  return fit;
}

}  // namespace rgseq
