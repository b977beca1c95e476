#include "parlamp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parlamp/errors.hpp"

namespace parlamp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln f(x), or -inf where f(x) = 0.
double log_tarone(const StatContext& ctx, int x) {
  if (x < 0 || x > ctx.n_total)
    throw DataError("tarone_bound: support out of range: " + std::to_string(x));
  if (x > ctx.n_positive) return kNegInf;
  return ctx.log_choose(ctx.n_positive, x) - ctx.log_choose(ctx.n_total, x);
}

}  // namespace

StatContext StatContext::make(int n_total, int n_positive) {
  if (n_total < 0 || n_positive < 0 || n_positive > n_total)
    throw DataError("invalid statistic context: N=" + std::to_string(n_total) +
                    " N_pos=" + std::to_string(n_positive));
  StatContext ctx;
  ctx.n_total = n_total;
  ctx.n_positive = n_positive;
  ctx.log_factorials.resize(n_total + 1);
  ctx.log_factorials[0] = 0.0;
  for (int k = 1; k <= n_total; ++k)
    ctx.log_factorials[k] = ctx.log_factorials[k - 1] + std::log(static_cast<double>(k));
  return ctx;
}

double fisher_p(const StatContext& ctx, PatternSupport support) {
  const int n_total = ctx.n_total;
  const int n_pos = ctx.n_positive;
  const int n_neg = n_total - n_pos;
  const int x = support.total;
  const int n = support.positive;
  if (x < 0 || x > n_total || n < 0 || n > x || n > n_pos || x - n > n_neg)
    throw DataError("fisher_p: invalid contingency: x=" + std::to_string(x) +
                    " n=" + std::to_string(n));

  // Sum the upper tail in log space, factoring out the largest term.
  const int hi = std::min(x, n_pos);
  const int lo = std::max(n, x - n_neg);
  if (lo == std::max(0, x - n_neg)) return 1.0;  // tail covers the whole distribution
  const double log_denom = ctx.log_choose(n_total, x);
  std::vector<double> terms;
  terms.reserve(hi - lo + 1);
  double max_term = kNegInf;
  for (int ni = lo; ni <= hi; ++ni) {
    double t = ctx.log_choose(n_pos, ni) + ctx.log_choose(n_neg, x - ni) - log_denom;
    terms.push_back(t);
    max_term = std::max(max_term, t);
  }
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  double p = std::exp(max_term) * sum;
  return std::clamp(p, 0.0, 1.0);
}

double tarone_bound(const StatContext& ctx, int x) {
  double lf = log_tarone(ctx, x);
  return lf == kNegInf ? 0.0 : std::exp(lf);
}

bool lamp_condition_holds(const StatContext& ctx, int lambda, long long cs_count, double alpha) {
  if (lambda < 1) throw DataError("lamp_condition_holds: lambda must be >= 1");
  if (cs_count <= 0) return false;
  double lf = log_tarone(ctx, lambda - 1);
  if (lf == kNegInf) return false;
  // f(lambda-1) > alpha / cs_count, compared in log space to survive tiny f.
  return lf > std::log(alpha) - std::log(static_cast<double>(cs_count));
}

double corrected_threshold(double alpha, long long cs_count) {
  if (cs_count < 1)
    throw InvariantViolation("corrected_threshold: cs_count must be >= 1");
  return alpha / static_cast<double>(cs_count);
}

}  // namespace parlamp
