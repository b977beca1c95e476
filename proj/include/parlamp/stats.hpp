#pragma once

#include <vector>

#include "parlamp/dataset.hpp"

namespace parlamp {

// Immutable per-database context for the statistical tests: N, N_pos, and a
// log-factorial table so binomial coefficients stay in log space (direct
// factorials overflow long before realistic N).
struct StatContext {
  int n_total = 0;
  int n_positive = 0;
  std::vector<double> log_factorials;  // log_factorials[k] = ln(k!)

  static StatContext make(int n_total, int n_positive);

  // ln C(n, k); requires 0 <= k <= n <= n_total.
  double log_choose(int n, int k) const {
    return log_factorials[n] - log_factorials[k] - log_factorials[n - k];
  }
};

// One-sided Fisher exact test: probability of observing n(I) or more
// positives among x(I) draws, P(I) = sum over n_i from n(I) to min(x, N_pos)
// of C(N_pos, n_i) * C(N - N_pos, x - n_i) / C(N, x). Result clamped to [0,1].
double fisher_p(const StatContext& ctx, PatternSupport support);

// Minimum achievable P-value at support x: f(x) = C(N_pos, x) / C(N, x).
// Zero for x > N_pos; monotone non-increasing in x.
double tarone_bound(const StatContext& ctx, int x);

// The threshold condition: f(lambda - 1) > alpha / cs_count. A cs_count of 0
// means no hypotheses, so the condition cannot hold.
bool lamp_condition_holds(const StatContext& ctx, int lambda, long long cs_count, double alpha);

// Bonferroni-style adjusted significance level alpha / cs_count.
double corrected_threshold(double alpha, long long cs_count);

}  // namespace parlamp
