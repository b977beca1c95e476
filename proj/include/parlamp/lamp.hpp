#pragma once

#include <string>
#include <vector>

#include "parlamp/cim.hpp"
#include "parlamp/dataset.hpp"
#include "parlamp/stats.hpp"

namespace parlamp {

// Phase-1 state: the moving support threshold and per-support counts of the
// closed sets discovered so far. CS(lambda) is the suffix sum over counters,
// tracked incrementally in cs_at_lambda.
struct LampState {
  int lambda = 1;
  double alpha = 0.05;
  long long cs_at_lambda = 0;            // sum of cs_counters[s] for s >= lambda
  std::vector<long long> cs_counters;    // indexed by exact support, 0..N

  LampState() = default;
  LampState(int n_total, double alpha_) : alpha(alpha_), cs_counters(n_total + 1, 0) {}
};

// While the threshold condition holds at the current lambda, move it up.
// Lambda rests at the smallest value where the condition fails (capped at N,
// where f(N) would be zero anyway). Returns the new lambda.
int advance_lambda(LampState& state, const StatContext& ctx);

// Count one discovered closed set of the given support, then advance lambda.
// Callers prune below state.lambda, so support >= lambda at entry.
int record_closed_set(LampState& state, const StatContext& ctx, int support);

// Add another state's counters into this one (parallel aggregation), then
// advance lambda over the merged counts.
int merge_counters(LampState& state, const StatContext& ctx,
                   const std::vector<std::pair<int, long long>>& deltas);

// The minimum support implied by a finished phase 1: one below the final
// lambda, floored at 1.
int min_support_from(int final_lambda);

struct ClosedSetRecord {
  std::vector<ItemId> itemset;
  PatternSupport support;
};

struct SignificantPattern {
  std::vector<ItemId> itemset;
  PatternSupport support;
  double p_value = 1.0;
};

struct LampResult {
  double alpha = 0.0;
  int final_lambda = 1;
  int min_support = 1;
  long long cs_count = 0;
  double delta = 0.0;
  std::vector<SignificantPattern> significant;
};

// Phase 1 only: dynamic-threshold search, returns the final lambda.
// With pruning disabled every closed set is enumerated (reference behavior).
int run_phase1_sequential(const TransactionDatabase& db, double alpha, bool prune = true);

// All three phases, single worker. The parallel engine must produce the
// identical result for any worker count.
LampResult run_lamp_sequential(const TransactionDatabase& db, double alpha);

// Shared phase 3: delta = alpha/CS (0 when CS = 0), Fisher-filter at p <= delta.
LampResult extract_significant(const TransactionDatabase& db, double alpha, int final_lambda,
                               std::vector<ClosedSetRecord> closed_sets);

// Deterministic output order: ascending p, then itemset names lexicographic.
void sort_patterns(const TransactionDatabase& db, std::vector<SignificantPattern>& patterns);

// Result table: '#'-prefixed metadata, a header row, then TSV rows.
std::string format_lamp_table(const TransactionDatabase& db, const LampResult& result);

// Closed-set table for plain mining output.
std::string format_closed_table(const TransactionDatabase& db,
                                const std::vector<ClosedSetRecord>& records);

std::string joined_names(const TransactionDatabase& db, const std::vector<ItemId>& itemset);

}  // namespace parlamp
