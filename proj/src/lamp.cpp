#include "parlamp/lamp.hpp"

#include <algorithm>
#include <cstdio>

#include "parlamp/errors.hpp"

namespace parlamp {

int advance_lambda(LampState& state, const StatContext& ctx) {
  while (state.lambda < ctx.n_total &&
         lamp_condition_holds(ctx, state.lambda, state.cs_at_lambda, state.alpha)) {
    state.cs_at_lambda -= state.cs_counters[state.lambda];
    ++state.lambda;
  }
  return state.lambda;
}

int record_closed_set(LampState& state, const StatContext& ctx, int support) {
  if (support < 0 || support >= static_cast<int>(state.cs_counters.size()))
    throw InvariantViolation("record_closed_set: support out of range");
  ++state.cs_counters[support];
  if (support >= state.lambda) ++state.cs_at_lambda;
  return advance_lambda(state, ctx);
}

int merge_counters(LampState& state, const StatContext& ctx,
                   const std::vector<std::pair<int, long long>>& deltas) {
  for (auto [support, count] : deltas) {
    if (support < 0 || support >= static_cast<int>(state.cs_counters.size()))
      throw InvariantViolation("merge_counters: support out of range");
    state.cs_counters[support] += count;
    if (support >= state.lambda) state.cs_at_lambda += count;
  }
  return advance_lambda(state, ctx);
}

int min_support_from(int final_lambda) { return std::max(1, final_lambda - 1); }

int run_phase1_sequential(const TransactionDatabase& db, double alpha, bool prune) {
  StatContext ctx = StatContext::make(db.num_transactions(), db.num_positive());
  LampState state(db.num_transactions(), alpha);
  std::vector<SearchNode> stack;

  SearchNode root = make_root(db);
  if (!root.itemset.empty()) record_closed_set(state, ctx, root.support);
  auto push_children = [&](const SearchNode& node) {
    std::vector<SearchNode> kids = children(db, node, prune ? state.lambda : 1);
    for (const SearchNode& child : kids) record_closed_set(state, ctx, child.support);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
  };
  push_children(root);
  while (!stack.empty()) {
    SearchNode node = std::move(stack.back());
    stack.pop_back();
    if (prune && node.support < state.lambda) continue;  // stale: threshold moved past it
    push_children(node);
  }
  return state.lambda;
}

LampResult extract_significant(const TransactionDatabase& db, double alpha, int final_lambda,
                               std::vector<ClosedSetRecord> closed_sets) {
  StatContext ctx = StatContext::make(db.num_transactions(), db.num_positive());
  LampResult result;
  result.alpha = alpha;
  result.final_lambda = final_lambda;
  result.min_support = min_support_from(final_lambda);
  result.cs_count = static_cast<long long>(closed_sets.size());
  result.delta = result.cs_count > 0 ? corrected_threshold(alpha, result.cs_count) : 0.0;
  for (ClosedSetRecord& rec : closed_sets) {
    double p = fisher_p(ctx, rec.support);
    if (p <= result.delta)
      result.significant.push_back({std::move(rec.itemset), rec.support, p});
  }
  sort_patterns(db, result.significant);
  return result;
}

LampResult run_lamp_sequential(const TransactionDatabase& db, double alpha) {
  int final_lambda = run_phase1_sequential(db, alpha, /*prune=*/true);
  int min_support = min_support_from(final_lambda);
  std::vector<ClosedSetRecord> closed;
  count_closed_sequential(db, min_support, [&](const SearchNode& node) {
    PatternSupport s{node.support,
                     static_cast<int>(node.cover.and_count(db.positive_bitset()))};
    closed.push_back({node.itemset, s});
  });
  return extract_significant(db, alpha, final_lambda, std::move(closed));
}

std::string joined_names(const TransactionDatabase& db, const std::vector<ItemId>& itemset) {
  std::string out;
  for (std::size_t i = 0; i < itemset.size(); ++i) {
    if (i) out += ';';
    out += db.item_name(itemset[i]);
  }
  return out;
}

void sort_patterns(const TransactionDatabase& db, std::vector<SignificantPattern>& patterns) {
  std::vector<std::pair<std::vector<std::string>, std::size_t>> keys(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    keys[i].second = i;
    for (ItemId id : patterns[i].itemset) keys[i].first.push_back(db.item_name(id));
  }
  std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
    double pa = patterns[a.second].p_value, pb = patterns[b.second].p_value;
    if (pa != pb) return pa < pb;
    return a.first < b.first;
  });
  std::vector<SignificantPattern> sorted;
  sorted.reserve(patterns.size());
  for (const auto& k : keys) sorted.push_back(std::move(patterns[k.second]));
  patterns = std::move(sorted);
}

namespace {

std::string fmt_sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::string format_lamp_table(const TransactionDatabase& db, const LampResult& result) {
  std::string out;
  out += "# N\t" + std::to_string(db.num_transactions()) + "\n";
  out += "# N_pos\t" + std::to_string(db.num_positive()) + "\n";
  out += "# alpha\t" + fmt_g(result.alpha) + "\n";
  out += "# lambda\t" + std::to_string(result.final_lambda) + "\n";
  out += "# min_support\t" + std::to_string(result.min_support) + "\n";
  out += "# CS\t" + std::to_string(result.cs_count) + "\n";
  out += "# delta\t" + fmt_sci(result.delta) + "\n";
  out += "p_value\tsupport_total\tsupport_positive\titems\n";
  for (const SignificantPattern& p : result.significant) {
    out += fmt_sci(p.p_value) + "\t" + std::to_string(p.support.total) + "\t" +
           std::to_string(p.support.positive) + "\t" + joined_names(db, p.itemset) + "\n";
  }
  return out;
}

std::string format_closed_table(const TransactionDatabase& db,
                                const std::vector<ClosedSetRecord>& records) {
  std::string out = "support_total\tsupport_positive\titems\n";
  for (const ClosedSetRecord& r : records) {
    out += std::to_string(r.support.total) + "\t" + std::to_string(r.support.positive) + "\t" +
           joined_names(db, r.itemset) + "\n";
  }
  return out;
}

}  // namespace parlamp
