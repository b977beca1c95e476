#include "parlamp/oracle.hpp"

#include <algorithm>

#include "parlamp/errors.hpp"
#include "parlamp/stats.hpp"

namespace parlamp {

namespace {

struct MaskDb {
  std::vector<std::uint32_t> row_masks;
  std::vector<std::uint8_t> labels;
  int items = 0;
};

MaskDb to_masks(const RawDatabase& raw) {
  int items = static_cast<int>(raw.item_names.size());
  if (items > kOracleMaxItems)
    throw DataError("oracle guard: " + std::to_string(items) + " items exceeds the limit of " +
                    std::to_string(kOracleMaxItems));
  MaskDb db;
  db.items = items;
  db.labels = raw.labels;
  for (const auto& row : raw.rows) {
    std::uint32_t m = 0;
    for (ItemId i : row) m |= 1u << i;
    db.row_masks.push_back(m);
  }
  return db;
}

std::vector<ItemId> mask_to_items(std::uint32_t mask) {
  std::vector<ItemId> items;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1u) items.push_back(i);
  return items;
}

// Enumerate distinct non-empty closed itemsets: a subset is closed iff the
// AND of its covering rows equals the subset itself.
void for_each_closed(const MaskDb& db, int min_support,
                     const std::function<void(std::uint32_t, int, int)>& emit) {
  std::uint32_t universe = db.items >= 32 ? ~0u : (1u << db.items) - 1u;
  for (std::uint32_t mask = 1; mask <= universe; ++mask) {
    std::uint32_t closure = universe;
    int total = 0, positive = 0;
    for (std::size_t t = 0; t < db.row_masks.size(); ++t) {
      if ((db.row_masks[t] & mask) == mask) {
        closure &= db.row_masks[t];
        ++total;
        positive += db.labels[t];
      }
    }
    if (total >= min_support && closure == mask) emit(mask, total, positive);
  }
}

}  // namespace

std::vector<ClosedSetRecord> oracle_closed_sets(const RawDatabase& raw, int min_support) {
  MaskDb db = to_masks(raw);
  std::vector<ClosedSetRecord> records;
  for_each_closed(db, min_support, [&](std::uint32_t mask, int total, int positive) {
    records.push_back({mask_to_items(mask), {total, positive}});
  });
  std::sort(records.begin(), records.end(),
            [](const ClosedSetRecord& a, const ClosedSetRecord& b) { return a.itemset < b.itemset; });
  return records;
}

OracleLamp oracle_lamp(const RawDatabase& raw, double alpha) {
  MaskDb db = to_masks(raw);
  int n_total = static_cast<int>(raw.rows.size());
  int n_positive = 0;
  for (std::uint8_t l : raw.labels) n_positive += l;
  StatContext ctx = StatContext::make(n_total, n_positive);

  std::vector<long long> counters(n_total + 1, 0);
  for_each_closed(db, 1, [&](std::uint32_t, int total, int) { ++counters[total]; });

  OracleLamp result;
  result.final_lambda = n_total;
  long long cs = 0;
  for (int s = 1; s <= n_total; ++s) cs += counters[s];
  for (int lambda = 1; lambda <= n_total; ++lambda) {
    if (!lamp_condition_holds(ctx, lambda, cs, alpha)) {
      result.final_lambda = lambda;
      break;
    }
    cs -= counters[lambda];
  }

  result.min_support = min_support_from(result.final_lambda);
  result.closed_at_min_support = oracle_closed_sets(raw, result.min_support);
  result.cs_count = static_cast<long long>(result.closed_at_min_support.size());
  result.delta = result.cs_count > 0 ? corrected_threshold(alpha, result.cs_count) : 0.0;
  for (const ClosedSetRecord& rec : result.closed_at_min_support) {
    double p = fisher_p(ctx, rec.support);
    if (p <= result.delta) result.significant.push_back({rec.itemset, rec.support, p});
  }
  return result;
}

namespace {

std::vector<std::vector<std::uint64_t>> pascal(int n) {
  std::vector<std::vector<std::uint64_t>> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    c[i].assign(i + 1, 1);
    for (int k = 1; k < i; ++k) c[i][k] = c[i - 1][k - 1] + c[i - 1][k];
  }
  return c;
}

std::uint64_t choose(const std::vector<std::vector<std::uint64_t>>& c, int n, int k) {
  if (k < 0 || k > n) return 0;
  return c[n][k];
}

}  // namespace

Rational exact_fisher_p(int n_total, int n_positive, int x, int n) {
  if (n_total > 30) throw DataError("exact_fisher_p: N must be <= 30");
  auto c = pascal(n_total);
  Rational r;
  r.den = choose(c, n_total, x);
  int n_negative = n_total - n_positive;
  for (int ni = n; ni <= std::min(x, n_positive); ++ni) {
    if (x - ni > n_negative) continue;
    r.num += choose(c, n_positive, ni) * choose(c, n_negative, x - ni);
  }
  return r;
}

Rational exact_tarone_bound(int n_total, int n_positive, int x) {
  if (n_total > 30) throw DataError("exact_tarone_bound: N must be <= 30");
  auto c = pascal(n_total);
  Rational r;
  r.num = choose(c, n_positive, x);
  r.den = choose(c, n_total, x);
  return r;
}

}  // namespace parlamp
