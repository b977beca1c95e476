#pragma once

#include <cstdint>

#include "parlamp/dataset.hpp"
#include "parlamp/lamp.hpp"

namespace parlamp {

// Reference implementations used only for verification. They work from the
// RawDatabase rows (no bitsets, no search tree): enumerate every subset of
// items, keep the distinct closures, and solve the threshold equation by a
// plain scan. Exponential in the item count, hence the guard.

inline constexpr int kOracleMaxItems = 20;

// All distinct non-empty closed itemsets with support >= min_support, sorted
// lexicographically. Throws DataError beyond kOracleMaxItems items.
std::vector<ClosedSetRecord> oracle_closed_sets(const RawDatabase& raw, int min_support);

struct OracleLamp {
  int final_lambda = 1;
  int min_support = 1;
  long long cs_count = 0;
  double delta = 0.0;
  std::vector<ClosedSetRecord> closed_at_min_support;
  std::vector<SignificantPattern> significant;  // unsorted; compare as sets
};

// Full-enumeration LAMP: count every closed set, scan lambda upward until the
// threshold condition first fails (capped at N), then re-filter and test.
OracleLamp oracle_lamp(const RawDatabase& raw, double alpha);

// Exact rational statistics over uint64 Pascal binomials, valid for N <= 30
// (all intermediate sums fit well under 2^63). Returned as numerator and
// denominator without reduction.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational exact_fisher_p(int n_total, int n_positive, int x, int n);
Rational exact_tarone_bound(int n_total, int n_positive, int x);

}  // namespace parlamp
