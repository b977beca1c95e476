#include "parlamp/synth.hpp"

#include <algorithm>
#include <random>

namespace parlamp {

namespace {

std::vector<std::string> make_names(int items) {
  std::vector<std::string> names(items);
  for (int i = 0; i < items; ++i) names[i] = "i" + std::to_string(i);
  return names;
}

// Ensure both label classes appear (flip the first labels if needed).
void balance_labels(RawDatabase& raw) {
  if (raw.labels.size() < 2) return;
  bool has0 = false, has1 = false;
  for (std::uint8_t l : raw.labels) (l ? has1 : has0) = true;
  if (!has0) raw.labels[0] = 0;
  if (!has1) raw.labels[0] = 1;
}

void finish_row(std::vector<ItemId>& row) {
  std::sort(row.begin(), row.end());
  row.erase(std::unique(row.begin(), row.end()), row.end());
}

}  // namespace

RawDatabase gen_random(std::uint64_t seed, int items, int transactions, double density,
                       double pos_rate) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution has_item(density);
  std::bernoulli_distribution is_pos(pos_rate);
  RawDatabase raw;
  raw.item_names = make_names(items);
  for (int t = 0; t < transactions; ++t) {
    std::vector<ItemId> row;
    for (int i = 0; i < items; ++i)
      if (has_item(rng)) row.push_back(i);
    raw.rows.push_back(std::move(row));
    raw.labels.push_back(is_pos(rng) ? 1 : 0);
  }
  balance_labels(raw);
  return raw;
}

RawDatabase gen_planted(std::uint64_t seed, int items, int transactions, double density,
                        int pattern_size, double strength) {
  RawDatabase raw = gen_random(seed, items, transactions, density);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  pattern_size = std::min(pattern_size, items);
  for (std::size_t t = 0; t < raw.rows.size(); ++t) {
    double p = raw.labels[t] ? strength : strength / 4.0;
    if (std::bernoulli_distribution(p)(rng)) {
      for (int i = 0; i < pattern_size; ++i) raw.rows[t].push_back(i);
      finish_row(raw.rows[t]);
    }
  }
  return raw;
}

RawDatabase gen_skewed(std::uint64_t seed, int items, int transactions) {
  std::mt19937_64 rng(seed);
  RawDatabase raw;
  raw.item_names = make_names(items);
  int clique = std::max(2, items / 2);
  std::bernoulli_distribution in_clique(0.6);
  std::bernoulli_distribution sparse(0.25);
  std::bernoulli_distribution is_pos(0.5);
  for (int t = 0; t < transactions; ++t) {
    std::vector<ItemId> row;
    if (t % 16 != 0) {
      // Rows holding item 0 also hold the dense clique, so every clique
      // combination closes onto item 0 and lands in its depth-1 subtree.
      row.push_back(0);
      for (int i = 1; i <= clique; ++i)
        if (in_clique(rng)) row.push_back(i);
    } else {
      for (int i = clique + 1; i < items; ++i)
        if (sparse(rng)) row.push_back(i);
    }
    finish_row(row);
    raw.rows.push_back(std::move(row));
    raw.labels.push_back(is_pos(rng) ? 1 : 0);
  }
  balance_labels(raw);
  return raw;
}

RawDatabase gen_dense(std::uint64_t seed, int items, int transactions, double density) {
  return gen_random(seed, items, transactions, density);
}

}  // namespace parlamp
