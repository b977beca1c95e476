#pragma once

#include <cstdint>

#include "parlamp/dataset.hpp"

namespace parlamp {

// Seeded generators for reproducible test and benchmark inputs. All return a
// RawDatabase with both label classes present and every generated item name
// of the form "i<k>".

// Independent Bernoulli(density) item indicators, Bernoulli(pos_rate) labels.
RawDatabase gen_random(std::uint64_t seed, int items, int transactions, double density,
                       double pos_rate = 0.5);

// Like gen_random, plus a planted itemset of `pattern_size` items inserted
// into positive transactions with probability `strength` (and into negative
// ones with probability strength/4), so a significant pattern exists.
RawDatabase gen_planted(std::uint64_t seed, int items, int transactions, double density,
                        int pattern_size, double strength);

// Skewed workload: item 0 sits in nearly every transaction and roots a dense
// clique of correlated items, so one depth-1 subtree dominates the search
// tree; remaining items are sparse noise.
RawDatabase gen_skewed(std::uint64_t seed, int items, int transactions);

// Uniformly dense database for scaling runs.
RawDatabase gen_dense(std::uint64_t seed, int items, int transactions, double density);

}  // namespace parlamp
