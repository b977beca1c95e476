#pragma once

#include <functional>
#include <vector>

#include "parlamp/dataset.hpp"

namespace parlamp {

inline constexpr ItemId kRootCore = -1;

// One node of the closed-itemset search tree. The itemset alone identifies
// the node; the cover is a cache the receiver of a transferred node rebuilds.
struct SearchNode {
  std::vector<ItemId> itemset;  // sorted; equals its own closure
  ItemId core = kRootCore;      // generating item (kRootCore for the root)
  Bitvec cover;
  int support = 0;

  bool operator==(const SearchNode& o) const {
    return itemset == o.itemset && core == o.core;
  }
};

Bitvec cover_of(const TransactionDatabase& db, const std::vector<ItemId>& itemset);

// All items whose bitset contains the given cover.
std::vector<ItemId> closure_of_cover(const TransactionDatabase& db, const Bitvec& cover);

std::vector<ItemId> closure(const TransactionDatabase& db, const std::vector<ItemId>& itemset);

// Root node: closure of the empty itemset over the full cover.
SearchNode make_root(const TransactionDatabase& db);

// Rebuild a node from its wire form (itemset + core).
SearchNode make_node(const TransactionDatabase& db, std::vector<ItemId> itemset, ItemId core);

// One prefix-preserving closure extension of `node` by item e: the candidate
// closure(itemset + e) is accepted iff its support meets min_support and it
// adds no item below e outside node.itemset. Returns false when filtered.
bool extend_node(const TransactionDatabase& db, const SearchNode& node, ItemId e,
                 int min_support, SearchNode& out);

// All accepted extensions for e > node.core, ascending. Over the whole tree
// every closed itemset of sufficient support appears exactly once.
std::vector<SearchNode> children(const TransactionDatabase& db, const SearchNode& node,
                                 int min_support);

using NodeVisitor = std::function<void(const SearchNode&)>;

// Stack-based DFS (children pushed in reverse so the order matches recursion).
// Returns the number of closed itemsets visited; the empty root is skipped.
long long count_closed_sequential(const TransactionDatabase& db, int min_support,
                                  const NodeVisitor& visit = nullptr);

// Plain recursive DFS, kept as the traversal-order reference.
long long count_closed_recursive(const TransactionDatabase& db, int min_support,
                                 const NodeVisitor& visit = nullptr);

}  // namespace parlamp
