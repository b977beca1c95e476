#include "parlamp/cim.hpp"

#include <algorithm>

namespace parlamp {

Bitvec cover_of(const TransactionDatabase& db, const std::vector<ItemId>& itemset) {
  Bitvec cover = db.full_cover();
  for (ItemId i : itemset) cover.and_with(db.item_bitset(i));
  return cover;
}

std::vector<ItemId> closure_of_cover(const TransactionDatabase& db, const Bitvec& cover) {
  std::vector<ItemId> closed;
  for (ItemId j = 0; j < db.num_items(); ++j)
    if (cover.is_subset_of(db.item_bitset(j))) closed.push_back(j);
  return closed;
}

std::vector<ItemId> closure(const TransactionDatabase& db, const std::vector<ItemId>& itemset) {
  return closure_of_cover(db, cover_of(db, itemset));
}

SearchNode make_root(const TransactionDatabase& db) {
  SearchNode root;
  root.cover = db.full_cover();
  root.itemset = closure_of_cover(db, root.cover);
  root.core = kRootCore;
  root.support = db.num_transactions();
  return root;
}

SearchNode make_node(const TransactionDatabase& db, std::vector<ItemId> itemset, ItemId core) {
  SearchNode node;
  node.cover = cover_of(db, itemset);
  node.itemset = std::move(itemset);
  node.core = core;
  node.support = static_cast<int>(node.cover.count());
  return node;
}

bool extend_node(const TransactionDatabase& db, const SearchNode& node, ItemId e,
                 int min_support, SearchNode& out) {
  if (std::binary_search(node.itemset.begin(), node.itemset.end(), e)) return false;
  Bitvec cover = node.cover;
  cover.and_with(db.item_bitset(e));
  int support = static_cast<int>(cover.count());
  if (support < min_support) return false;
  std::vector<ItemId> closed = closure_of_cover(db, cover);
  // Prefix check: nothing below e may have been added.
  for (ItemId j : closed) {
    if (j >= e) break;
    if (!std::binary_search(node.itemset.begin(), node.itemset.end(), j)) return false;
  }
  out.itemset = std::move(closed);
  out.core = e;
  out.cover = std::move(cover);
  out.support = support;
  return true;
}

std::vector<SearchNode> children(const TransactionDatabase& db, const SearchNode& node,
                                 int min_support) {
  std::vector<SearchNode> kids;
  for (ItemId e = std::max<ItemId>(node.core + 1, 0); e < db.num_items(); ++e) {
    SearchNode child;
    if (extend_node(db, node, e, min_support, child)) kids.push_back(std::move(child));
  }
  return kids;
}

long long count_closed_sequential(const TransactionDatabase& db, int min_support,
                                  const NodeVisitor& visit) {
  long long count = 0;
  std::vector<SearchNode> stack;
  SearchNode root = make_root(db);
  if (!root.itemset.empty() && root.support >= min_support) stack.push_back(std::move(root));
  else {
    // The empty root is not a hypothesis; expand it without visiting.
    std::vector<SearchNode> kids = children(db, root, min_support);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
  }
  while (!stack.empty()) {
    SearchNode node = std::move(stack.back());
    stack.pop_back();
    ++count;
    if (visit) visit(node);
    std::vector<SearchNode> kids = children(db, node, min_support);
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(std::move(*it));
  }
  return count;
}

namespace {

long long recurse(const TransactionDatabase& db, const SearchNode& node, int min_support,
                  const NodeVisitor& visit) {
  long long count = 1;
  if (visit) visit(node);
  for (const SearchNode& child : children(db, node, min_support))
    count += recurse(db, child, min_support, visit);
  return count;
}

}  // namespace

long long count_closed_recursive(const TransactionDatabase& db, int min_support,
                                 const NodeVisitor& visit) {
  SearchNode root = make_root(db);
  if (!root.itemset.empty() && root.support >= min_support)
    return recurse(db, root, min_support, visit);
  long long count = 0;
  for (const SearchNode& child : children(db, root, min_support))
    count += recurse(db, child, min_support, visit);
  return count;
}

}  // namespace parlamp
