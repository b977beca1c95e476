#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "parlamp/cim.hpp"
#include "parlamp/dataset.hpp"
#include "parlamp/oracle.hpp"
#include "parlamp/synth.hpp"

using namespace parlamp;

namespace {

// {a,b}, {a,b,c}, {c} with labels 1,1,0: the worked example database.
RawDatabase tiny_raw() {
  RawDatabase raw;
  raw.rows = {{0, 1}, {0, 1, 2}, {2}};
  raw.labels = {1, 1, 0};
  raw.item_names = {"a", "b", "c"};
  return raw;
}

struct Visit {
  std::vector<ItemId> itemset;
  int support;
  bool operator==(const Visit& o) const = default;
  bool operator<(const Visit& o) const {
    return itemset != o.itemset ? itemset < o.itemset : support < o.support;
  }
};

std::vector<Visit> collect_loop(const TransactionDatabase& db, int min_support) {
  std::vector<Visit> out;
  count_closed_sequential(db, min_support,
                          [&](const SearchNode& n) { out.push_back({n.itemset, n.support}); });
  return out;
}

std::vector<Visit> collect_recursive(const TransactionDatabase& db, int min_support) {
  std::vector<Visit> out;
  count_closed_recursive(db, min_support,
                         [&](const SearchNode& n) { out.push_back({n.itemset, n.support}); });
  return out;
}

}  // namespace

TEST_CASE("closure worked examples") {
  TransactionDatabase db = TransactionDatabase::from_raw(tiny_raw());
  CHECK(closure(db, {0}) == std::vector<ItemId>{0, 1});  // {a} -> {a,b}
  CHECK(closure(db, {2}) == std::vector<ItemId>{2});     // {c} already closed
  CHECK(closure(db, {}) == std::vector<ItemId>{});       // no universal item
  CHECK(closure(db, {1, 2}) == std::vector<ItemId>{0, 1, 2});
}

TEST_CASE("children of the root follow the ppc rule") {
  TransactionDatabase db = TransactionDatabase::from_raw(tiny_raw());
  SearchNode root = make_root(db);
  CHECK(root.itemset.empty());
  CHECK(root.core == kRootCore);
  CHECK(root.support == 3);

  std::vector<SearchNode> kids = children(db, root, 1);
  REQUIRE(kids.size() == 2);
  CHECK(kids[0].itemset == std::vector<ItemId>{0, 1});  // closure({a})
  CHECK(kids[0].core == 0);
  CHECK(kids[0].support == 2);
  CHECK(kids[1].itemset == std::vector<ItemId>{2});
  CHECK(kids[1].core == 2);
  CHECK(kids[1].support == 2);
  // closure({b}) = {a,b} adds item a < b outside the parent: pruned as a duplicate.

  std::vector<SearchNode> grandkids = children(db, kids[0], 1);
  REQUIRE(grandkids.size() == 1);
  CHECK(grandkids[0].itemset == std::vector<ItemId>{0, 1, 2});

  CHECK(children(db, grandkids[0], 1).empty());  // leaf: nothing left to add
}

TEST_CASE("closed-set counts on the worked example") {
  TransactionDatabase db = TransactionDatabase::from_raw(tiny_raw());
  CHECK(count_closed_sequential(db, 1) == 3);  // {a,b}, {c}, {a,b,c}
  CHECK(count_closed_sequential(db, 2) == 2);  // {a,b}, {c}
  CHECK(count_closed_sequential(db, 3) == 0);  // only the empty root has support 3
}

TEST_CASE("a non-empty root closure is the first visited closed set") {
  RawDatabase raw;
  raw.rows = {{0}, {0, 1}, {0, 2}};
  raw.labels = {1, 0, 1};
  raw.item_names = {"a", "b", "c"};
  TransactionDatabase db = TransactionDatabase::from_raw(raw);

  std::vector<Visit> seq = collect_loop(db, 1);
  REQUIRE(!seq.empty());
  CHECK(seq[0].itemset == std::vector<ItemId>{0});  // closure(empty) = {a}
  CHECK(seq[0].support == 3);

  // Raising min_support beyond N removes even the root.
  CHECK(count_closed_sequential(db, 4) == 0);
}

TEST_CASE("make_node rebuilds covers exactly") {
  TransactionDatabase db = TransactionDatabase::from_raw(tiny_raw());
  SearchNode root = make_root(db);
  for (const SearchNode& kid : children(db, root, 1)) {
    SearchNode rebuilt = make_node(db, kid.itemset, kid.core);
    CHECK(rebuilt == kid);
    CHECK(rebuilt.support == kid.support);
    CHECK(rebuilt.cover == kid.cover);
  }
}

TEST_CASE("loop traversal equals recursive traversal order") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    int items = 2 + static_cast<int>(rng() % 9);
    int trans = 3 + static_cast<int>(rng() % 28);
    RawDatabase raw = gen_random(40000 + trial, items, trans, 0.4);
    TransactionDatabase db = TransactionDatabase::from_raw(raw);
    int min_support = 1 + static_cast<int>(rng() % 4);
    std::vector<Visit> loop = collect_loop(db, min_support);
    std::vector<Visit> rec = collect_recursive(db, min_support);
    REQUIRE(loop == rec);
  }
}

TEST_CASE("uniqueness and completeness against the brute-force oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    int items = 2 + static_cast<int>(rng() % 9);
    int trans = 3 + static_cast<int>(rng() % 23);
    RawDatabase raw = gen_random(50000 + trial, items, trans, 0.35);
    TransactionDatabase db = TransactionDatabase::from_raw(raw);
    for (int min_support = 1; min_support <= db.num_transactions() + 1; ++min_support) {
      std::vector<Visit> got = collect_loop(db, min_support);
      std::set<Visit> unique(got.begin(), got.end());
      REQUIRE(unique.size() == got.size());  // no closed set visited twice

      std::vector<ClosedSetRecord> want = oracle_closed_sets(raw, min_support);
      REQUIRE(got.size() == want.size());
      std::sort(got.begin(), got.end());
      for (std::size_t i = 0; i < got.size(); ++i) {
        REQUIRE(got[i].itemset == want[i].itemset);
        REQUIRE(got[i].support == want[i].support.total);
      }
    }
  }
}

TEST_CASE("live stack stays within depth x branching") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    RawDatabase raw = gen_random(60000 + trial, 10, 30, 0.45);
    TransactionDatabase db = TransactionDatabase::from_raw(raw);

    // Reference walk collecting depth and branching bounds.
    std::size_t max_depth = 1, max_branch = 1;
    struct Entry {
      SearchNode node;
      std::size_t depth;
    };
    std::vector<Entry> stack;
    SearchNode root = make_root(db);
    std::size_t max_stack = 0;
    {
      std::vector<SearchNode> kids = children(db, root, 1);
      max_branch = std::max(max_branch, kids.size());
      for (auto it = kids.rbegin(); it != kids.rend(); ++it)
        stack.push_back({std::move(*it), 1});
    }
    while (!stack.empty()) {
      max_stack = std::max(max_stack, stack.size());
      Entry e = std::move(stack.back());
      stack.pop_back();
      max_depth = std::max(max_depth, e.depth);
      std::vector<SearchNode> kids = children(db, e.node, 1);
      max_branch = std::max(max_branch, kids.size());
      for (auto it = kids.rbegin(); it != kids.rend(); ++it)
        stack.push_back({std::move(*it), e.depth + 1});
    }
    CHECK(max_stack <= max_depth * max_branch);
  }
}

TEST_CASE("count matches oracle on 100 random databases with empty visitor") {
  for (int trial = 0; trial < 100; ++trial) {
    RawDatabase raw = gen_random(70000 + trial, 2 + trial % 11, 4 + (trial * 7) % 28, 0.4);
    TransactionDatabase db = TransactionDatabase::from_raw(raw);
    int min_support = 1 + trial % 3;
    long long got = count_closed_sequential(db, min_support);
    long long want = static_cast<long long>(oracle_closed_sets(raw, min_support).size());
    REQUIRE(got == want);
  }
}
