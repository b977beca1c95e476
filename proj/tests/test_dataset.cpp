#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "parlamp/dataset.hpp"
#include "parlamp/errors.hpp"
#include "parlamp/synth.hpp"

using namespace parlamp;

namespace {

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content) : path(name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

RawDatabase tiny_raw() {
  TempFile t("tmp_ds_trans.txt", "a b\na b c\nc\n");
  TempFile l("tmp_ds_labels.txt", "1\n1\n0\n");
  return load_raw(t.path, l.path);
}

// Row-scan reference: count containment by iterating transactions.
PatternSupport scan_support(const RawDatabase& raw, const std::vector<ItemId>& itemset) {
  PatternSupport s;
  for (std::size_t t = 0; t < raw.rows.size(); ++t) {
    bool contains = true;
    for (ItemId i : itemset) {
      if (!std::binary_search(raw.rows[t].begin(), raw.rows[t].end(), i)) {
        contains = false;
        break;
      }
    }
    if (contains) {
      ++s.total;
      if (raw.labels[t]) ++s.positive;
    }
  }
  return s;
}

}  // namespace

TEST_CASE("three-line example loads with first-appearance ids and exact bitsets") {
  RawDatabase raw = tiny_raw();
  REQUIRE(raw.item_names == std::vector<std::string>{"a", "b", "c"});
  TransactionDatabase db = TransactionDatabase::from_raw(raw);
  CHECK(db.num_transactions() == 3);
  CHECK(db.num_positive() == 2);
  CHECK(db.num_items() == 3);

  const Bitvec& a = db.item_bitset(0);
  CHECK(a.test(0));
  CHECK(a.test(1));
  CHECK_FALSE(a.test(2));
  CHECK(a.count() == 2);
  CHECK(db.positive_bitset().test(0));
  CHECK(db.positive_bitset().test(1));
  CHECK_FALSE(db.positive_bitset().test(2));
}

TEST_CASE("support_of matches the worked examples") {
  TransactionDatabase db = TransactionDatabase::from_raw(tiny_raw());
  PatternSupport empty = support_of(db, {});
  CHECK(empty.total == 3);
  CHECK(empty.positive == 2);
  PatternSupport ab = support_of(db, {0, 1});
  CHECK(ab.total == 2);
  CHECK(ab.positive == 2);
  PatternSupport ac = support_of(db, {0, 2});
  CHECK(ac.total == 1);
  CHECK(ac.positive == 1);
}

TEST_CASE("label count mismatch is rejected") {
  TempFile t("tmp_ds_mismatch_t.txt", "a b\na\nc\n");
  TempFile l("tmp_ds_mismatch_l.txt", "1\n0\n");
  CHECK_THROWS_WITH_AS(load_raw(t.path, l.path),
                       doctest::Contains("label/transaction count mismatch"), DataError);
}

TEST_CASE("single-class labels are rejected") {
  TempFile t("tmp_ds_single_t.txt", "a b\na\nc\n");
  TempFile l("tmp_ds_single_l.txt", "1\n1\n1\n");
  CHECK_THROWS_WITH_AS(load_raw(t.path, l.path), doctest::Contains("single-class labels"),
                       DataError);
}

TEST_CASE("bad label token reports its line number") {
  TempFile t("tmp_ds_badlab_t.txt", "a\nb\n");
  TempFile l("tmp_ds_badlab_l.txt", "1\nx\n");
  CHECK_THROWS_WITH_AS(load_raw(t.path, l.path), doctest::Contains(":2:"), DataError);
}

TEST_CASE("missing file names the path") {
  CHECK_THROWS_WITH_AS(load_raw("no_such_file_anywhere.txt", "also_missing.txt"),
                       doctest::Contains("no_such_file_anywhere.txt"), DataError);
}

TEST_CASE("empty transaction lines are legal and counted") {
  TempFile t("tmp_ds_empty_t.txt", "a\n\nb\n");
  TempFile l("tmp_ds_empty_l.txt", "1\n0\n1\n");
  RawDatabase raw = load_raw(t.path, l.path);
  REQUIRE(raw.rows.size() == 3);
  CHECK(raw.rows[1].empty());
  TransactionDatabase db = TransactionDatabase::from_raw(raw);
  CHECK(db.num_transactions() == 3);
  CHECK(support_of(db, {}).total == 3);
}

TEST_CASE("duplicate items inside one transaction are deduplicated") {
  TempFile t("tmp_ds_dup_t.txt", "a a b a\nb\n");
  TempFile l("tmp_ds_dup_l.txt", "1\n0\n");
  RawDatabase raw = load_raw(t.path, l.path);
  CHECK(raw.rows[0] == std::vector<ItemId>{0, 1});
}

TEST_CASE("duplicate transactions are kept as distinct rows") {
  TempFile t("tmp_ds_dupt_t.txt", "a b\na b\nc\n");
  TempFile l("tmp_ds_dupt_l.txt", "1\n0\n1\n");
  TransactionDatabase db = TransactionDatabase::from_raw(load_raw(t.path, l.path));
  CHECK(db.num_transactions() == 3);
  CHECK(support_of(db, {0, 1}).total == 2);
}

TEST_CASE("csv loader agrees with the two-file loader") {
  TempFile csv("tmp_ds.csv",
               "label,a,b,c\n"
               "1,1,1,0\n"
               "1,1,1,1\n"
               "0,0,0,1\n");
  RawDatabase raw = load_raw_csv(csv.path);
  RawDatabase ref = tiny_raw();
  CHECK(raw.rows == ref.rows);
  CHECK(raw.labels == ref.labels);
  CHECK(raw.item_names == ref.item_names);

  TransactionDatabase via_dispatch = load_database(csv.path);
  CHECK(via_dispatch.num_transactions() == 3);
  CHECK(via_dispatch.num_positive() == 2);
}

TEST_CASE("csv validation reports line numbers") {
  SUBCASE("wrong cell count") {
    TempFile csv("tmp_ds_badw.csv", "label,a,b\n1,1\n");
    CHECK_THROWS_WITH_AS(load_raw_csv(csv.path), doctest::Contains(":2:"), DataError);
  }
  SUBCASE("non-binary indicator") {
    TempFile csv("tmp_ds_badc.csv", "label,a,b\n1,1,0\n0,2,0\n");
    CHECK_THROWS_WITH_AS(load_raw_csv(csv.path), doctest::Contains(":3:"), DataError);
  }
  SUBCASE("bad label") {
    TempFile csv("tmp_ds_badl.csv", "label,a,b\n7,1,0\n");
    CHECK_THROWS_WITH_AS(load_raw_csv(csv.path), doctest::Contains(":2:"), DataError);
  }
}

TEST_CASE("empty database and out-of-range ids are rejected") {
  TempFile t("tmp_ds_none_t.txt", "");
  TempFile l("tmp_ds_none_l.txt", "");
  CHECK_THROWS_WITH_AS(load_raw(t.path, l.path), doctest::Contains("empty database"),
                       DataError);

  TransactionDatabase db = TransactionDatabase::from_raw(tiny_raw());
  CHECK_THROWS_AS(support_of(db, {99}), DataError);
  CHECK_THROWS_AS(db.item_bitset(-1), DataError);
}

TEST_CASE("bitset tails beyond N stay zero so counts are exact") {
  // 70 transactions spans three 32/64-bit words with a ragged tail.
  RawDatabase raw = gen_random(/*seed=*/99, /*items=*/6, /*transactions=*/70, 0.5);
  TransactionDatabase db = TransactionDatabase::from_raw(raw);
  Bitvec all = db.full_cover();
  CHECK(all.count() == 70);
  for (int i = 0; i < db.num_items(); ++i) {
    CHECK(db.item_bitset(i).count() ==
          static_cast<std::size_t>(scan_support(raw, {i}).total));
  }
}

TEST_CASE("support_of is antitone over random subset pairs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    RawDatabase raw = gen_random(1000 + trial, 10, 40, 0.4);
    TransactionDatabase db = TransactionDatabase::from_raw(raw);
    std::vector<ItemId> big;
    for (ItemId i = 0; i < db.num_items(); ++i)
      if (rng() % 3 == 0) big.push_back(i);
    std::vector<ItemId> small;
    for (ItemId i : big)
      if (rng() % 2 == 0) small.push_back(i);
    PatternSupport sb = support_of(db, big);
    PatternSupport ss = support_of(db, small);
    CHECK(sb.total <= ss.total);
    CHECK(sb.positive <= ss.positive);
    CHECK(sb.positive <= sb.total);
    CHECK(sb.total <= db.num_transactions());
    CHECK(sb.positive <= db.num_positive());
  }
}

TEST_CASE("support_of agrees with the row-scan oracle on random databases") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    int items = 1 + static_cast<int>(rng() % 16);
    int trans = 2 + static_cast<int>(rng() % 63);
    RawDatabase raw = gen_random(5000 + trial, items, trans, 0.35);
    TransactionDatabase db = TransactionDatabase::from_raw(raw);
    for (int q = 0; q < 25; ++q) {
      std::vector<ItemId> itemset;
      for (ItemId i = 0; i < db.num_items(); ++i)
        if (rng() % 4 == 0) itemset.push_back(i);
      PatternSupport got = support_of(db, itemset);
      PatternSupport want = scan_support(raw, itemset);
      CHECK(got.total == want.total);
      CHECK(got.positive == want.positive);
    }
  }
}

TEST_CASE("generators produce valid two-class databases") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    for (const RawDatabase& raw :
         {gen_random(seed, 9, 30, 0.3), gen_planted(seed, 9, 30, 0.3, 3, 0.9),
          gen_skewed(seed, 12, 48), gen_dense(seed, 10, 30, 0.5)}) {
      TransactionDatabase db = TransactionDatabase::from_raw(raw);
      CHECK(db.num_positive() > 0);
      CHECK(db.num_positive() < db.num_transactions());
      CHECK(db.num_items() > 0);
    }
  }
}
