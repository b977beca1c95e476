#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parlamp/bitvec.hpp"
#include "parlamp/errors.hpp"

namespace parlamp {

using ItemId = std::int32_t;

// Parsed but un-indexed database: one row of deduplicated, sorted item ids
// per transaction. This is the common product of all loaders and the input
// the row-scan oracle works from.
struct RawDatabase {
  std::vector<std::vector<ItemId>> rows;
  std::vector<std::uint8_t> labels;  // 0 or 1 per row
  std::vector<std::string> item_names;
};

struct PatternSupport {
  int total = 0;     // x(I): transactions containing the itemset
  int positive = 0;  // n(I): positive transactions containing it
};

// Immutable column-major index: one bitset per item over transactions.
class TransactionDatabase {
 public:
  static TransactionDatabase from_raw(const RawDatabase& raw);

  int num_items() const { return static_cast<int>(item_bitsets_.size()); }
  int num_transactions() const { return num_transactions_; }
  int num_positive() const { return num_positive_; }

  const Bitvec& item_bitset(ItemId i) const { return item_bitsets_[check(i)]; }
  const Bitvec& positive_bitset() const { return positive_; }
  const std::string& item_name(ItemId i) const { return item_names_[check(i)]; }
  const std::vector<std::string>& item_names() const { return item_names_; }

  // Cover of the empty itemset: every transaction.
  Bitvec full_cover() const { return Bitvec(num_transactions_, /*fill=*/true); }

 private:
  ItemId check(ItemId i) const {
    if (i < 0 || i >= num_items())
      throw DataError("item id out of range: " + std::to_string(i));
    return i;
  }

  int num_transactions_ = 0;
  int num_positive_ = 0;
  std::vector<Bitvec> item_bitsets_;
  Bitvec positive_;
  std::vector<std::string> item_names_;
};

// Transactions file: one transaction per line, whitespace-separated item
// tokens, blank line = empty transaction. Labels file: one "0" or "1" per
// line, aligned by line number.
RawDatabase load_raw(const std::string& transactions_path, const std::string& labels_path);

// Combined CSV: header row of column names (first column is the label),
// then one row per transaction: label 0/1 followed by 0/1 item indicators.
RawDatabase load_raw_csv(const std::string& csv_path);

// Dispatches on a ".csv" extension of transactions_path.
TransactionDatabase load_database(const std::string& transactions_path,
                                  const std::string& labels_path = "");

PatternSupport support_of(const TransactionDatabase& db, const std::vector<ItemId>& itemset);

}  // namespace parlamp
