#include "parlamp/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace parlamp {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::uint8_t parse_label(const std::string& token, const std::string& path, std::size_t lineno) {
  if (token == "0") return 0;
  if (token == "1") return 1;
  throw DataError(path + ":" + std::to_string(lineno) + ": label token not in {0,1}: '" +
                  token + "'");
}

void validate(const RawDatabase& raw) {
  if (raw.rows.empty()) throw DataError("empty database: no transactions");
  bool has0 = false, has1 = false;
  for (std::uint8_t l : raw.labels) (l ? has1 : has0) = true;
  if (!has0 || !has1) throw DataError("single-class labels: need both 0 and 1");
}

}  // namespace

RawDatabase load_raw(const std::string& transactions_path, const std::string& labels_path) {
  RawDatabase raw;
  std::unordered_map<std::string, ItemId> ids;

  std::vector<std::string> tlines = read_lines(transactions_path);
  for (std::size_t i = 0; i < tlines.size(); ++i) {
    std::istringstream ss(tlines[i]);
    std::vector<ItemId> row;
    std::string token;
    while (ss >> token) {
      auto [it, inserted] = ids.emplace(token, static_cast<ItemId>(raw.item_names.size()));
      if (inserted) raw.item_names.push_back(token);
      row.push_back(it->second);
    }
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    raw.rows.push_back(std::move(row));
  }

  std::vector<std::string> llines = read_lines(labels_path);
  // Ignore trailing blank lines in the labels file (a final newline is common).
  while (!llines.empty() && trim(llines.back()).empty()) llines.pop_back();
  if (llines.size() != raw.rows.size())
    throw DataError("label/transaction count mismatch: " + std::to_string(llines.size()) +
                    " labels for " + std::to_string(raw.rows.size()) + " transactions");
  for (std::size_t i = 0; i < llines.size(); ++i)
    raw.labels.push_back(parse_label(trim(llines[i]), labels_path, i + 1));

  validate(raw);
  return raw;
}

RawDatabase load_raw_csv(const std::string& csv_path) {
  std::vector<std::string> lines = read_lines(csv_path);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError("empty database: " + csv_path + " has no header row");

  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
  };

  std::vector<std::string> header = split(lines[0]);
  if (header.size() < 1) throw DataError(csv_path + ":1: malformed header row");

  RawDatabase raw;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c].empty())
      throw DataError(csv_path + ":1: empty item name in column " + std::to_string(c + 1));
    raw.item_names.push_back(header[c]);
  }

  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> cells = split(lines[i]);
    if (cells.size() != header.size())
      throw DataError(csv_path + ":" + std::to_string(i + 1) + ": malformed line: expected " +
                      std::to_string(header.size()) + " cells, got " +
                      std::to_string(cells.size()));
    raw.labels.push_back(parse_label(cells[0], csv_path, i + 1));
    std::vector<ItemId> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] == "1") {
        row.push_back(static_cast<ItemId>(c - 1));
      } else if (cells[c] != "0") {
        throw DataError(csv_path + ":" + std::to_string(i + 1) + ": indicator not in {0,1}: '" +
                        cells[c] + "'");
      }
    }
    raw.rows.push_back(std::move(row));
  }

  validate(raw);
  return raw;
}

TransactionDatabase load_database(const std::string& transactions_path,
                                  const std::string& labels_path) {
  bool is_csv = transactions_path.size() >= 4 &&
                transactions_path.compare(transactions_path.size() - 4, 4, ".csv") == 0;
  RawDatabase raw = is_csv ? load_raw_csv(transactions_path)
                           : load_raw(transactions_path, labels_path);
  return TransactionDatabase::from_raw(raw);
}

TransactionDatabase TransactionDatabase::from_raw(const RawDatabase& raw) {
  if (raw.rows.empty()) throw DataError("empty database: no transactions");
  if (raw.labels.size() != raw.rows.size())
    throw DataError("label/transaction count mismatch");

  TransactionDatabase db;
  db.num_transactions_ = static_cast<int>(raw.rows.size());
  db.item_names_ = raw.item_names;

  {
    std::unordered_map<std::string, int> seen;
    for (const std::string& name : db.item_names_) {
      if (name.empty()) throw DataError("empty item name");
      if (++seen[name] > 1) throw DataError("duplicate item name: '" + name + "'");
    }
  }

  int n_items = static_cast<int>(raw.item_names.size());
  db.item_bitsets_.assign(n_items, Bitvec(db.num_transactions_));
  db.positive_ = Bitvec(db.num_transactions_);
  for (std::size_t t = 0; t < raw.rows.size(); ++t) {
    for (ItemId i : raw.rows[t]) {
      if (i < 0 || i >= n_items)
        throw DataError("item id out of range in row " + std::to_string(t));
      db.item_bitsets_[i].set(t);
    }
    if (raw.labels[t]) {
      db.positive_.set(t);
      ++db.num_positive_;
    }
  }
  if (db.num_positive_ == 0 || db.num_positive_ == db.num_transactions_)
    throw DataError("single-class labels: need both 0 and 1");
  return db;
}

PatternSupport support_of(const TransactionDatabase& db, const std::vector<ItemId>& itemset) {
  Bitvec cover = db.full_cover();
  for (ItemId i : itemset) cover.and_with(db.item_bitset(i));
  PatternSupport s;
  s.total = static_cast<int>(cover.count());
  s.positive = static_cast<int>(cover.and_count(db.positive_bitset()));
  return s;
}

}  // namespace parlamp
