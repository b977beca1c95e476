#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace parlamp {

// Fixed-width bit vector used for transaction covers. Bits beyond size()
// are kept zero so popcounts never need trailing-word masks.
class Bitvec {
 public:
  Bitvec() = default;

  explicit Bitvec(std::size_t nbits, bool fill = false)
      : nbits_(nbits), words_((nbits + 63) / 64, fill ? ~0ULL : 0ULL) {
    if (fill) clear_tail();
  }

  std::size_t size() const { return nbits_; }

  void set(std::size_t i) { words_[i >> 6] |= 1ULL << (i & 63); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1ULL;
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += std::popcount(w);
    return n;
  }

  void and_with(const Bitvec& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  }

  // popcount(*this & other) without materializing the intersection.
  std::size_t and_count(const Bitvec& other) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < words_.size(); ++i)
      n += std::popcount(words_[i] & other.words_[i]);
    return n;
  }

  // true iff every set bit of *this is also set in other.
  bool is_subset_of(const Bitvec& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  bool operator==(const Bitvec& other) const {
    return nbits_ == other.nbits_ && words_ == other.words_;
  }

 private:
  void clear_tail() {
    std::size_t tail = nbits_ & 63;
    if (tail != 0 && !words_.empty()) words_.back() &= (1ULL << tail) - 1;
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace parlamp
