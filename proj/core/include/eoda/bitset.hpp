#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace eoda {

// Fixed-size bitset over 64-bit words. Covers exactly what the rule learner needs:
// bulk AND, popcount, and popcount-of-AND without materializing the intersection.
class DynBitset {
 public:
  DynBitset() = default;
  explicit DynBitset(std::size_t nbits, bool value = false)
      : nbits_(nbits), words_((nbits + 63) / 64, value ? ~std::uint64_t{0} : 0) {
    trim();
  }

  std::size_t size() const { return nbits_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }

  void reset(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  DynBitset& operator&=(const DynBitset& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  DynBitset& operator-=(const DynBitset& o) {  // set difference
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  static std::size_t and_count(const DynBitset& a, const DynBitset& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.words_.size(); ++i) {
      n += static_cast<std::size_t>(std::popcount(a.words_[i] & b.words_[i]));
    }
    return n;
  }

  bool operator==(const DynBitset&) const = default;

 private:
  void trim() {
    if (nbits_ & 63) words_.back() &= (~std::uint64_t{0}) >> (64 - (nbits_ & 63));
  }

  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace eoda
