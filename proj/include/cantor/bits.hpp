#pragma once

// Finite binary strings (cylinder addresses). Kept as plain chars '0'/'1' for
// debuggability; everything at this scale is at most a few thousand bits.

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cantor {

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::string s) : b_(std::move(s)) {
    for (char c : b_)
      if (c != '0' && c != '1') throw std::invalid_argument("Bits: non-binary character");
  }

  static Bits empty() { return Bits(); }
  // All length-n strings in lexicographic order ('0' < '1').
  static std::vector<Bits> all_of_length(std::size_t n);
  // Value of the string read as a big-endian binary number (requires n <= 60).
  static Bits from_index(std::size_t index, std::size_t length);

  std::size_t size() const { return b_.size(); }
  bool is_empty() const { return b_.empty(); }
  int bit(std::size_t i) const { return b_.at(i) == '1'; }
  int last() const { return bit(size() - 1); }

  std::size_t ones() const;
  std::size_t zeros() const { return size() - ones(); }

  Bits prefix(std::size_t k) const { return Bits(b_.substr(0, k)); }
  Bits append(int bit) const { return Bits(b_ + (bit ? '1' : '0')); }
  bool is_prefix_of(const Bits& other) const {
    return size() <= other.size() && other.b_.compare(0, size(), b_) == 0;
  }

  std::size_t index() const;  // inverse of from_index

  const std::string& str() const { return b_; }

  friend bool operator==(const Bits&, const Bits&) = default;
  friend std::strong_ordering operator<=>(const Bits& a, const Bits& b) {
    if (auto c = a.b_.size() <=> b.b_.size(); c != 0) return c;
    return a.b_ <=> b.b_;
  }

 private:
  std::string b_;
};

}  // namespace cantor
