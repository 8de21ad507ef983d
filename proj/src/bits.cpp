#include "cantor/bits.hpp"

#include <algorithm>

namespace cantor {

std::vector<Bits> Bits::all_of_length(std::size_t n) {
  if (n > 24) throw std::length_error("Bits::all_of_length: refusing to enumerate 2^n > 2^24");
  std::vector<Bits> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) out.push_back(from_index(i, n));
  return out;
}

Bits Bits::from_index(std::size_t index, std::size_t length) {
  if (length > 60) throw std::length_error("Bits::from_index: length > 60");
  if (length < 60 && index >= (std::size_t{1} << length))
    throw std::out_of_range("Bits::from_index: index out of range");
  std::string s(length, '0');
  for (std::size_t i = 0; i < length; ++i)
    if (index & (std::size_t{1} << (length - 1 - i))) s[i] = '1';
  return Bits(s);
}

std::size_t Bits::ones() const {
  return static_cast<std::size_t>(std::count(b_.begin(), b_.end(), '1'));
}

std::size_t Bits::index() const {
  if (size() > 60) throw std::length_error("Bits::index: string longer than 60");
  std::size_t v = 0;
  for (char c : b_) v = (v << 1) | static_cast<std::size_t>(c == '1');
  return v;
}

}  // namespace cantor
