#pragma once

// Clopen subsets of the space of infinite binary sequences, represented
// canonically as a set of disjoint cylinder atoms at the least granularity
// that describes the set (sibling atoms are always merged). Granularity g
// costs 2^g mask bits, so callers are expected to stay below g ~ 22; the
// guard below makes blowing that budget a loud error instead of an OOM.

#include <string>
#include <vector>

#include "cantor/bits.hpp"

namespace cantor {

enum class Region { inside, outside, undetermined };

class Clopen {
 public:
  Clopen() : g_(0), mask_(1, false) {}  // empty set

  static Clopen empty() { return Clopen(); }
  static Clopen full();
  static Clopen cylinder(const Bits& sigma);
  // Union of the given cylinders (need not be disjoint or same length).
  static Clopen from_cylinders(const std::vector<Bits>& sigmas);

  std::size_t granularity() const { return g_; }
  bool is_empty() const;
  bool is_full() const { return g_ == 0 && mask_[0]; }
  // Atoms at the canonical granularity, lexicographic order.
  std::vector<Bits> atoms() const;
  std::size_t atom_count() const;

  Clopen unite(const Clopen& o) const;
  Clopen intersect(const Clopen& o) const;
  Clopen difference(const Clopen& o) const;
  Clopen complement() const;

  // Cylinder placement: inside iff [sigma] is a subset, outside iff disjoint,
  // undetermined only when sigma is shorter than the granularity and the
  // cylinder straddles the boundary.
  Region matches(const Bits& sigma) const;

  // Atoms of the same set enumerated at granularity g >= granularity().
  std::vector<Bits> atoms_at(std::size_t g) const;

  // Text form "g=<n>;atoms=<comma-separated atoms>"; the full space prints
  // its single root atom as the empty-string marker.
  std::string serialize() const;
  static Clopen parse(const std::string& text);

  friend bool operator==(const Clopen& a, const Clopen& b) {
    return a.g_ == b.g_ && a.mask_ == b.mask_;
  }

 private:
  Clopen(std::size_t g, std::vector<bool> mask) : g_(g), mask_(std::move(mask)) { canonicalize(); }
  void canonicalize();
  static void check_granularity(std::size_t g);
  // Raw mask of the set at granularity g (no canonicalization).
  std::vector<bool> mask_at(std::size_t g) const;

  std::size_t g_;
  std::vector<bool> mask_;  // mask_[i] == atom with index i is present
};

}  // namespace cantor
