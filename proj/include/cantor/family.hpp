#pragma once

// Parametrized measure families, effective coverings by small balls, and
// orthogonal member families with exactly-certified clopen separators.
//
// Separators come in two physical shapes:
//   * explicit clopen sets (small granularity, enumerable atoms);
//   * count windows: all length-M strings whose number of ones falls in an
//     interval. These stand in for clopen sets whose granularity M is far too
//     large to enumerate (the mass of a count window under an i.i.d. member
//     is an exact binomial sum, so everything stays exact).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/measure.hpp"
#include "cantor/rat.hpp"

namespace cantor {

// Exact mass of { #ones in [lo, hi] } under m independent bits with P(1) = p.
Rat binomial_window_mass(std::size_t m, const Rat& p, std::size_t lo, std::size_t hi);

class Separator {
 public:
  static Separator clopen(Clopen c);
  // Strings of length m whose ones-count lies in [lo, hi].
  static Separator count_window(std::size_t m, std::size_t lo, std::size_t hi);

  bool is_count_window() const { return is_window_; }
  std::size_t granularity() const;
  std::size_t window_lo() const { return lo_; }
  std::size_t window_hi() const { return hi_; }
  const Clopen& clopen_set() const;

  bool disjoint_with(const Separator& other) const;
  // Exact mass; throws for measure kinds whose count-window mass has no
  // closed evaluation when the window granularity is too large to enumerate.
  Rat mass(const Measure& mu) const;
  // Exact mass of [prefix] intersected with the separator.
  Rat prefix_mass(const Measure& mu, const Bits& prefix) const;

  // Atom-level materialization; only for granularity small enough to afford.
  Clopen materialize() const;

  std::string serialize() const;
  static Separator parse(const std::string& text);

  friend bool operator==(const Separator&, const Separator&) = default;

 private:
  Separator() = default;
  bool is_window_ = false;
  Clopen clopen_;
  std::size_t m_ = 0, lo_ = 0, hi_ = 0;
};

struct OrthFamily {
  Ball host;
  std::size_t s = 0;
  Rat delta;
  std::vector<Measure> members;        // 2^s pairwise distinct, inside host
  std::vector<Separator> separators;   // pairwise disjoint
  std::vector<Rat> guarantees;         // exact member_j(V_j), each > 1 - delta/8
  std::size_t granularity = 0;         // max separator granularity (the L of a stage)
};

class Covering;

class Family {
 public:
  static Family bernoulli();
  static Family mu_p();
  static Family mixture();
  static Family singleton(const Measure& m);
  // "bernoulli" | "mu_p" | "mixture" | "singleton:<measure spec>"
  static Family parse(const std::string& name);

  const std::string& name() const { return name_; }
  std::string serialize() const;
  // Certified Lipschitz constant: rho(member(p), member(q)) <= kappa |p - q|.
  const Rat& lipschitz() const { return kappa_; }
  bool single_member() const { return singleton_.has_value(); }

  Measure member(const Rat& param) const;
  // Parameter of a measure that syntactically belongs to this family.
  std::optional<Rat> param_of(const Measure& m) const;

  Covering cover(const Rat& eps) const;

  bool has_orthogonal_generator() const;
  // 2^s members inside `host` with disjoint separators, each separating its
  // member with exact guarantee > 1 - delta/8. The separator granularity is
  // searched upward (doubling) until the exact binomial tails certify; an
  // explicit granularity pins it instead (used to reproduce worked examples).
  OrthFamily orthogonal(const Ball& host, std::size_t s, const Rat& delta,
                        std::optional<std::size_t> granularity_override = {}) const;

  friend bool operator==(const Family& a, const Family& b) { return a.name_ == b.name_; }

 private:
  Family(std::string name, Rat kappa) : name_(std::move(name)), kappa_(std::move(kappa)) {}
  OrthFamily orthogonal_bernoulli(const Ball& host, std::size_t s, const Rat& delta,
                                  std::optional<std::size_t> granularity_override) const;
  OrthFamily orthogonal_mixture(const Ball& host, std::size_t s, const Rat& delta) const;

  std::string name_;
  Rat kappa_;
  std::optional<Measure> singleton_;
};

// Finite covering of a family at scale eps: a parameter grid of spacing
// eps/(8 kappa) whose balls have radius eps/4. Every member lies in some
// ball, and every member-centered ball of radius >= eps wholly contains one
// of the grid balls; both facts certified through the Lipschitz bound.
// Coverings keep their own copy of the family, so they stay valid on their
// own.
class Covering {
 public:
  Rat eps() const { return eps_; }
  Rat spacing() const { return spacing_; }
  Rat radius() const { return radius_; }
  std::size_t size() const { return count_; }

  Rat param(std::size_t i) const;
  Ball ball(std::size_t i) const;

  // Index of a grid ball certified to contain member(p) (Lipschitz bound).
  std::optional<std::size_t> covering_index(const Rat& p) const;
  // Index of a grid ball certified to lie inside ball(member(p), eps).
  std::optional<std::size_t> contained_index(const Rat& p) const;

 private:
  friend class Family;
  Covering(Family fam, Rat eps);
  Family family_;
  Rat eps_, spacing_, radius_;
  std::size_t count_ = 0;
};

}  // namespace cantor
