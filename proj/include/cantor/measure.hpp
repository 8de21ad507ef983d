#pragma once

// Computable probability measures on infinite binary sequences, parsed from
// and serialized to short spec strings. Evaluation is exact: cylinder masses
// are rationals, the level metrics rho_n are exact, and the full metric rho
// is enclosed in an interval of dyadic-width tail error.
//
// Bundled kinds:
//   bernoulli:p=a/b      independent bits, p = probability of a 1
//   mu_p:p=a/b           first bit 1; after a suffix 1 0^k the next bit is 1
//                        with probability p/(k+1)
//   mixture:p=a/b        p * (point mass on 000...) + (1-p) * (point mass on 111...)
//   markov:rows=q0,q1;init=r   two-state chain, rows give P(next=1 | state)
//   point:sigma=<bits>   point mass on sigma 000... (sigma stored with
//                        trailing zeros stripped, so specs are canonical)

#include <optional>
#include <string>
#include <tuple>

#include "cantor/bits.hpp"
#include "cantor/clopen.hpp"
#include "cantor/rat.hpp"

namespace cantor {

enum class MeasureKind { bernoulli, mu_p, mixture, markov, point };

struct MeasureSpec {
  MeasureKind kind = MeasureKind::bernoulli;
  Rat p;             // bernoulli / mu_p / mixture parameter
  Rat row0, row1;    // markov: P(next=1 | state 0), P(next=1 | state 1)
  Rat init;          // markov: P(first bit = 1)
  Bits sigma;        // point: canonical (no trailing zeros)

  friend bool operator==(const MeasureSpec&, const MeasureSpec&) = default;
};

class Measure {
 public:
  static Measure bernoulli(const Rat& p);
  static Measure mu_p(const Rat& p);
  static Measure mixture(const Rat& p);
  static Measure markov(const Rat& row0, const Rat& row1, const Rat& init);
  static Measure point_mass(const Bits& sigma);

  static Measure parse(const std::string& spec);
  std::string serialize() const;

  const MeasureSpec& spec() const { return spec_; }

  // Exact mass of the cylinder [sigma].
  Rat cylinder(const Bits& sigma) const;
  // Exact mass of a clopen set (sum over its atoms).
  Rat mass(const Clopen& c) const;
  // P(next bit = 1 | prefix sigma); requires cylinder(sigma) > 0.
  Rat conditional_one(const Bits& sigma) const;

  friend bool operator==(const Measure& a, const Measure& b) { return a.spec_ == b.spec_; }

 private:
  explicit Measure(MeasureSpec s) : spec_(std::move(s)) {}
  static void check_unit_range(const Rat& q, const char* what);
  MeasureSpec spec_;

  friend class MeasureWalker;
};

// Incremental prefix walker: O(1) exact work per extended bit. Used by the
// metric evaluator (tree walk over all length-n strings) and the sampler.
class MeasureWalker {
 public:
  explicit MeasureWalker(const Measure& m);

  const Rat& prob() const { return prob_; }          // mass of current prefix
  Rat conditional_one() const;                        // P(next=1 | prefix), 0 on dead branches
  void step(int bit);                                 // extend prefix by one bit

  // Path-dependent state only: two prefixes of equal depth with equal tags
  // and equal masses behave identically from here on (the remaining fields
  // advance with depth alone). Lets the metric evaluator merge
  // interchangeable subtrees instead of walking all of them.
  std::tuple<long, int, int> state_tag() const {
    return {zeros_since_one_, static_cast<int>(mix_), last_bit_};
  }

 private:
  enum class MixState { at_root, zeros, ones, dead };
  MeasureKind kind_;
  const MeasureSpec* spec_;
  Rat prob_;
  // per-kind state
  bool at_start_ = true;
  long zeros_since_one_ = 0;  // mu_p
  MixState mix_ = MixState::at_root;
  int last_bit_ = 0;          // markov
  std::size_t position_ = 0;  // point
};

// Exact level-n metric: max over clopen sets of granularity <= n of the mass
// difference, computed as the positive-part sum over level-n cylinders.
Rat rho_n(const Measure& a, const Measure& b, std::size_t n);

// Enclosure of rho = sum_n 2^-n rho_n after truncating at level M:
// lo adds the provable tail minimum 2^-M * rho_M, hi adds the tail cap 2^-M.
// Identical specs short-circuit to [0, 0].
Interval rho_interval(const Measure& a, const Measure& b, std::size_t M);

enum class Fit { inside, outside, unknown };

struct Ball {
  Measure center;
  Rat radius;
  bool open = false;  // closed by default

  // Certified membership at truncation level prec.
  Fit contains(const Measure& m, std::size_t prec) const;
  // Certified inclusion of this ball inside `outer`.
  Fit within(const Ball& outer, std::size_t prec) const;
};

}  // namespace cantor
