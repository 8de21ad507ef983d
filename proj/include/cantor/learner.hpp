#pragma once

// Budgeted, deterministic measure learners. A learner maps a finite input
// string and a step budget to a finite list of measure balls (possibly
// empty). Ball lists shrink: the i-th ball (1-indexed) has diameter below
// 2^-i, and the list emitted at a larger budget extends the smaller-budget
// list. "Null" always means "null at this budget" — a finite run cannot
// separate divergence from slowness, so every consumer records the budget.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor/clopen.hpp"
#include "cantor/measure.hpp"
#include "cantor/rat.hpp"

namespace cantor {

// Positive, nonincreasing, vanishing precision targets n -> f(n). Two shapes
// cover every use here: 2^-(a*n+b) with a >= 1, and 2^-floor(n/2).
class PrecisionSchedule {
 public:
  static PrecisionSchedule dyadic(unsigned long a, unsigned long b);
  static PrecisionSchedule half_floor();

  Rat operator()(std::size_t n) const;
  std::string serialize() const;
  static PrecisionSchedule parse(const std::string& text);

  friend bool operator==(const PrecisionSchedule&, const PrecisionSchedule&) = default;

 private:
  enum class Kind { dyadic, half_floor };
  PrecisionSchedule(Kind k, unsigned long a, unsigned long b) : kind_(k), a_(a), b_(b) {}
  Kind kind_;
  unsigned long a_, b_;
};

struct LearnerTrace {
  Bits input;
  std::size_t budget = 0;
  // (ball, step stamp) in emission order; stamps are nondecreasing, >= 1.
  std::vector<std::pair<Ball, std::size_t>> emitted;

  bool is_null() const { return emitted.empty(); }
  // First emitted ball of radius strictly below eps, if any.
  std::optional<Ball> first_ball_below(const Rat& eps) const;
};

// True iff some emitted ball has radius strictly below eps.
bool reached_precision(const LearnerTrace& trace, const Rat& eps);

class Learner {
 public:
  // On input starting with bit i, the point mass on the constant-i sequence
  // (radius 0); null on the empty input.
  static Learner first_bit();
  // Dirac measure on input-then-zeros, radius 0.
  static Learner eventually_zero();
  // Enumerates rationals by Stern-Brocot levels and commits to the first one
  // within err(|input|) of the observed ones-frequency; the budget bounds how
  // deep the enumeration may run.
  static Learner rational_bernoulli();
  // Bernoulli(ones-frequency) with the given radius schedule, capped at 1/8
  // so the single-ball trace meets the first-ball diameter bound.
  static Learner frequency(PrecisionSchedule radius = PrecisionSchedule::half_floor());
  // Emits mu0 at radius 0 regardless of input.
  static Learner stubborn(const Measure& mu0);
  static Learner always_null();

  std::string serialize() const;
  static Learner parse(const std::string& text);

  LearnerTrace run(const Bits& sigma, std::size_t budget) const;

  friend bool operator==(const Learner& a, const Learner& b) {
    return a.serialize() == b.serialize();
  }
  friend Learner threshold_wrap(Learner inner, PrecisionSchedule f);

 private:
  struct Impl;
  explicit Learner(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

LearnerTrace run_learner(const Learner& a, const Bits& sigma, std::size_t budget);

// Gate the inner learner behind the precision demand f(|input|): the wrapped
// learner is null until the inner trace reaches that precision, then replays
// the inner ball list unchanged.
Learner threshold_wrap(Learner inner, PrecisionSchedule f);

inline Learner make_reference_learner(const std::string& spec) { return Learner::parse(spec); }

// Length-n strings whose trace reaches precision f(n) at this budget.
Clopen prec_set(const Learner& a, const PrecisionSchedule& f, std::size_t n, std::size_t budget);
// Length-n strings with an empty trace at this budget.
Clopen null_set(const Learner& a, std::size_t n, std::size_t budget);

// Enumeration behind rational_bernoulli: 1-indexed, 0, 1, 1/2, 1/3, 2/3, ...
Rat stern_brocot_rational(std::size_t i);
// Consistency slack 1/floor(cbrt(m)) used by rational_bernoulli; m >= 1.
Rat rational_bernoulli_err(std::size_t m);

}  // namespace cantor
