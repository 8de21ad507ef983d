#include "doctest.h"

#include <random>
#include <vector>

#include "cantor/measure.hpp"

using namespace cantor;

namespace {

// Independent oracle: maximize |a(C) - b(C)| over every clopen set of
// granularity <= n by enumerating all atom subsets. Exponential in 2^n, so
// only used for n <= 3.
Rat rho_n_bruteforce(const Measure& a, const Measure& b, std::size_t n) {
  const auto atoms = Bits::all_of_length(n);
  Rat best(0);
  for (std::size_t subset = 0; subset < (std::size_t{1} << atoms.size()); ++subset) {
    Rat ma(0), mb(0);
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (subset & (std::size_t{1} << i)) {
        ma += a.cylinder(atoms[i]);
        mb += b.cylinder(atoms[i]);
      }
    best = max(best, abs(ma - mb));
  }
  return best;
}

Rat random_unit_rat(std::mt19937_64& rng, long max_den = 16) {
  long den = 1 + static_cast<long>(rng() % static_cast<unsigned long>(max_den));
  long num = static_cast<long>(rng() % static_cast<unsigned long>(den + 1));
  return Rat(num, den);
}

Measure random_measure(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return Measure::bernoulli(random_unit_rat(rng));
    case 1: return Measure::mu_p(random_unit_rat(rng));
    case 2: return Measure::mixture(random_unit_rat(rng));
    default:
      return Measure::markov(random_unit_rat(rng), random_unit_rat(rng), random_unit_rat(rng));
  }
}

}  // namespace

TEST_CASE("cylinder masses on pinned examples") {
  CHECK(Measure::bernoulli(Rat(1, 4)).cylinder(Bits("10")) == Rat(3, 16));
  CHECK(Measure::bernoulli(Rat(1, 2)).cylinder(Bits("0110")) == Rat(1, 16));
  CHECK(Measure::bernoulli(Rat(0)).cylinder(Bits("1")) == Rat(0));
  CHECK(Measure::bernoulli(Rat(1)).cylinder(Bits("111")) == Rat(1));

  // The first bit of mu_p is always 1; afterwards a 1 at gap k has law p/(k+1).
  Measure m = Measure::mu_p(Rat(1, 3));
  CHECK(m.cylinder(Bits("1")) == Rat(1));
  CHECK(m.cylinder(Bits("11")) == Rat(1, 3));
  CHECK(m.cylinder(Bits("0")) == Rat(0));
  CHECK(m.cylinder(Bits("10")) == Rat(2, 3));
  // after "10" the gap is 1, so P(1) = p/2 = 1/6
  CHECK(m.cylinder(Bits("101")) == Rat(2, 3) * Rat(1, 6));

  Measure mix = Measure::mixture(Rat(1, 3));
  CHECK(mix.cylinder(Bits("0")) == Rat(1, 3));
  CHECK(mix.cylinder(Bits("1")) == Rat(2, 3));
  CHECK(mix.cylinder(Bits("0000")) == Rat(1, 3));
  CHECK(mix.cylinder(Bits("01")) == Rat(0));

  Measure pt = Measure::point_mass(Bits("1"));
  CHECK(pt.cylinder(Bits("10")) == Rat(1));
  CHECK(pt.cylinder(Bits("11")) == Rat(0));
  CHECK(pt.cylinder(Bits("1000")) == Rat(1));

  Measure mk = Measure::markov(Rat(1, 4), Rat(3, 4), Rat(1, 2));
  CHECK(mk.cylinder(Bits("1")) == Rat(1, 2));
  CHECK(mk.cylinder(Bits("11")) == Rat(1, 2) * Rat(3, 4));
  CHECK(mk.cylinder(Bits("10")) == Rat(1, 2) * Rat(1, 4));
}

TEST_CASE("cylinder additivity and unit total mass for every bundled kind") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    Measure m = random_measure(rng);
    CHECK(m.cylinder(Bits::empty()) == Rat(1));
    for (std::size_t len = 0; len < 7; ++len) {
      Rat total(0);
      for (const Bits& sigma : Bits::all_of_length(len)) {
        CHECK(m.cylinder(sigma) == m.cylinder(sigma.append(0)) + m.cylinder(sigma.append(1)));
        CHECK_FALSE(m.cylinder(sigma).is_negative());
        total += m.cylinder(sigma);
      }
      CHECK(total == Rat(1));
    }
  }
}

TEST_CASE("clopen mass agrees with atom sums and respects the algebra") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    Measure m = random_measure(rng);
    std::vector<Bits> atoms;
    for (std::size_t i = 0; i < 16; ++i)
      if (rng() & 1) atoms.push_back(Bits::from_index(i, 4));
    Clopen c = Clopen::from_cylinders(atoms);
    CHECK(m.mass(c) + m.mass(c.complement()) == Rat(1));
    CHECK(m.mass(Clopen::full()) == Rat(1));
    CHECK(m.mass(Clopen::empty()) == Rat(0));
  }
}

TEST_CASE("measure specs serialize and parse as canonical text") {
  for (const char* spec : {"bernoulli:p=1/2", "mu_p:p=2/7", "mixture:p=1/3",
                           "markov:rows=1/4,3/4;init=1/2", "point:sigma=101",
                           "point:sigma="}) {
    CHECK(Measure::parse(spec).serialize() == spec);
  }
  // Point-mass addresses are canonical: trailing zeros name the same sequence.
  CHECK(Measure::parse("point:sigma=10").serialize() == "point:sigma=1");
  CHECK(Measure::parse("point:sigma=10") == Measure::parse("point:sigma=1"));
  CHECK(Measure::point_mass(Bits("00")) == Measure::point_mass(Bits::empty()));

  CHECK_THROWS(Measure::parse("bernoulli:p=3/2"));   // outside [0,1]
  CHECK_THROWS(Measure::parse("bernoulli:q=1/2"));
  CHECK_THROWS(Measure::parse("gauss:p=1/2"));
  CHECK_THROWS(Measure::parse("markov:rows=1/2;init=1/2"));
}

TEST_CASE("level metric: pinned values") {
  Measure half = Measure::bernoulli(Rat(1, 2));
  Measure quarter = Measure::bernoulli(Rat(1, 4));
  CHECK(rho_n(half, quarter, 0) == Rat(0));
  CHECK(rho_n(half, quarter, 1) == Rat(1, 4));
  CHECK(rho_n(half, quarter, 2) == Rat(5, 16));

  Measure zero = Measure::bernoulli(Rat(0));
  Measure one = Measure::bernoulli(Rat(1));
  for (std::size_t n = 1; n <= 4; ++n) CHECK(rho_n(zero, one, n) == Rat(1));
}

TEST_CASE("level metric equals brute-force clopen maximization (oracle, n <= 3)") {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 60; ++trial) {
    Measure a = random_measure(rng), b = random_measure(rng);
    for (std::size_t n = 0; n <= 3; ++n)
      CHECK(rho_n(a, b, n) == rho_n_bruteforce(a, b, n));
  }
}

TEST_CASE("level metric: symmetry, triangle, monotone growth (random suite)") {
  std::mt19937_64 rng(556);
  for (int trial = 0; trial < 40; ++trial) {
    Measure a = random_measure(rng), b = random_measure(rng), c = random_measure(rng);
    Rat prev(0);
    for (std::size_t n = 0; n <= 6; ++n) {
      Rat ab = rho_n(a, b, n);
      CHECK(ab == rho_n(b, a, n));
      CHECK(ab <= rho_n(a, c, n) + rho_n(c, b, n));
      CHECK(prev <= ab);
      CHECK(ab <= Rat(1));
      prev = ab;
    }
  }
}

TEST_CASE("metric enclosure: pinned values") {
  Measure half = Measure::bernoulli(Rat(1, 2));
  Measure quarter = Measure::bernoulli(Rat(1, 4));
  Interval i = rho_interval(half, quarter, 2);
  CHECK(i.lo == Rat(9, 32));
  CHECK(i.hi == Rat(29, 64));

  // Extremal pair: the tail bound pins the distance exactly at every level >= 1.
  Interval e = rho_interval(Measure::bernoulli(Rat(0)), Measure::bernoulli(Rat(1)), 3);
  CHECK(e.lo == Rat(1));
  CHECK(e.hi == Rat(1));

  CHECK(rho_interval(half, half, 4).lo == Rat(0));
  CHECK(rho_interval(half, half, 4).hi == Rat(0));
}

TEST_CASE("metric enclosure: nesting, width bound, and symmetry (random suite)") {
  std::mt19937_64 rng(557);
  for (int trial = 0; trial < 25; ++trial) {
    Measure a = random_measure(rng), b = random_measure(rng);
    Interval prev = rho_interval(a, b, 0);
    for (std::size_t M = 1; M <= 6; ++M) {
      Interval cur = rho_interval(a, b, M);
      CHECK(cur.lo <= cur.hi);
      CHECK(cur.width() <= Rat::pow2(-static_cast<long>(M)));
      // Enclosures shrink: later intervals sit inside earlier ones.
      CHECK(prev.lo <= cur.lo);
      CHECK(cur.hi <= prev.hi);
      Interval sym = rho_interval(b, a, M);
      CHECK(sym.lo == cur.lo);
      CHECK(sym.hi == cur.hi);
      prev = cur;
    }
  }
}

TEST_CASE("ball membership is three-valued and certified") {
  Ball b{Measure::bernoulli(Rat(1, 2)), Rat(1, 4)};
  CHECK(b.contains(Measure::bernoulli(Rat(1, 2)), 8) == Fit::inside);
  CHECK(b.contains(Measure::bernoulli(Rat(7, 16)), 8) == Fit::inside);
  CHECK(b.contains(Measure::bernoulli(Rat(0)), 8) == Fit::outside);
  // Radius-zero balls certify only their own center inside.
  Ball pt{Measure::bernoulli(Rat(1, 3)), Rat(0)};
  CHECK(pt.contains(Measure::bernoulli(Rat(1, 3)), 8) == Fit::inside);
  CHECK(pt.contains(Measure::bernoulli(Rat(1, 4)), 8) == Fit::outside);
  // A distinct spec of the same measure is undecidable at finite precision,
  // never misclassified.
  Ball mu0{Measure::mu_p(Rat(0)), Rat(0)};
  CHECK(mu0.contains(Measure::point_mass(Bits("1")), 8) == Fit::unknown);
}

TEST_CASE("membership transfers to clopen masses: |a(C) - b(C)| < 2^n r") {
  std::mt19937_64 rng(558);
  int certified = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Measure center = Measure::bernoulli(random_unit_rat(rng, 24));
    Measure probe = Measure::bernoulli(random_unit_rat(rng, 24));
    Rat r = Rat(1, 1 + static_cast<long>(rng() % 12));
    Ball ball{center, r};
    if (ball.contains(probe, 10) != Fit::inside) continue;
    ++certified;
    std::size_t n = 1 + rng() % 4;
    std::vector<Bits> atoms;
    for (const Bits& a : Bits::all_of_length(n))
      if (rng() & 1) atoms.push_back(a);
    Clopen c = Clopen::from_cylinders(atoms);
    CHECK(abs(center.mass(c) - probe.mass(c)) < Rat::pow2(static_cast<long>(n)) * r);
  }
  CHECK(certified > 30);  // the sample actually exercised the bound
}

TEST_CASE("ball nesting certification via the triangle inequality") {
  Ball inner{Measure::bernoulli(Rat(1, 2)), Rat(1, 16)};
  Ball outer{Measure::bernoulli(Rat(7, 16)), Rat(1, 2)};
  CHECK(inner.within(outer, 10) == Fit::inside);
  Ball far_ball{Measure::bernoulli(Rat(0)), Rat(1, 64)};
  CHECK(far_ball.within(inner, 10) == Fit::outside);
}
