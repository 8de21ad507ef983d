#include "doctest.h"

#include <random>

#include "cantor/bits.hpp"
#include "cantor/clopen.hpp"
#include "cantor/rat.hpp"

using namespace cantor;

TEST_CASE("rationals parse, canonicalize, and round-trip") {
  CHECK(Rat::parse("3/12") == Rat(1, 4));
  CHECK(Rat::parse("3/12").str() == "1/4");
  CHECK(Rat::parse("-6/4").str() == "-3/2");
  CHECK(Rat::parse("7").str() == "7/1");
  CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
  CHECK_THROWS(Rat::parse("1/0"));
  CHECK_THROWS(Rat::parse("a/b"));
  CHECK_THROWS(Rat::parse(""));
  CHECK_THROWS(Rat(1, 2) / Rat(0));
}

TEST_CASE("dyadic powers and exact log2 brackets") {
  CHECK(Rat::pow2(-3) == Rat(1, 8));
  CHECK(Rat::pow2(5) == Rat(32));
  CHECK(floor_log2(Rat(1)) == 0);
  CHECK(floor_log2(Rat(3, 4)) == -1);
  CHECK(ceil_log2(Rat(3, 4)) == 0);
  CHECK(floor_log2(Rat(1, 4)) == -2);
  CHECK(ceil_log2(Rat(1, 4)) == -2);
  // floor(-log2 q) distinguishes exact powers from the open interval above.
  CHECK(floor_neg_log2(Rat(1, 2)) == 1);
  CHECK(floor_neg_log2(Rat(3, 4)) == 0);
  CHECK(floor_neg_log2(Rat(5, 16)) == 1);
  CHECK(ceil_neg_log2(Rat(5, 16)) == 2);
  CHECK(floor_neg_log2(Rat(3, 4) + Rat(1, 4)) == 0);
  CHECK_THROWS(floor_log2(Rat(0)));
}

TEST_CASE("log2 brackets agree with a brute-force scan over random rationals") {
  std::mt19937_64 rng(20260814);
  for (int trial = 0; trial < 300; ++trial) {
    long num = static_cast<long>(rng() % 4096) + 1;
    long den = static_cast<long>(rng() % 4096) + 1;
    Rat q(num, den);
    long f = floor_log2(q), c = ceil_log2(q);
    CHECK(Rat::pow2(f) <= q);
    CHECK(q < Rat::pow2(f + 1));
    CHECK(q <= Rat::pow2(c));
    CHECK(Rat::pow2(c - 1) < q);
  }
}

TEST_CASE("interval invariants") {
  Interval i(Rat(1, 4), Rat(1, 2));
  CHECK(i.width() == Rat(1, 4));
  CHECK(i.contains(Rat(1, 3)));
  CHECK_FALSE(i.contains(Rat(3, 4)));
  CHECK_THROWS(Interval(Rat(1), Rat(0)));
}

TEST_CASE("bit strings index and enumerate consistently") {
  CHECK(Bits("0110").ones() == 2);
  CHECK(Bits("0110").index() == 6);
  CHECK(Bits::from_index(6, 4) == Bits("0110"));
  CHECK(Bits::empty().size() == 0);
  CHECK(Bits("01").is_prefix_of(Bits("0110")));
  CHECK_FALSE(Bits("11").is_prefix_of(Bits("0110")));
  CHECK(Bits::all_of_length(3).size() == 8);
  CHECK_THROWS(Bits("012"));
}

TEST_CASE("clopen canonical form merges siblings to least granularity") {
  // [0] together with [01] is just [0].
  Clopen c = Clopen::from_cylinders({Bits("0"), Bits("01")});
  CHECK(c == Clopen::cylinder(Bits("0")));
  CHECK(c.granularity() == 1);

  // Both children of the root give the full space at granularity zero.
  Clopen both = Clopen::from_cylinders({Bits("0"), Bits("1")});
  CHECK(both.is_full());
  CHECK(both.granularity() == 0);

  CHECK(Clopen::empty().granularity() == 0);
  CHECK(Clopen::empty().is_empty());
}

TEST_CASE("clopen boolean algebra on pinned examples") {
  Clopen c00 = Clopen::cylinder(Bits("00"));
  Clopen c11 = Clopen::cylinder(Bits("11"));
  Clopen u = c00.unite(c11);

  // Removing [00] from the full space leaves [01] together with [1].
  Clopen diff = Clopen::full().difference(c00);
  CHECK(diff == Clopen::from_cylinders({Bits("01"), Bits("1")}));

  // Complement of [00] u [11] is [01] u [10].
  CHECK(u.complement() == Clopen::from_cylinders({Bits("01"), Bits("10")}));

  CHECK(u.intersect(c00) == c00);
  CHECK(u.intersect(Clopen::empty()).is_empty());
  CHECK(c00.unite(Clopen::full()).is_full());
}

TEST_CASE("clopen boolean laws hold on random sets (atom-level oracle)") {
  std::mt19937_64 rng(7);
  auto random_set = [&](std::size_t g) {
    std::vector<Bits> atoms;
    for (std::size_t i = 0; i < (std::size_t{1} << g); ++i)
      if (rng() & 1) atoms.push_back(Bits::from_index(i, g));
    return Clopen::from_cylinders(atoms);
  };
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t g = 1 + rng() % 5;
    Clopen a = random_set(g), b = random_set(1 + rng() % 5), c = random_set(1 + rng() % 4);
    // De Morgan
    CHECK(a.unite(b).complement() == a.complement().intersect(b.complement()));
    CHECK(a.intersect(b).complement() == a.complement().unite(b.complement()));
    // difference via complement
    CHECK(a.difference(b) == a.intersect(b.complement()));
    // distributivity
    CHECK(a.intersect(b.unite(c)) == a.intersect(b).unite(a.intersect(c)));
    // involution and idempotence
    CHECK(a.complement().complement() == a);
    CHECK(a.unite(a) == a);
  }
}

TEST_CASE("matches classifies cylinders with undetermined only above granularity") {
  Clopen u = Clopen::from_cylinders({Bits("00"), Bits("11")});
  CHECK(u.matches(Bits("00")) == Region::inside);
  CHECK(u.matches(Bits("000")) == Region::inside);
  CHECK(u.matches(Bits("01")) == Region::outside);
  CHECK(u.matches(Bits("0")) == Region::undetermined);
  CHECK(u.matches(Bits::empty()) == Region::undetermined);
  CHECK(Clopen::full().matches(Bits::empty()) == Region::inside);
  CHECK(Clopen::empty().matches(Bits::empty()) == Region::outside);

  // At or below granularity the answer is always determined.
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Bits> atoms;
    for (std::size_t i = 0; i < 8; ++i)
      if (rng() & 1) atoms.push_back(Bits::from_index(i, 3));
    Clopen s = Clopen::from_cylinders(atoms);
    for (const Bits& probe : Bits::all_of_length(4))
      CHECK(s.matches(probe) != Region::undetermined);
  }
}

TEST_CASE("clopen serialization round-trips, including the degenerate forms") {
  CHECK(Clopen::empty().serialize() == "g=0;atoms=");
  CHECK(Clopen::full().serialize() == "g=0;atoms=\xce\x9b");
  CHECK(Clopen::parse("g=0;atoms=") == Clopen::empty());
  CHECK(Clopen::parse("g=0;atoms=\xce\x9b") == Clopen::full());

  Clopen u = Clopen::from_cylinders({Bits("00"), Bits("11")});
  CHECK(u.serialize() == "g=2;atoms=00,11");
  CHECK(Clopen::parse(u.serialize()) == u);

  // Parsing refuses malformed text and non-canonical lengths.
  CHECK_THROWS(Clopen::parse("atoms=00"));
  CHECK_THROWS(Clopen::parse("g=2;atoms=0"));

  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Bits> atoms;
    std::size_t g = rng() % 6;
    for (std::size_t i = 0; i < (std::size_t{1} << g); ++i)
      if (rng() & 1) atoms.push_back(Bits::from_index(i, g));
    Clopen s = Clopen::from_cylinders(atoms);
    CHECK(Clopen::parse(s.serialize()) == s);
  }
}

TEST_CASE("granularity guard refuses runaway refinement") {
  CHECK_THROWS(Clopen::cylinder(Bits(std::string(23, '0'))));
}
