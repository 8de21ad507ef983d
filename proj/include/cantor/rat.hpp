#pragma once

// Exact rational scalar used everywhere in the lab. Thin value wrapper over
// GMP's mpq_class pinning the invariants we rely on: canonical reduced form,
// positive denominator, exact text round-trip as "num/den".

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cantor {

using Int = mpz_class;

class Rat {
 public:
  Rat() : v_(0) {}
  Rat(long num) : v_(num) {}
  Rat(long num, long den) : v_(num, den) { normalize(); }
  Rat(const Int& num, const Int& den) : v_(mpq_class(num) / mpq_class(den)) {
    if (den == 0) throw std::domain_error("Rat: zero denominator");
    normalize();
  }
  explicit Rat(const mpq_class& q) : v_(q) { normalize(); }

  // Parses the canonical text form "num/den" (den optional: "3" == "3/1").
  static Rat parse(const std::string& text);

  const Int num() const { return v_.get_num(); }
  const Int den() const { return v_.get_den(); }
  const mpq_class& raw() const { return v_; }

  // 2^e for any integer e (negative exponents give exact dyadics).
  static Rat pow2(long e);

  std::string str() const;           // "num/den", always with denominator
  std::string decimal(int digits = 6) const;  // fixed-point advisory rendering

  bool is_zero() const { return sgn(v_) == 0; }
  bool is_negative() const { return sgn(v_) < 0; }
  bool is_integer() const { return v_.get_den() == 1; }

  Rat operator-() const { return Rat(mpq_class(-v_)); }
  Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
  Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
  Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
  Rat& operator/=(const Rat& o) {
    if (o.is_zero()) throw std::domain_error("Rat: division by zero");
    v_ /= o.v_;
    return *this;
  }

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rat& a, const Rat& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rat& a, const Rat& b) { return a.v_ < b.v_; }
  friend bool operator<=(const Rat& a, const Rat& b) { return a.v_ <= b.v_; }
  friend bool operator>(const Rat& a, const Rat& b) { return a.v_ > b.v_; }
  friend bool operator>=(const Rat& a, const Rat& b) { return a.v_ >= b.v_; }

 private:
  void normalize() { v_.canonicalize(); }
  mpq_class v_;
};

inline Rat abs(const Rat& q) { return q.is_negative() ? -q : q; }
inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

// Largest e with 2^e <= q. Requires q > 0.
long floor_log2(const Rat& q);
// Smallest e with 2^e >= q. Requires q > 0.
long ceil_log2(const Rat& q);

// floor(-log2 q) and ceil(-log2 q) for q > 0, both exact.
inline long floor_neg_log2(const Rat& q) { return -ceil_log2(q); }
inline long ceil_neg_log2(const Rat& q) { return -floor_log2(q); }

// Closed interval [lo, hi] of rationals; the truncation enclosure type.
struct Interval {
  Rat lo;
  Rat hi;

  Interval() = default;
  Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (hi < lo) throw std::invalid_argument("Interval: hi < lo");
  }
  Rat width() const { return hi - lo; }
  bool contains(const Rat& q) const { return lo <= q && q <= hi; }
};

}  // namespace cantor
