#include "cantor/rat.hpp"

#include <cctype>

namespace cantor {

Rat Rat::parse(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("Rat::parse: empty string");
  auto slash = text.find('/');
  const std::string num = text.substr(0, slash);
  const std::string den = slash == std::string::npos ? "1" : text.substr(slash + 1);
  auto check = [](const std::string& part) {
    if (part.empty()) throw std::invalid_argument("Rat::parse: missing digits");
    std::size_t i = (part[0] == '-' || part[0] == '+') ? 1 : 0;
    if (i == part.size()) throw std::invalid_argument("Rat::parse: missing digits");
    for (; i < part.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(part[i])))
        throw std::invalid_argument("Rat::parse: bad character in '" + part + "'");
  };
  check(num);
  check(den);
  mpq_class q;
  if (q.set_str(num + "/" + den, 10) != 0)
    throw std::invalid_argument("Rat::parse: unparsable '" + text + "'");
  if (q.get_den() == 0) throw std::domain_error("Rat::parse: zero denominator");
  return Rat(q);
}

Rat Rat::pow2(long e) {
  mpz_class n(1);
  if (e >= 0) {
    mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(e));
    return Rat(mpq_class(n));
  }
  mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<unsigned long>(-e));
  mpq_class q(1);
  q /= mpq_class(n);
  return Rat(q);
}

std::string Rat::str() const {
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rat::decimal(int digits) const {
  // Round-toward-zero fixed point; deterministic (no floating point involved).
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
  mpz_class scaled_num = v_.get_num() * scale;
  mpz_class whole = scaled_num / v_.get_den();  // truncates toward zero
  bool neg = whole < 0;
  mpz_class mag = neg ? mpz_class(-whole) : whole;
  std::string s = mag.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, digits + 1 - s.size(), '0');
  s.insert(s.size() - digits, ".");
  if (neg) s.insert(0, "-");
  return s;
}

namespace {

// Exact comparison of q against 2^e without constructing huge powers twice.
// Returns sign of (q - 2^e).
int cmp_pow2(const Rat& q, long e) {
  // q vs 2^e  <=>  num vs 2^e * den.
  mpz_class rhs = q.den();
  mpz_class lhs = q.num();
  if (e >= 0)
    mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(e));
  else
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<unsigned long>(-e));
  return cmp(lhs, rhs);
}

}  // namespace

long floor_log2(const Rat& q) {
  if (q.is_zero() || q.is_negative())
    throw std::domain_error("floor_log2: argument must be positive");
  // First guess from limb sizes: 2^(bits(n)-1) <= n < 2^bits(n).
  long e = static_cast<long>(mpz_sizeinbase(q.num().get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.den().get_mpz_t(), 2));
  // e is within 1 of the truth; settle by exact comparison.
  while (cmp_pow2(q, e) < 0) --e;        // 2^e > q: step down
  while (cmp_pow2(q, e + 1) >= 0) ++e;   // 2^(e+1) <= q: step up
  return e;
}

long ceil_log2(const Rat& q) {
  long e = floor_log2(q);
  return cmp_pow2(q, e) == 0 ? e : e + 1;
}

}  // namespace cantor
