#include "cantor/learner.hpp"

#include <deque>
#include <stdexcept>

namespace cantor {

// ---------------------------------------------------------------------------
// PrecisionSchedule

PrecisionSchedule PrecisionSchedule::dyadic(unsigned long a, unsigned long b) {
  if (a == 0) throw std::invalid_argument("PrecisionSchedule: slope 0 does not vanish");
  return PrecisionSchedule(Kind::dyadic, a, b);
}

PrecisionSchedule PrecisionSchedule::half_floor() {
  return PrecisionSchedule(Kind::half_floor, 0, 0);
}

Rat PrecisionSchedule::operator()(std::size_t n) const {
  switch (kind_) {
    case Kind::dyadic:
      return Rat::pow2(-static_cast<long>(a_ * n + b_));
    case Kind::half_floor:
      return Rat::pow2(-static_cast<long>(n / 2));
  }
  throw std::logic_error("PrecisionSchedule: bad kind");
}

std::string PrecisionSchedule::serialize() const {
  if (kind_ == Kind::half_floor) return "2^-floor(n/2)";
  return "2^-(" + std::to_string(a_) + "*n+" + std::to_string(b_) + ")";
}

PrecisionSchedule PrecisionSchedule::parse(const std::string& text) {
  if (text == "2^-floor(n/2)") return half_floor();
  if (text.rfind("2^-(", 0) == 0 && text.back() == ')') {
    auto star = text.find("*n+");
    if (star != std::string::npos) {
      unsigned long a = std::stoul(text.substr(4, star - 4));
      unsigned long b = std::stoul(text.substr(star + 3, text.size() - 1 - (star + 3)));
      return dyadic(a, b);
    }
  }
  throw std::invalid_argument("PrecisionSchedule::parse: unrecognized schedule '" + text + "'");
}

// ---------------------------------------------------------------------------
// Traces

std::optional<Ball> LearnerTrace::first_ball_below(const Rat& eps) const {
  for (const auto& [ball, stamp] : emitted)
    if (ball.radius < eps) return ball;
  return std::nullopt;
}

bool reached_precision(const LearnerTrace& trace, const Rat& eps) {
  return trace.first_ball_below(eps).has_value();
}

// ---------------------------------------------------------------------------
// Learner implementations

struct Learner::Impl {
  enum class Kind {
    first_bit,
    eventually_zero,
    rational_bernoulli,
    frequency,
    stubborn,
    always_null,
    wrap
  };
  Kind kind = Kind::always_null;
  PrecisionSchedule sched = PrecisionSchedule::half_floor();  // frequency radius / wrap demand
  std::optional<Measure> mu0;                                 // stubborn
  std::shared_ptr<const Impl> inner;                          // wrap

  std::vector<std::pair<Ball, std::size_t>> emit(const Bits& sigma, std::size_t budget) const;
  std::string text() const;
};

namespace {

// Largest k with k^3 <= m.
unsigned long integer_cbrt(unsigned long m) {
  unsigned long k = 0;
  while ((k + 1) * (k + 1) * (k + 1) <= m) ++k;
  return k;
}

}  // namespace

Rat rational_bernoulli_err(std::size_t m) {
  if (m == 0) throw std::domain_error("rational_bernoulli_err: length 0");
  return Rat(1, static_cast<long>(integer_cbrt(m)));
}

Rat stern_brocot_rational(std::size_t i) {
  if (i == 0) throw std::domain_error("stern_brocot_rational: 1-indexed");
  // Grown on demand; the breadth-first frontier holds the interval whose
  // mediant is emitted next.
  thread_local std::vector<Rat> cache{Rat(0), Rat(1)};
  thread_local std::deque<std::pair<Rat, Rat>> frontier{{Rat(0), Rat(1)}};
  while (cache.size() < i) {
    auto [lo, hi] = frontier.front();
    frontier.pop_front();
    Rat med(lo.num() + hi.num(), lo.den() + hi.den());
    cache.push_back(med);
    frontier.emplace_back(lo, med);
    frontier.emplace_back(med, hi);
  }
  return cache[i - 1];
}

std::vector<std::pair<Ball, std::size_t>> Learner::Impl::emit(const Bits& sigma,
                                                              std::size_t budget) const {
  std::vector<std::pair<Ball, std::size_t>> out;
  if (budget == 0) return out;
  switch (kind) {
    case Kind::always_null:
      break;
    case Kind::first_bit:
      if (sigma.size() >= 1)
        out.push_back({Ball{Measure::mixture(Rat(sigma.bit(0) == 0 ? 1 : 0)), Rat(0)}, 1});
      break;
    case Kind::eventually_zero:
      out.push_back({Ball{Measure::point_mass(sigma), Rat(0)}, 1});
      break;
    case Kind::stubborn:
      out.push_back({Ball{*mu0, Rat(0)}, 1});
      break;
    case Kind::frequency:
      if (sigma.size() >= 1) {
        Rat freq(static_cast<long>(sigma.ones()), static_cast<long>(sigma.size()));
        Rat radius = min(sched(sigma.size()), Rat(1, 8));
        out.push_back({Ball{Measure::bernoulli(freq), radius}, 1});
      }
      break;
    case Kind::rational_bernoulli:
      if (sigma.size() >= 1) {
        Rat freq(static_cast<long>(sigma.ones()), static_cast<long>(sigma.size()));
        Rat err = rational_bernoulli_err(sigma.size());
        for (std::size_t i = 1; i <= budget; ++i) {
          Rat q = stern_brocot_rational(i);
          if (abs(freq - q) <= err) {
            out.push_back({Ball{Measure::bernoulli(q), Rat(0)}, i});
            break;
          }
        }
      }
      break;
    case Kind::wrap: {
      auto inner_emitted = inner->emit(sigma, budget);
      LearnerTrace probe{sigma, budget, inner_emitted};
      if (reached_precision(probe, sched(sigma.size()))) out = std::move(inner_emitted);
      break;
    }
  }
  return out;
}

std::string Learner::Impl::text() const {
  switch (kind) {
    case Kind::first_bit: return "first_bit";
    case Kind::eventually_zero: return "eventually_zero";
    case Kind::rational_bernoulli: return "rational_bernoulli:err=inv_cbrt";
    case Kind::frequency: return "frequency:radius=" + sched.serialize();
    case Kind::stubborn: return "stubborn:" + mu0->serialize();
    case Kind::always_null: return "always_null";
    case Kind::wrap: return "wrap(f=" + sched.serialize() + "," + inner->text() + ")";
  }
  throw std::logic_error("Learner: bad kind");
}

Learner Learner::first_bit() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::first_bit;
  return Learner(std::move(impl));
}
Learner Learner::eventually_zero() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::eventually_zero;
  return Learner(std::move(impl));
}
Learner Learner::rational_bernoulli() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::rational_bernoulli;
  return Learner(std::move(impl));
}
Learner Learner::always_null() {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::always_null;
  return Learner(std::move(impl));
}

Learner Learner::frequency(PrecisionSchedule radius) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::frequency;
  impl->sched = std::move(radius);
  return Learner(std::move(impl));
}

Learner Learner::stubborn(const Measure& mu0) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Impl::Kind::stubborn;
  impl->mu0 = mu0;
  return Learner(std::move(impl));
}

Learner threshold_wrap(Learner inner, PrecisionSchedule f) {
  Learner::Impl impl;
  impl.kind = Learner::Impl::Kind::wrap;
  impl.sched = std::move(f);
  impl.inner = std::move(inner.impl_);
  return Learner(std::make_shared<Learner::Impl>(std::move(impl)));
}

std::string Learner::serialize() const { return impl_->text(); }

Learner Learner::parse(const std::string& text) {
  if (text == "first_bit") return first_bit();
  if (text == "eventually_zero") return eventually_zero();
  if (text == "always_null") return always_null();
  if (text == "rational_bernoulli:err=inv_cbrt") return rational_bernoulli();
  if (text.rfind("rational_bernoulli:err=", 0) == 0)
    throw std::invalid_argument("Learner::parse: only err=inv_cbrt is bundled");
  if (text.rfind("frequency:radius=", 0) == 0)
    return frequency(PrecisionSchedule::parse(text.substr(17)));
  if (text.rfind("stubborn:", 0) == 0) return stubborn(Measure::parse(text.substr(9)));
  if (text.rfind("wrap(f=", 0) == 0 && text.back() == ')') {
    std::string body = text.substr(7, text.size() - 8);
    auto comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("Learner::parse: wrap needs an inner learner");
    return threshold_wrap(parse(body.substr(comma + 1)),
                          PrecisionSchedule::parse(body.substr(0, comma)));
  }
  throw std::invalid_argument("Learner::parse: unknown learner '" + text + "'");
}

LearnerTrace Learner::run(const Bits& sigma, std::size_t budget) const {
  LearnerTrace trace{sigma, budget, impl_->emit(sigma, budget)};
  // Contract checks on the emitted list: stamps fit the budget, the i-th ball
  // (1-indexed) is small enough that its diameter is below 2^-i, and each
  // ball is certified not to escape its predecessor.
  std::size_t last_stamp = 1;
  for (std::size_t i = 0; i < trace.emitted.size(); ++i) {
    const auto& [ball, stamp] = trace.emitted[i];
    if (stamp < last_stamp || stamp > budget)
      throw std::logic_error("Learner: trace stamps out of range");
    last_stamp = stamp;
    if (ball.radius * Rat(2) >= Rat::pow2(-static_cast<long>(i + 1)))
      throw std::logic_error("Learner: ball " + std::to_string(i + 1) + " too wide");
    if (i > 0 && ball.within(trace.emitted[i - 1].first, 12) == Fit::outside)
      throw std::logic_error("Learner: emitted balls are not nested");
  }
  return trace;
}

LearnerTrace run_learner(const Learner& a, const Bits& sigma, std::size_t budget) {
  return a.run(sigma, budget);
}

Clopen prec_set(const Learner& a, const PrecisionSchedule& f, std::size_t n, std::size_t budget) {
  const Rat target = f(n);
  std::vector<Bits> atoms;
  for (const Bits& sigma : Bits::all_of_length(n))
    if (reached_precision(a.run(sigma, budget), target)) atoms.push_back(sigma);
  return Clopen::from_cylinders(atoms);
}

Clopen null_set(const Learner& a, std::size_t n, std::size_t budget) {
  std::vector<Bits> atoms;
  for (const Bits& sigma : Bits::all_of_length(n))
    if (a.run(sigma, budget).is_null()) atoms.push_back(sigma);
  return Clopen::from_cylinders(atoms);
}

}  // namespace cantor
