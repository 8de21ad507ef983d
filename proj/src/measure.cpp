#include "cantor/measure.hpp"

#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

namespace cantor {

void Measure::check_unit_range(const Rat& q, const char* what) {
  if (q.is_negative() || Rat(1) < q)
    throw std::domain_error(std::string("Measure: ") + what + " outside [0,1]");
}

Measure Measure::bernoulli(const Rat& p) {
  check_unit_range(p, "bernoulli parameter");
  MeasureSpec s;
  s.kind = MeasureKind::bernoulli;
  s.p = p;
  return Measure(std::move(s));
}

Measure Measure::mu_p(const Rat& p) {
  check_unit_range(p, "mu_p parameter");
  MeasureSpec s;
  s.kind = MeasureKind::mu_p;
  s.p = p;
  return Measure(std::move(s));
}

Measure Measure::mixture(const Rat& p) {
  check_unit_range(p, "mixture parameter");
  MeasureSpec s;
  s.kind = MeasureKind::mixture;
  s.p = p;
  return Measure(std::move(s));
}

Measure Measure::markov(const Rat& row0, const Rat& row1, const Rat& init) {
  check_unit_range(row0, "markov row 0");
  check_unit_range(row1, "markov row 1");
  check_unit_range(init, "markov initial law");
  MeasureSpec s;
  s.kind = MeasureKind::markov;
  s.row0 = row0;
  s.row1 = row1;
  s.init = init;
  return Measure(std::move(s));
}

Measure Measure::point_mass(const Bits& sigma) {
  // Canonical address: sigma and sigma followed by zeros denote the same
  // sequence, so strip trailing zeros.
  std::string s = sigma.str();
  while (!s.empty() && s.back() == '0') s.pop_back();
  MeasureSpec spec;
  spec.kind = MeasureKind::point;
  spec.sigma = Bits(s);
  return Measure(std::move(spec));
}

namespace {

// Pulls "key=value" off the front of `rest`, where value runs to the next ';'.
std::string take_field(std::string& rest, const std::string& key) {
  if (rest.rfind(key + "=", 0) != 0)
    throw std::invalid_argument("Measure::parse: expected '" + key + "=' in spec");
  rest.erase(0, key.size() + 1);
  auto semi = rest.find(';');
  std::string value = rest.substr(0, semi);
  rest.erase(0, semi == std::string::npos ? rest.size() : semi + 1);
  return value;
}

}  // namespace

Measure Measure::parse(const std::string& spec) {
  auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (head == "bernoulli") return bernoulli(Rat::parse(take_field(rest, "p")));
  if (head == "mu_p") return mu_p(Rat::parse(take_field(rest, "p")));
  if (head == "mixture") return mixture(Rat::parse(take_field(rest, "p")));
  if (head == "markov") {
    std::string rows = take_field(rest, "rows");
    auto comma = rows.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("Measure::parse: markov rows need two entries");
    Rat r0 = Rat::parse(rows.substr(0, comma));
    Rat r1 = Rat::parse(rows.substr(comma + 1));
    Rat init = Rat::parse(take_field(rest, "init"));
    return markov(r0, r1, init);
  }
  if (head == "point") {
    if (rest.rfind("sigma=", 0) != 0)
      throw std::invalid_argument("Measure::parse: point needs 'sigma='");
    return point_mass(Bits(rest.substr(6)));
  }
  throw std::invalid_argument("Measure::parse: unknown kind '" + head + "'");
}

std::string Measure::serialize() const {
  switch (spec_.kind) {
    case MeasureKind::bernoulli: return "bernoulli:p=" + spec_.p.str();
    case MeasureKind::mu_p: return "mu_p:p=" + spec_.p.str();
    case MeasureKind::mixture: return "mixture:p=" + spec_.p.str();
    case MeasureKind::markov:
      return "markov:rows=" + spec_.row0.str() + "," + spec_.row1.str() + ";init=" + spec_.init.str();
    case MeasureKind::point: return "point:sigma=" + spec_.sigma.str();
  }
  throw std::logic_error("Measure::serialize: bad kind");
}

MeasureWalker::MeasureWalker(const Measure& m)
    : kind_(m.spec_.kind), spec_(&m.spec_), prob_(1) {}

Rat MeasureWalker::conditional_one() const {
  if (prob_.is_zero()) return Rat(0);  // dead branch; children stay at zero
  switch (kind_) {
    case MeasureKind::bernoulli:
      return spec_->p;
    case MeasureKind::mu_p:
      if (at_start_) return Rat(1);  // the first bit is always 1
      return spec_->p / Rat(zeros_since_one_ + 1);
    case MeasureKind::mixture:
      switch (mix_) {
        case MixState::at_root: return Rat(1) - spec_->p;
        case MixState::zeros: return Rat(0);
        case MixState::ones: return Rat(1);
        case MixState::dead: return Rat(0);
      }
      break;
    case MeasureKind::markov:
      if (at_start_) return spec_->init;
      return last_bit_ ? spec_->row1 : spec_->row0;
    case MeasureKind::point: {
      const Bits& s = spec_->sigma;
      return Rat(position_ < s.size() ? s.bit(position_) : 0);
    }
  }
  throw std::logic_error("MeasureWalker: bad kind");
}

void MeasureWalker::step(int bit) {
  const Rat c1 = conditional_one();
  prob_ *= bit ? c1 : Rat(1) - c1;
  switch (kind_) {
    case MeasureKind::bernoulli:
      break;
    case MeasureKind::mu_p:
      if (bit) zeros_since_one_ = 0;
      else ++zeros_since_one_;
      break;
    case MeasureKind::mixture:
      if (mix_ == MixState::at_root) mix_ = bit ? MixState::ones : MixState::zeros;
      else if ((mix_ == MixState::zeros && bit) || (mix_ == MixState::ones && !bit))
        mix_ = MixState::dead;
      break;
    case MeasureKind::markov:
      last_bit_ = bit;
      break;
    case MeasureKind::point:
      ++position_;
      break;
  }
  at_start_ = false;
}

Rat Measure::cylinder(const Bits& sigma) const {
  MeasureWalker w(*this);
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    w.step(sigma.bit(i));
    if (w.prob().is_zero()) return Rat(0);
  }
  return w.prob();
}

Rat Measure::mass(const Clopen& c) const {
  Rat total(0);
  for (const Bits& atom : c.atoms()) total += cylinder(atom);
  return total;
}

Rat Measure::conditional_one(const Bits& sigma) const {
  MeasureWalker w(*this);
  for (std::size_t i = 0; i < sigma.size(); ++i) w.step(sigma.bit(i));
  if (w.prob().is_zero())
    throw std::domain_error("Measure::conditional_one: prefix has zero mass");
  return w.conditional_one();
}

namespace {

// Depth-first walk over all level-n strings, the fallback evaluator. Prunes
// only subtrees both measures have already killed.
Rat rho_n_walk(const MeasureWalker& wa, const MeasureWalker& wb, std::size_t depth,
               std::size_t n) {
  if (wa.prob().is_zero() && wb.prob().is_zero()) return Rat(0);
  if (depth == n) {
    return wb.prob() < wa.prob() ? wa.prob() - wb.prob() : Rat(0);
  }
  Rat acc(0);
  for (int bit : {0, 1}) {
    MeasureWalker ca = wa, cb = wb;
    ca.step(bit);
    cb.step(bit);
    acc += rho_n_walk(ca, cb, depth + 1, n);
  }
  return acc;
}

// Above this many classes per level the grouping has failed to compress the
// tree, so the bounded-memory walk is the better evaluator.
constexpr std::size_t kGroupCap = std::size_t{1} << 15;

}  // namespace

Rat rho_n(const Measure& a, const Measure& b, std::size_t n) {
  if (a == b) return Rat(0);
  // Positive-part identity: the maximizing clopen set is the union of the
  // level-n atoms where a outweighs b, so the max equals the positive-part
  // sum. Prefixes of equal depth whose walkers carry equal path state and
  // equal masses are interchangeable from here on, so walk classes of
  // prefixes instead of prefixes: product kinds collapse a level to one
  // class per mass pair, chains to one per (last bit, mass pair), and point
  // masses and mixtures to constantly many. Only an irreducible pair grows
  // one class per string, and that case is handed to the plain tree walk.
  struct Entry {
    MeasureWalker wa;
    MeasureWalker wb;
    Int mult;
  };
  using Key = std::tuple<std::tuple<long, int, int>, std::tuple<long, int, int>, Rat, Rat>;
  const auto key_of = [](const MeasureWalker& wa, const MeasureWalker& wb) {
    return Key{wa.state_tag(), wb.state_tag(), wa.prob(), wb.prob()};
  };
  std::map<Key, Entry> level;
  {
    MeasureWalker wa(a), wb(b);
    level.emplace(key_of(wa, wb), Entry{wa, wb, Int(1)});
  }
  for (std::size_t depth = 0; depth < n; ++depth) {
    std::map<Key, Entry> finer;
    for (const auto& [key, entry] : level) {
      for (int bit : {0, 1}) {
        MeasureWalker ca = entry.wa, cb = entry.wb;
        ca.step(bit);
        cb.step(bit);
        if (ca.prob().is_zero() && cb.prob().is_zero()) continue;
        auto [it, fresh] = finer.try_emplace(key_of(ca, cb), Entry{ca, cb, Int(0)});
        it->second.mult += entry.mult;
      }
    }
    if (finer.size() > kGroupCap)
      return rho_n_walk(MeasureWalker(a), MeasureWalker(b), 0, n);
    level = std::move(finer);
  }
  Rat acc(0);
  for (const auto& [key, entry] : level)
    if (entry.wb.prob() < entry.wa.prob())
      acc += Rat(entry.mult, Int(1)) * (entry.wa.prob() - entry.wb.prob());
  return acc;
}

Interval rho_interval(const Measure& a, const Measure& b, std::size_t M) {
  if (a == b) return Interval(Rat(0), Rat(0));
  Rat partial(0);
  Rat rho_top(0);
  for (std::size_t n = 0; n <= M; ++n) {
    rho_top = rho_n(a, b, n);
    partial += Rat::pow2(-static_cast<long>(n)) * rho_top;
  }
  // The level metrics are nondecreasing in n and bounded by 1, so the
  // discarded tail lies between 2^-M * rho_M and 2^-M.
  const Rat tail_unit = Rat::pow2(-static_cast<long>(M));
  return Interval(partial + tail_unit * rho_top, partial + tail_unit);
}

Fit Ball::contains(const Measure& m, std::size_t prec) const {
  if (m == center) return Fit::inside;  // distance is exactly zero
  // Successive truncation enclosures are nested, so the first level that
  // clears the radius gives the verdict every deeper level would. Iterate
  // coarse to fine and stop early; exhausting prec undecided is the same
  // unknown the full-depth enclosure would report.
  Rat partial(0);
  for (std::size_t M = 0; M <= prec; ++M) {
    const Rat top = rho_n(center, m, M);
    const Rat unit = Rat::pow2(-static_cast<long>(M));
    partial += unit * top;
    const Rat lo = partial + unit * top;
    const Rat hi = partial + unit;
    if (open) {
      if (hi < radius) return Fit::inside;
      if (radius <= lo) return Fit::outside;
    } else {
      if (hi <= radius) return Fit::inside;
      if (radius < lo) return Fit::outside;
    }
  }
  return Fit::unknown;
}

Fit Ball::within(const Ball& outer, std::size_t prec) const {
  // Triangle inequality: every point within `radius` of our center lies
  // within dist + radius of the outer center.
  const bool strict_needed = outer.open && !open;
  if (center == outer.center) {
    if (strict_needed ? radius < outer.radius : radius <= outer.radius) return Fit::inside;
    return Fit::unknown;  // concentric balls never certify escape
  }
  // Same nested-enclosure early exit as contains.
  Rat partial(0);
  for (std::size_t M = 0; M <= prec; ++M) {
    const Rat top = rho_n(center, outer.center, M);
    const Rat unit = Rat::pow2(-static_cast<long>(M));
    partial += unit * top;
    const Rat lo = partial + unit * top;
    const Rat hi = partial + unit;
    const Rat reach_hi = hi + radius;
    if (strict_needed ? reach_hi < outer.radius : reach_hi <= outer.radius) return Fit::inside;
    if (outer.radius + radius < lo) return Fit::outside;  // even the nearest point escapes
  }
  return Fit::unknown;
}

}  // namespace cantor
