#include "cantor/family.hpp"

#include <algorithm>

namespace cantor {

Rat binomial_window_mass(std::size_t m, const Rat& p, std::size_t lo, std::size_t hi) {
  if (p.is_negative() || Rat(1) < p) throw std::domain_error("binomial_window_mass: p outside [0,1]");
  if (hi > m) hi = m;
  if (lo > hi) return Rat(0);
  // Degenerate coins put all mass on a single count.
  if (p.is_zero()) return Rat(lo == 0 ? 1 : 0);
  if (p == Rat(1)) return Rat(lo <= m && m <= hi ? 1 : 0);

  // term_k = C(m,k) a^k (b-a)^(m-k) over the common denominator b^m, updated
  // incrementally: term_{k+1} = term_k * (m-k) * a / ((k+1) * (b-a)).
  const Int a = p.num();
  const Int b = p.den();
  const Int q = b - a;
  Int term;
  mpz_bin_uiui(term.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(lo));
  Int pw;
  mpz_pow_ui(pw.get_mpz_t(), a.get_mpz_t(), static_cast<unsigned long>(lo));
  term *= pw;
  mpz_pow_ui(pw.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(m - lo));
  term *= pw;

  Int sum = term;
  for (std::size_t k = lo; k < hi; ++k) {
    term *= static_cast<unsigned long>(m - k);
    term *= a;
    mpz_divexact_ui(term.get_mpz_t(), term.get_mpz_t(), static_cast<unsigned long>(k + 1));
    mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), q.get_mpz_t());
    sum += term;
  }
  Int denom;
  mpz_pow_ui(denom.get_mpz_t(), b.get_mpz_t(), static_cast<unsigned long>(m));
  return Rat(sum, denom);
}

// ---------------------------------------------------------------------------
// Separator

Separator Separator::clopen(Clopen c) {
  Separator s;
  s.is_window_ = false;
  s.clopen_ = std::move(c);
  return s;
}

Separator Separator::count_window(std::size_t m, std::size_t lo, std::size_t hi) {
  if (lo > hi || hi > m) throw std::invalid_argument("Separator::count_window: bad interval");
  Separator s;
  s.is_window_ = true;
  s.m_ = m;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

std::size_t Separator::granularity() const { return is_window_ ? m_ : clopen_.granularity(); }

const Clopen& Separator::clopen_set() const {
  if (is_window_) throw std::logic_error("Separator: count window has no explicit clopen form");
  return clopen_;
}

bool Separator::disjoint_with(const Separator& other) const {
  if (is_window_ && other.is_window_) {
    if (m_ != other.m_)
      throw std::invalid_argument("Separator::disjoint_with: windows at different granularity");
    return hi_ < other.lo_ || other.hi_ < lo_;
  }
  if (!is_window_ && !other.is_window_)
    return clopen_.intersect(other.clopen_).is_empty();
  throw std::invalid_argument("Separator::disjoint_with: mixed separator shapes");
}

namespace {

// Ones among the first m bits of sigma 000... .
std::size_t point_prefix_ones(const Bits& sigma, std::size_t m) {
  return sigma.size() <= m ? sigma.ones() : sigma.prefix(m).ones();
}

constexpr std::size_t kMaterializeLimit = 16;

}  // namespace

Clopen Separator::materialize() const {
  if (!is_window_) return clopen_;
  if (m_ > kMaterializeLimit)
    throw std::length_error("Separator::materialize: count window too wide to enumerate");
  std::vector<Bits> atoms;
  for (const Bits& a : Bits::all_of_length(m_)) {
    std::size_t c = a.ones();
    if (lo_ <= c && c <= hi_) atoms.push_back(a);
  }
  return Clopen::from_cylinders(atoms);
}

Rat Separator::mass(const Measure& mu) const {
  if (!is_window_) return mu.mass(clopen_);
  switch (mu.spec().kind) {
    case MeasureKind::bernoulli:
      return binomial_window_mass(m_, mu.spec().p, lo_, hi_);
    case MeasureKind::point: {
      std::size_t c = point_prefix_ones(mu.spec().sigma, m_);
      return Rat(lo_ <= c && c <= hi_ ? 1 : 0);
    }
    case MeasureKind::mixture: {
      Rat out(0);
      if (lo_ == 0) out += mu.spec().p;                    // the all-zeros point
      if (hi_ == m_) out += Rat(1) - mu.spec().p;          // the all-ones point
      return out;
    }
    default:
      if (m_ <= kMaterializeLimit) return mu.mass(materialize());
      throw std::domain_error(
          "Separator::mass: no exact count-window evaluation for measure kind '" +
          mu.serialize() + "' at granularity " + std::to_string(m_));
  }
}

Rat Separator::prefix_mass(const Measure& mu, const Bits& prefix) const {
  if (!is_window_) {
    // [prefix] n C: intersect with the cylinder explicitly.
    return mu.mass(clopen_.intersect(Clopen::cylinder(prefix)));
  }
  if (prefix.size() >= m_) {
    std::size_t c = prefix.prefix(m_).ones();
    return (lo_ <= c && c <= hi_) ? mu.cylinder(prefix) : Rat(0);
  }
  const std::size_t rest = m_ - prefix.size();
  const std::size_t have = prefix.ones();
  // Total count in [lo, hi]  <=>  remaining count in [lo-have, hi-have].
  if (have > hi_) return Rat(0);
  const std::size_t rlo = lo_ > have ? lo_ - have : 0;
  const std::size_t rhi = hi_ - have;
  switch (mu.spec().kind) {
    case MeasureKind::bernoulli:
      return mu.cylinder(prefix) * binomial_window_mass(rest, mu.spec().p, rlo, rhi);
    case MeasureKind::point: {
      if (mu.cylinder(prefix).is_zero()) return Rat(0);
      std::size_t c = point_prefix_ones(mu.spec().sigma, m_);
      return Rat(lo_ <= c && c <= hi_ ? 1 : 0);
    }
    case MeasureKind::mixture: {
      Rat out(0);
      if (prefix.ones() == 0 && lo_ == 0) out += mu.spec().p;
      if (prefix.zeros() == 0 && hi_ == m_) out += Rat(1) - mu.spec().p;
      return out;
    }
    default:
      if (m_ <= kMaterializeLimit)
        return mu.mass(materialize().intersect(Clopen::cylinder(prefix)));
      throw std::domain_error(
          "Separator::prefix_mass: no exact count-window evaluation for measure kind '" +
          mu.serialize() + "' at granularity " + std::to_string(m_));
  }
}

std::string Separator::serialize() const {
  if (!is_window_) return "clopen:" + clopen_.serialize();
  return "window:m=" + std::to_string(m_) + ";count=" + std::to_string(lo_) + ".." +
         std::to_string(hi_);
}

Separator Separator::parse(const std::string& text) {
  if (text.rfind("clopen:", 0) == 0) return clopen(Clopen::parse(text.substr(7)));
  if (text.rfind("window:m=", 0) == 0) {
    auto semi = text.find(";count=");
    if (semi == std::string::npos) throw std::invalid_argument("Separator::parse: missing count");
    std::size_t m = std::stoul(text.substr(9, semi - 9));
    std::string range = text.substr(semi + 7);
    auto dots = range.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("Separator::parse: malformed interval");
    return count_window(m, std::stoul(range.substr(0, dots)), std::stoul(range.substr(dots + 2)));
  }
  throw std::invalid_argument("Separator::parse: unknown shape");
}

// ---------------------------------------------------------------------------
// Covering

Covering::Covering(Family fam, Rat eps) : family_(std::move(fam)), eps_(std::move(eps)) {
  if (eps_ <= Rat(0)) throw std::invalid_argument("Covering: eps must be positive");
  radius_ = eps_ / Rat(4);
  if (family_.single_member()) {
    spacing_ = Rat(0);
    count_ = 1;
    return;
  }
  spacing_ = eps_ / (Rat(8) * family_.lipschitz());
  // Grid 0, spacing, 2*spacing, ..., clamped to end exactly at 1.
  Rat inv = Rat(1) / spacing_;
  Int steps = inv.num() / inv.den();
  if (Rat(steps, 1) * spacing_ < Rat(1)) steps += 1;
  if (!steps.fits_ulong_p()) throw std::length_error("Covering: grid too fine");
  count_ = steps.get_ui() + 1;
}

Rat Covering::param(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("Covering::param");
  if (family_.single_member()) return Rat(0);
  return min(Rat(static_cast<long>(i)) * spacing_, Rat(1));
}

Ball Covering::ball(std::size_t i) const {
  return Ball{family_.member(param(i)), radius_};
}

std::optional<std::size_t> Covering::covering_index(const Rat& p) const {
  if (family_.single_member()) return 0;
  // Nearest grid point; then certify with the Lipschitz upper bound.
  Rat q = p / spacing_;
  Int idx = (2 * q.num() + q.den()) / (2 * q.den());  // floor(q + 1/2)
  std::size_t i = idx.fits_ulong_p() ? std::min<std::size_t>(idx.get_ui(), count_ - 1) : count_ - 1;
  if (family_.lipschitz() * abs(p - param(i)) <= radius_) return i;
  return std::nullopt;
}

std::optional<std::size_t> Covering::contained_index(const Rat& p) const {
  if (family_.single_member()) return 0;
  auto i = covering_index(p);
  if (!i) return std::nullopt;
  // ball(member(p), eps) contains grid ball i when dist + radius <= eps.
  if (family_.lipschitz() * abs(p - param(*i)) + radius_ <= eps_) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Family

Family Family::bernoulli() { return Family("bernoulli", Rat(2)); }
Family Family::mu_p() { return Family("mu_p", Rat(2)); }
Family Family::mixture() { return Family("mixture", Rat(2)); }

Family Family::singleton(const Measure& m) {
  Family f("singleton:" + m.serialize(), Rat(1));
  f.singleton_ = m;
  return f;
}

Family Family::parse(const std::string& name) {
  if (name == "bernoulli") return bernoulli();
  if (name == "mu_p") return mu_p();
  if (name == "mixture") return mixture();
  if (name.rfind("singleton:", 0) == 0) return singleton(Measure::parse(name.substr(10)));
  throw std::invalid_argument("Family::parse: unknown family '" + name + "'");
}

std::string Family::serialize() const { return name_; }

Measure Family::member(const Rat& param) const {
  if (singleton_) {
    if (!param.is_zero()) throw std::domain_error("Family::member: singleton has only parameter 0");
    return *singleton_;
  }
  if (name_ == "bernoulli") return Measure::bernoulli(param);
  if (name_ == "mu_p") return Measure::mu_p(param);
  if (name_ == "mixture") return Measure::mixture(param);
  throw std::logic_error("Family::member: bad family");
}

std::optional<Rat> Family::param_of(const Measure& m) const {
  if (singleton_) return m == *singleton_ ? std::optional<Rat>(Rat(0)) : std::nullopt;
  const MeasureSpec& s = m.spec();
  if (name_ == "bernoulli" && s.kind == MeasureKind::bernoulli) return s.p;
  if (name_ == "mu_p" && s.kind == MeasureKind::mu_p) return s.p;
  if (name_ == "mixture" && s.kind == MeasureKind::mixture) return s.p;
  return std::nullopt;
}

Covering Family::cover(const Rat& eps) const { return Covering(*this, eps); }

bool Family::has_orthogonal_generator() const {
  return name_ == "bernoulli" || name_ == "mixture";
}

namespace {

// Certified membership of m in host (closed ball), escalating the truncation
// level a few times before giving up.
bool certify_in_host(const Measure& m, const Ball& host) {
  for (std::size_t prec : {10, 16, 24}) {
    Fit fit = host.contains(m, prec);
    if (fit == Fit::inside) return true;
    if (fit == Fit::outside) return false;
  }
  return false;
}

}  // namespace

OrthFamily Family::orthogonal(const Ball& host, std::size_t s, const Rat& delta,
                              std::optional<std::size_t> granularity_override) const {
  if (delta <= Rat(0) || Rat(1) < delta)
    throw std::invalid_argument("Family::orthogonal: delta outside (0,1]");
  if (s >= 24) throw HypothesisViolation("orthogonal family: 2^s member budget is absurd at s >= 24");

  if (s == 0) {
    // One member, separated by the full space with guarantee exactly 1.
    auto p = param_of(host.center);
    if (!p) throw HypothesisViolation("orthogonal family: host center is not a family member");
    return OrthFamily{host,
                      0,
                      delta,
                      {host.center},
                      {Separator::clopen(Clopen::full())},
                      {Rat(1)},
                      0};
  }
  if (name_ == "bernoulli") return orthogonal_bernoulli(host, s, delta, granularity_override);
  if (name_ == "mixture") return orthogonal_mixture(host, s, delta);
  throw HypothesisViolation("family '" + name_ + "' has no orthogonal-family generator");
}

OrthFamily Family::orthogonal_mixture(const Ball& host, std::size_t s, const Rat& delta) const {
  if (s > 1)
    throw HypothesisViolation(
        "mixture family: only two mutually separated members exist, cannot host 2^" +
        std::to_string(s));
  OrthFamily out{host,
                 s,
                 delta,
                 {member(Rat(1)), member(Rat(0))},  // all-zeros point, all-ones point
                 {Separator::clopen(Clopen::cylinder(Bits("0"))),
                  Separator::clopen(Clopen::cylinder(Bits("1")))},
                 {Rat(1), Rat(1)},
                 1};
  for (const Measure& m : out.members)
    if (!certify_in_host(m, host))
      throw HypothesisViolation("mixture family: member " + m.serialize() +
                                " not certified inside the host ball");
  return out;
}

OrthFamily Family::orthogonal_bernoulli(const Ball& host, std::size_t s, const Rat& delta,
                                        std::optional<std::size_t> granularity_override) const {
  auto center_param = param_of(host.center);
  if (!center_param)
    throw HypothesisViolation("orthogonal family: host center is not a Bernoulli member");
  // Parameters within radius/4 of the center have metric distance at most
  // radius/2 (kappa = 2), which certifies comfortably inside the host.
  const Rat quarter = host.radius / Rat(4);
  const Rat plo = max(Rat(0), *center_param - quarter);
  const Rat phi = min(Rat(1), *center_param + quarter);
  const Rat width = phi - plo;
  if (width <= Rat(0) || host.radius <= Rat(0))
    throw HypothesisViolation("orthogonal family: host ball hosts no parameter window");

  const std::size_t count = std::size_t{1} << s;
  std::vector<Rat> params;
  params.reserve(count);
  for (std::size_t j = 0; j < count; ++j)
    params.push_back(plo + Rat(static_cast<long>(2 * j + 1)) * width / Rat(static_cast<long>(2 * count)));

  const Rat needed = Rat(1) - delta / Rat(8);
  const std::size_t m_floor = 64;
  std::size_t m_start = m_floor;
  while (m_start < (std::size_t{1} << (2 * s)) && m_start < (std::size_t{1} << 18)) m_start <<= 1;

  std::vector<std::size_t> search;
  if (granularity_override) search = {*granularity_override};
  else
    for (std::size_t m = m_start; m <= (std::size_t{1} << 18); m <<= 1) search.push_back(m);

  for (std::size_t m : search) {
    // Window boundaries: the count axis cut at the parameter slab edges, with
    // the extreme windows extended to 0 and m to soak up the tails.
    std::vector<std::size_t> cuts;  // cuts[j] = first count of window j+1
    bool degenerate = false;
    for (std::size_t j = 1; j < count; ++j) {
      Rat t = plo + Rat(static_cast<long>(j)) * width / Rat(static_cast<long>(count));
      Rat scaled = Rat(static_cast<long>(m)) * t;
      Int cut = (scaled.num() + scaled.den() - 1) / scaled.den();  // ceil
      std::size_t c = cut.get_ui();
      if (!cuts.empty() && c <= cuts.back()) degenerate = true;
      if (c == 0 || c > m) degenerate = true;
      cuts.push_back(c);
    }
    if (degenerate) continue;

    std::vector<Separator> seps;
    std::vector<Rat> guarantees;
    bool ok = true;
    for (std::size_t j = 0; j < count && ok; ++j) {
      std::size_t lo = j == 0 ? 0 : cuts[j - 1];
      std::size_t hi = j + 1 == count ? m : cuts[j] - 1;
      Rat g = binomial_window_mass(m, params[j], lo, hi);
      if (g > needed) {
        seps.push_back(Separator::count_window(m, lo, hi));
        guarantees.push_back(std::move(g));
      } else {
        ok = false;
      }
    }
    if (!ok) continue;

    OrthFamily out{host, s, delta, {}, std::move(seps), std::move(guarantees), m};
    for (const Rat& p : params) out.members.push_back(member(p));
    for (const Measure& mem : out.members)
      if (!certify_in_host(mem, host))
        throw HypothesisViolation("orthogonal family: member " + mem.serialize() +
                                  " not certified inside the host ball");
    return out;
  }
  throw HypothesisViolation(
      "orthogonal family: no separator granularity up to 2^18 certifies 2^" + std::to_string(s) +
      " members in this host (family hypothesis violated at this scale)");
}

}  // namespace cantor
