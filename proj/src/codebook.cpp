#include "cantor/codebook.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace cantor {

namespace {

// Smallest t with 2^t >= x, for x >= 1.
unsigned long ceil_log2_ul(unsigned long x) {
  unsigned long t = 0;
  while ((1UL << t) < x) ++t;
  return t;
}

Int binom(std::size_t n, std::size_t k) {
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return out;
}

Rat rat_pow(const Rat& base, std::size_t e) {
  Int num, den;
  mpz_pow_ui(num.get_mpz_t(), base.num().get_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(den.get_mpz_t(), base.den().get_mpz_t(), static_cast<unsigned long>(e));
  return Rat(num, den);
}

std::string to_bit_string(Int v, unsigned long width) {
  std::string out(width, '0');
  for (unsigned long j = 0; j < width; ++j) {
    if (mpz_tstbit(v.get_mpz_t(), j)) out[width - 1 - j] = '1';
  }
  return out;
}

// Lexicographic rank of sigma among equal-length strings with the same
// ones-count ('0' sorts first).
Int class_rank(const Bits& sigma, std::size_t ones) {
  Int r(0);
  std::size_t o = ones;
  const std::size_t m = sigma.size();
  for (std::size_t i = 0; i < m && o > 0; ++i) {
    if (sigma.bit(i) == 1) {
      r += binom(m - i - 1, o);
      --o;
    }
  }
  return r;
}

Bits class_unrank(std::size_t length, std::size_t ones, Int j) {
  std::string s;
  s.reserve(length);
  std::size_t o = ones;
  for (std::size_t i = 0; i < length; ++i) {
    Int zeros_here = binom(length - i - 1, o);
    if (o > 0 && j >= zeros_here) {
      s += '1';
      j -= zeros_here;
      --o;
    } else {
      s += '0';
    }
  }
  return Bits(s);
}

// Exact Kraft mass of the entire literal namespace: the marker-plus-length
// layout sums to 2^-8 (the empty string) + sum_{t>=1} 2^{t-1} * 2^{-2t-8}.
const Rat kLiteralNamespaceMass = Rat(3, 512);

}  // namespace

unsigned long literal_cost(const Bits& sigma) {
  unsigned long len = sigma.size();
  return len + 2 * ceil_log2_ul(len + 1) + 8;
}

unsigned long header_bits(std::size_t i) {
  if (i == 0) throw std::domain_error("header_bits: registrations are 1-indexed");
  return 2 * ceil_log2_ul(static_cast<unsigned long>(i) + 1) + 1;
}

// ---------------------------------------------------------------------------
// RequestSet

RequestSet RequestSet::from_requests(std::vector<Request> reqs) {
  RequestSet out;
  out.requests_ = std::move(reqs);
  return out;
}

RequestSet RequestSet::from_classes(std::vector<ClassRequest> classes) {
  RequestSet out;
  out.classes_ = std::move(classes);
  return out;
}

Rat RequestSet::kraft_sum() const {
  Rat sum(0);
  for (const Request& r : requests_) sum += Rat::pow2(-static_cast<long>(r.weight));
  for (const ClassRequest& c : classes_)
    sum += Rat(binom(c.length, c.ones), 1) * Rat::pow2(-static_cast<long>(c.weight));
  return sum;
}

Int RequestSet::covered_count() const {
  Int n(static_cast<long>(requests_.size()));
  for (const ClassRequest& c : classes_) n += binom(c.length, c.ones);
  return n;
}

std::optional<unsigned long> RequestSet::weight_for(const Bits& sigma) const {
  std::optional<unsigned long> best;
  for (const Request& r : requests_)
    if (r.target == sigma && (!best || r.weight < *best)) best = r.weight;
  for (const ClassRequest& c : classes_)
    if (sigma.size() == c.length && sigma.ones() == c.ones && (!best || c.weight < *best))
      best = c.weight;
  return best;
}

// ---------------------------------------------------------------------------
// Lemma-1 request sets

long request_scale_for_clopen(const Clopen& c, const Measure& mu, const Rat& r, std::size_t n) {
  if (c.granularity() > n)
    throw std::invalid_argument("request_scale_for_clopen: granularity exceeds n");
  Rat total = mu.mass(c) + Rat::pow2(2 * static_cast<long>(n)) * r;
  if (total.is_zero())
    throw std::domain_error("request_scale_for_clopen: mass plus slack is zero, no scale");
  return floor_neg_log2(total);
}

RequestSet request_set_for_clopen(const Clopen& c, const Measure& mu, const Rat& r,
                                  std::size_t n) {
  RequestSet out;
  if (c.is_empty()) return out;
  const long m = request_scale_for_clopen(c, mu, r, n);
  for (const Bits& atom : c.atoms()) {
    Rat a = mu.cylinder(atom) + Rat::pow2(static_cast<long>(atom.size())) * r;
    if (a.is_zero()) continue;  // uncodable: infinite weight, infinite deficiency
    long w = ceil_neg_log2(a) - m;
    if (w < 0) throw std::logic_error("request_set_for_clopen: negative weight");
    out.add(Request{atom, static_cast<unsigned long>(w)});
  }
  return out;
}

namespace {

// Shared skeleton of the window builders: walks the per-count atom masses
// p^k q^(M-k) across the window, calling fn(k, atom_mass).
template <typename Fn>
void for_window_counts(const Separator& v, const Rat& p, Fn&& fn) {
  const std::size_t m = v.granularity();
  const std::size_t lo = v.window_lo(), hi = v.window_hi();
  const Rat q = Rat(1) - p;
  if (p.is_zero() || q.is_zero()) {
    for (std::size_t k = lo; k <= hi; ++k) {
      bool live = (p.is_zero() && k == 0) || (q.is_zero() && k == m);
      fn(k, Rat(live ? 1 : 0));
    }
    return;
  }
  Rat mass = rat_pow(p, lo) * rat_pow(q, m - lo);
  for (std::size_t k = lo; k <= hi; ++k) {
    fn(k, mass);
    if (k < hi) mass = mass * p / q;
  }
}

Rat window_total(const Separator& v, const Measure& mu, const Rat& r) {
  const std::size_t m = v.granularity();
  Int count(0);
  for (std::size_t k = v.window_lo(); k <= v.window_hi(); ++k) count += binom(m, k);
  return binomial_window_mass(m, mu.spec().p, v.window_lo(), v.window_hi()) +
         Rat(count, 1) * Rat::pow2(static_cast<long>(m)) * r;
}

void check_window_args(const Separator& v, const Measure& mu) {
  if (!v.is_count_window())
    throw std::invalid_argument("window request set: separator is not a count window");
  if (mu.spec().kind != MeasureKind::bernoulli)
    throw std::invalid_argument(
        "window request set: only i.i.d. Bernoulli centers have closed class masses");
}

}  // namespace

long request_scale_for_window(const Separator& v, const Measure& mu, const Rat& r) {
  check_window_args(v, mu);
  Rat total = window_total(v, mu, r);
  if (total.is_zero())
    throw std::domain_error("request_scale_for_window: mass plus slack is zero, no scale");
  return floor_neg_log2(total);
}

RequestSet request_set_for_window(const Separator& v, const Measure& mu, const Rat& r) {
  check_window_args(v, mu);
  RequestSet out;
  const long m = request_scale_for_window(v, mu, r);
  const Rat slack = Rat::pow2(static_cast<long>(v.granularity())) * r;
  for_window_counts(v, mu.spec().p, [&](std::size_t k, const Rat& mass) {
    Rat a = mass + slack;
    if (a.is_zero()) return;
    long w = ceil_neg_log2(a) - m;
    if (w < 0) throw std::logic_error("request_set_for_window: negative weight");
    out.add(ClassRequest{v.granularity(), k, static_cast<unsigned long>(w)});
  });
  return out;
}

RequestSet run_length_requests(std::size_t max_len) {
  RequestSet out;
  for (std::size_t k = 1; k <= max_len; ++k) {
    unsigned long w = 2 * ceil_log2_ul(static_cast<unsigned long>(k) + 1) + 1;
    out.add(Request{Bits(std::string(k, '0')), w});
    out.add(Request{Bits(std::string(k, '1')), w});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Codebook

std::string Codebook::tag(std::size_t i) {
  unsigned long t = ceil_log2_ul(static_cast<unsigned long>(i) + 1);
  Int offset(static_cast<long>(i) - (1L << (t - 1)));
  return "1" + std::string(t - 1, '1') + "0" + to_bit_string(offset, t);
}

std::size_t Codebook::register_set(RequestSet r, std::string context) {
  Rat ks = r.kraft_sum();
  if (ks > Rat(1))
    throw std::invalid_argument("Codebook::register_set: Kraft sum exceeds 1");
  const std::size_t index = sets_.size() + 1;

  Entry entry;
  entry.ctx = std::move(context);
  for (const Request& req : r.requests()) {
    Allocation a;
    a.weight = req.weight;
    a.count = 1;
    a.is_class = false;
    a.target = req.target;
    entry.allocs.push_back(std::move(a));
    auto it = entry.explicit_weights.find(req.target);
    if (it == entry.explicit_weights.end() || req.weight < it->second)
      entry.explicit_weights[req.target] = req.weight;
  }
  for (const ClassRequest& cls : r.classes()) {
    Allocation a;
    a.weight = cls.weight;
    a.count = binom(cls.length, cls.ones);
    a.is_class = true;
    a.cls = cls;
    entry.allocs.push_back(std::move(a));
  }
  // Kraft-Chaitin allocation: ascending weights keep the cursor aligned to
  // every dyadic grid it hands out intervals on.
  std::stable_sort(entry.allocs.begin(), entry.allocs.end(),
                   [](const Allocation& x, const Allocation& y) { return x.weight < y.weight; });
  Rat cursor(0);
  for (Allocation& a : entry.allocs) {
    Rat scaled = cursor * Rat::pow2(static_cast<long>(a.weight));
    if (!scaled.is_integer())
      throw std::logic_error("Codebook: allocation cursor misaligned");
    a.start = scaled.num();
    cursor += Rat(a.count, 1) * Rat::pow2(-static_cast<long>(a.weight));
  }
  if (cursor != ks) throw std::logic_error("Codebook: allocation does not match Kraft sum");

  entry.set = std::move(r);
  sets_.push_back(std::move(entry));
  tagged_mass_ += Rat::pow2(-static_cast<long>(header_bits(index))) * ks;
  if (global_kraft() > Rat(1))
    throw std::logic_error("Codebook: global Kraft budget exceeded");
  return index;
}

const RequestSet& Codebook::request_set(std::size_t i) const {
  if (i == 0 || i > sets_.size()) throw std::out_of_range("Codebook::request_set");
  return sets_[i - 1].set;
}

const std::string& Codebook::context(std::size_t i) const {
  if (i == 0 || i > sets_.size()) throw std::out_of_range("Codebook::context");
  return sets_[i - 1].ctx;
}

unsigned long Codebook::k_hat(const Bits& sigma) const {
  unsigned long best = literal_cost(sigma);
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    const Entry& e = sets_[i];
    unsigned long hdr = header_bits(i + 1);
    auto it = e.explicit_weights.find(sigma);
    if (it != e.explicit_weights.end()) best = std::min(best, it->second + hdr);
    for (const ClassRequest& c : e.set.classes())
      if (sigma.size() == c.length && sigma.ones() == c.ones)
        best = std::min(best, c.weight + hdr);
  }
  return best;
}

Rat Codebook::global_kraft() const { return kLiteralNamespaceMass + tagged_mass_; }

namespace {

std::string literal_code(const Bits& sigma) {
  const unsigned long len = sigma.size();
  const unsigned long t = ceil_log2_ul(len + 1);
  std::string out(7, '0');
  out += std::string(t, '1');
  out += '0';
  if (t > 0) out += to_bit_string(Int(static_cast<long>(len) - (1L << (t - 1))), t);
  out += sigma.str();
  return out;
}

}  // namespace

std::string Codebook::code_for(const Bits& sigma) const {
  unsigned long best = literal_cost(sigma);
  std::size_t best_reg = 0;
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    auto w = sets_[i].set.weight_for(sigma);
    if (w && *w + header_bits(i + 1) < best) {
      best = *w + header_bits(i + 1);
      best_reg = i + 1;
    }
  }
  if (best_reg == 0) return literal_code(sigma);
  const Entry& e = sets_[best_reg - 1];
  const unsigned long w = best - header_bits(best_reg);
  for (const Allocation& a : e.allocs) {
    if (a.weight != w) continue;
    if (!a.is_class && a.target == sigma)
      return tag(best_reg) + to_bit_string(a.start, w);
    if (a.is_class && sigma.size() == a.cls.length && sigma.ones() == a.cls.ones)
      return tag(best_reg) + to_bit_string(a.start + class_rank(sigma, a.cls.ones), w);
  }
  throw std::logic_error("Codebook::code_for: allocation lookup failed");
}

std::optional<Bits> Codebook::decode(const std::string& code) const {
  if (code.empty()) return std::nullopt;
  std::size_t pos = 0;
  auto read_ones = [&]() {
    std::size_t n = 0;
    while (pos < code.size() && code[pos] == '1') ++n, ++pos;
    return n;
  };
  auto read_value = [&](std::size_t width) -> std::optional<Int> {
    if (pos + width > code.size()) return std::nullopt;
    Int v(0);
    for (std::size_t j = 0; j < width; ++j) {
      v <<= 1;
      if (code[pos + j] == '1') v += 1;
      else if (code[pos + j] != '0') return std::nullopt;
    }
    pos += width;
    return v;
  };

  if (code[0] == '0') {
    if (code.size() < 8 || code.compare(0, 7, "0000000") != 0) return std::nullopt;
    pos = 7;
    std::size_t t = read_ones();
    if (pos >= code.size() || code[pos] != '0') return std::nullopt;
    ++pos;
    unsigned long len = 0;
    if (t > 0) {
      auto off = read_value(t);
      if (!off) return std::nullopt;
      len = (1UL << (t - 1)) + off->get_ui();
    }
    if (code.size() - pos != len) return std::nullopt;
    return Bits(code.substr(pos));
  }

  pos = 1;
  std::size_t t = read_ones() + 1;
  if (pos >= code.size() || code[pos] != '0') return std::nullopt;
  ++pos;
  auto off = read_value(t);
  if (!off) return std::nullopt;
  std::size_t index = (std::size_t{1} << (t - 1)) + off->get_ui();
  if (index == 0 || index > sets_.size()) return std::nullopt;
  const Entry& e = sets_[index - 1];
  const std::string rest = code.substr(pos);
  for (const Allocation& a : e.allocs) {
    if (rest.size() != a.weight) continue;
    Int v(0);
    for (char ch : rest) {
      v <<= 1;
      if (ch == '1') v += 1;
      else if (ch != '0') return std::nullopt;
    }
    if (v < a.start || v >= a.start + a.count) continue;
    if (!a.is_class) return a.target;
    return class_unrank(a.cls.length, a.cls.ones, v - a.start);
  }
  return std::nullopt;
}

std::vector<std::pair<std::string, Bits>> Codebook::emitted_codes(
    const std::vector<Bits>& extra_literals) const {
  std::vector<std::pair<std::string, Bits>> out;
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    for (const Allocation& a : sets_[i].allocs) {
      if (!a.is_class) {
        out.emplace_back(tag(i + 1) + to_bit_string(a.start, a.weight), a.target);
      } else if (a.count <= 64) {
        for (Int j(0); j < a.count; j += 1)
          out.emplace_back(tag(i + 1) + to_bit_string(a.start + j, a.weight),
                           class_unrank(a.cls.length, a.cls.ones, j));
      }
    }
  }
  for (const Bits& sigma : extra_literals) out.emplace_back(literal_code(sigma), sigma);
  return out;
}

// ---------------------------------------------------------------------------
// Deficiency surrogates

DeficiencyValue ed_hat(const Bits& sigma, const Ball& b, const Codebook& book) {
  MeasureWalker walker(b.center);
  bool have = false;
  long best = 0;
  for (std::size_t k = 0; k <= sigma.size(); ++k) {
    Rat a = walker.prob() + Rat::pow2(static_cast<long>(k)) * b.radius;
    if (a.is_zero()) return DeficiencyValue{true, Rat(0)};
    long term = floor_neg_log2(a) - static_cast<long>(book.k_hat(sigma.prefix(k)));
    if (!have || term > best) best = term, have = true;
    if (k < sigma.size()) walker.step(sigma.bit(k));
  }
  return DeficiencyValue{false, Rat(best)};
}

DeficiencyValue d_hat(const Bits& sigma, const Measure& mu, const Codebook& book) {
  return ed_hat(sigma, Ball{mu, Rat(0)}, book);
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

std::string cert_context(const Separator& support, const Ball& b, std::size_t n) {
  return support.serialize() + "|center=" + b.center.serialize() + "|radius=" +
         b.radius.str() + "|n=" + std::to_string(n);
}

[[noreturn]] void cert_fail(const std::string& what) {
  throw std::logic_error("lemma1_certificate: " + what);
}

}  // namespace

Certificate lemma1_certificate(const Separator& support, const Ball& b, std::size_t n,
                               Codebook& book) {
  Certificate cert{support,
                   b,
                   support.is_count_window() ? support.granularity() : n,
                   0,
                   0,
                   0,
                   Rat(0),
                   0,
                   false,
                   cert_context(support, b, n),
                   {},
                   {}};

  if (support.is_count_window()) {
    RequestSet set;
    try {
      cert.m = request_scale_for_window(support, b.center, b.radius);
      set = request_set_for_window(support, b.center, b.radius);
    } catch (const std::domain_error&) {
      cert.vacuous = true;
    }
    if (!cert.vacuous) {
      cert.kraft = set.kraft_sum();
      cert.registration = book.register_set(set, cert.context);
      cert.header = header_bits(cert.registration);
      const Rat slack = Rat::pow2(static_cast<long>(support.granularity())) * b.radius;
      bool first = true;
      const RequestSet& reg = book.request_set(cert.registration);
      std::size_t next_class = 0;
      for_window_counts(support, b.center.spec().p, [&](std::size_t k, const Rat& mass) {
        Rat a = mass + slack;
        if (a.is_zero()) return;
        if (next_class >= reg.classes().size() || reg.classes()[next_class].ones != k)
          cert_fail("window class list out of step");
        const ClassRequest& cls = reg.classes()[next_class++];
        long class_bound =
            floor_neg_log2(a) - static_cast<long>(cls.weight + cert.header);
        bool direct = support.granularity() <= 64;
        if (direct) {
          Bits rep = class_unrank(cls.length, cls.ones, Int(0));
          if (!ed_hat(rep, b, book).at_least(Rat(class_bound)))
            cert_fail("class representative fails its certified bound");
        }
        cert.classes.push_back(
            Certificate::ClassRow{cls, binom(cls.length, cls.ones), class_bound, direct});
        if (first || class_bound < cert.bound) cert.bound = class_bound, first = false;
      });
      if (first) cert_fail("window certificate registered but no live class");
    } else if (support.granularity() <= 64) {
      // No codable class: every member must show infinite deficiency.
      for (std::size_t k = support.window_lo(); k <= support.window_hi(); ++k) {
        Bits rep = class_unrank(support.granularity(), k, Int(0));
        if (!ed_hat(rep, b, book).infinite)
          cert_fail("vacuous window certificate has a finite-deficiency member");
      }
    }
    return cert;
  }

  const Clopen& c = support.clopen_set();
  std::vector<Bits> atoms = c.atoms();
  if (atoms.empty()) {
    cert.vacuous = true;
    return cert;
  }
  RequestSet set;
  try {
    cert.m = request_scale_for_clopen(c, b.center, b.radius, n);
    set = request_set_for_clopen(c, b.center, b.radius, n);
  } catch (const std::domain_error&) {
    cert.vacuous = true;
  }
  if (!cert.vacuous) {
    cert.kraft = set.kraft_sum();
    cert.registration = book.register_set(set, cert.context);
    cert.header = header_bits(cert.registration);
  }
  bool first = true;
  for (const Bits& atom : atoms) {
    Certificate::AtomRow row{atom, false, 0, {}};
    Rat a = b.center.cylinder(atom) +
            Rat::pow2(static_cast<long>(atom.size())) * b.radius;
    if (!a.is_zero()) {
      if (cert.vacuous) cert_fail("codable atom inside a vacuous certificate");
      auto w = set.weight_for(atom);
      if (!w) cert_fail("codable atom missing from its request set");
      row.coded = true;
      row.weight = *w;
      long atom_bound = floor_neg_log2(a) - static_cast<long>(*w + cert.header);
      if (first || atom_bound < cert.bound) cert.bound = atom_bound, first = false;
    }
    row.ed = ed_hat(atom, b, book);
    cert.atoms.push_back(std::move(row));
  }
  if (cert.vacuous) {
    for (const auto& row : cert.atoms)
      if (!row.ed.infinite) cert_fail("vacuous certificate has a finite-deficiency atom");
    return cert;
  }
  if (first) cert_fail("certificate registered but no codable atom");
  for (const auto& row : cert.atoms)
    if (!row.ed.at_least(Rat(cert.bound)))
      cert_fail("atom " + row.sigma.str() + " fails the certified bound");
  return cert;
}

Certificate lemma1_certificate(const Clopen& c, const Ball& b, std::size_t n, Codebook& book) {
  return lemma1_certificate(Separator::clopen(c), b, n, book);
}

std::string Certificate::serialize() const {
  nlohmann::ordered_json j;
  j["context"] = context;
  j["support"] = support.serialize();
  j["ball"] = {{"center", ball.center.serialize()}, {"radius", ball.radius.str()}};
  j["granularity"] = granularity;
  j["m"] = m;
  j["registration"] = registration;
  j["header_bits"] = header;
  j["kraft_sum"] = kraft.str();
  j["bound"] = bound;
  j["vacuous"] = vacuous;
  j["atoms"] = nlohmann::ordered_json::array();
  for (const AtomRow& row : atoms) {
    nlohmann::ordered_json a;
    a["sigma"] = row.sigma.str();
    if (row.coded) a["weight"] = row.weight;
    else a["weight"] = nullptr;
    if (row.ed.infinite) a["ed_hat"] = "inf";
    else a["ed_hat"] = static_cast<long>(row.ed.value.num().get_si());
    j["atoms"].push_back(std::move(a));
  }
  j["classes"] = nlohmann::ordered_json::array();
  for (const ClassRow& row : classes) {
    nlohmann::ordered_json cj;
    cj["length"] = row.cls.length;
    cj["ones"] = row.cls.ones;
    cj["weight"] = row.cls.weight;
    cj["count"] = row.count.get_str();
    cj["bound"] = row.bound;
    cj["direct"] = row.direct;
    j["classes"].push_back(std::move(cj));
  }
  return j.dump();
}

}  // namespace cantor
