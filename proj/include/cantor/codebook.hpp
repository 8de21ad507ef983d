#pragma once

// Computable stand-ins for prefix-free complexity: explicit codebooks built
// from Kraft bounded request sets. Everything here is an upper bound — the
// codebook can always exhibit a working prefix-free code of the claimed
// length, so k_hat dominates the true prefix complexity up to one fixed
// machine constant that never enters any computation.
//
// Request sets come in two shapes, mirroring separators:
//   * explicit targets (bit string, weight);
//   * count classes (every length-M string with exactly k ones shares one
//     weight) whose member count is a binomial coefficient — these make the
//     huge-granularity window certificates representable without enumerating
//     an astronomical atom list.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cantor/bits.hpp"
#include "cantor/family.hpp"
#include "cantor/measure.hpp"
#include "cantor/rat.hpp"

namespace cantor {

// Cost of spelling a string out raw: |sigma| + 2 ceil(log2(|sigma|+1)) + 8.
unsigned long literal_cost(const Bits& sigma);
// Self-delimiting tag cost of registration i (1-indexed): 2 ceil(log2(i+1)) + 1.
unsigned long header_bits(std::size_t i);

struct Request {
  Bits target;
  unsigned long weight = 0;
  friend bool operator==(const Request&, const Request&) = default;
};

// All length-`length` strings with exactly `ones` ones, at a shared weight.
struct ClassRequest {
  std::size_t length = 0;
  std::size_t ones = 0;
  unsigned long weight = 0;
  friend bool operator==(const ClassRequest&, const ClassRequest&) = default;
};

class RequestSet {
 public:
  RequestSet() = default;
  static RequestSet from_requests(std::vector<Request> reqs);
  static RequestSet from_classes(std::vector<ClassRequest> classes);

  void add(Request r) { requests_.push_back(std::move(r)); }
  void add(ClassRequest c) { classes_.push_back(std::move(c)); }

  const std::vector<Request>& requests() const { return requests_; }
  const std::vector<ClassRequest>& classes() const { return classes_; }
  bool empty() const { return requests_.empty() && classes_.empty(); }

  // Exact sum of 2^-weight over every covered string (class entries count
  // binomially many strings).
  Rat kraft_sum() const;
  // Number of covered strings, exact.
  Int covered_count() const;
  // Smallest weight this set assigns to sigma, if any entry covers it.
  std::optional<unsigned long> weight_for(const Bits& sigma) const;

 private:
  std::vector<Request> requests_;
  std::vector<ClassRequest> classes_;
};

inline Rat kraft_sum(const RequestSet& r) { return r.kraft_sum(); }

// The Lemma-1 request set of a clopen set against a radius-r ball center at
// working granularity n: m = floor(-log2(mu(C) + 4^n r)), one request per
// canonical atom sigma_i at weight ceil(-log2(mu([sigma_i]) + 2^|sigma_i| r)) - m.
// Atoms whose mass-plus-slack vanishes are unencodable (infinite weight) and
// are omitted; their deficiency is infinite, so every bound still holds.
RequestSet request_set_for_clopen(const Clopen& c, const Measure& mu, const Rat& r,
                                  std::size_t n);

// Count-window variant: one class per ones-count, weights from the same
// formula, and m from the exact total mu(V) + |V| 2^M r (the explicit-variant
// bound 4^M r would be astronomically loose at window granularities).
// Only i.i.d. Bernoulli centers have the closed per-class masses this needs.
RequestSet request_set_for_window(const Separator& v, const Measure& mu, const Rat& r);

// m = floor(-log2(total mass + slack)) for each variant above; exposed so
// certificates can report it. Throws std::domain_error if the argument is 0.
long request_scale_for_clopen(const Clopen& c, const Measure& mu, const Rat& r, std::size_t n);
long request_scale_for_window(const Separator& v, const Measure& mu, const Rat& r);

// Runs 0^k and 1^k for 1 <= k <= max_len at weight 2 ceil(log2(k+1)) + 1; the
// full infinite family has Kraft sum below 1, so any truncation does too.
RequestSet run_length_requests(std::size_t max_len);

class Codebook {
 public:
  // Registers a request set (Kraft sum must be <= 1) and returns its 1-based
  // registration index. Codes for the set live behind a tag of
  // header_bits(index) bits, so k_hat(target) <= weight + header.
  std::size_t register_set(RequestSet r, std::string context);

  std::size_t registrations() const { return sets_.size(); }
  const RequestSet& request_set(std::size_t i) const;  // 1-based
  const std::string& context(std::size_t i) const;     // 1-based

  // min(literal cost, best registered weight + its header).
  unsigned long k_hat(const Bits& sigma) const;

  // Exact global Kraft mass of every code this book can emit: the literal
  // namespace total (3/512) plus the tagged registration masses. Always <= 1
  // by construction; verified after every registration.
  Rat global_kraft() const;

  // The concrete prefix-free code behind a k_hat claim. Literal codes always
  // exist; registered codes exist whenever some registration covers sigma.
  // Returns the shortest available code.
  std::string code_for(const Bits& sigma) const;
  // Inverse of code_for over complete codes.
  std::optional<Bits> decode(const std::string& code) const;

  // Every code of every explicit request, plus the literal codes of the given
  // extra targets — grist for exhaustive pairwise prefix-freeness checks.
  std::vector<std::pair<std::string, Bits>> emitted_codes(
      const std::vector<Bits>& extra_literals = {}) const;

 private:
  struct Allocation {
    // Dyadic interval [start 2^-weight, (start+count) 2^-weight) of the
    // registration's code space; explicit entries have count 1.
    unsigned long weight = 0;
    Int start;
    Int count;
    bool is_class = false;
    Bits target;               // explicit
    ClassRequest cls;          // class
  };
  struct Entry {
    RequestSet set;
    std::string ctx;
    std::vector<Allocation> allocs;
    std::map<Bits, unsigned long> explicit_weights;
  };
  static std::string tag(std::size_t i);
  std::vector<Entry> sets_;
  Rat tagged_mass_ = Rat(0);
};

inline unsigned long k_hat(const Codebook& book, const Bits& sigma) { return book.k_hat(sigma); }

// Deficiency surrogates are integers, with +infinity for impossible
// observations (a prefix of mass 0 under a radius-0 ball).
struct DeficiencyValue {
  bool infinite = false;
  Rat value;

  bool at_least(const Rat& bound) const { return infinite || value >= bound; }
  friend bool operator==(const DeficiencyValue&, const DeficiencyValue&) = default;
};

// max over k <= |sigma| of floor(-log2(mu([sigma restricted to k]) + 2^k r)) - k_hat.
DeficiencyValue ed_hat(const Bits& sigma, const Ball& b, const Codebook& book);
// ed_hat against the radius-0 ball at mu.
DeficiencyValue d_hat(const Bits& sigma, const Measure& mu, const Codebook& book);

// An executable deficiency lemma: registering C's request set forces, for
// every atom sigma of C and every measure in the ball, a deficiency of at
// least `bound` — verified here by direct ed_hat evaluation (atom-by-atom for
// explicit sets, class-by-class through the shared granularity-M term for
// windows).
struct Certificate {
  struct AtomRow {
    Bits sigma;
    bool coded = false;        // false: zero mass+slack, infinite deficiency
    unsigned long weight = 0;
    DeficiencyValue ed;
  };
  struct ClassRow {
    ClassRequest cls;
    Int count;
    long bound = 0;            // granularity-level term shared by the class
    bool direct = false;       // representative re-checked by full ed_hat
  };

  Separator support;
  Ball ball;
  std::size_t granularity = 0;
  long m = 0;
  std::size_t registration = 0;
  unsigned long header = 0;
  Rat kraft;
  long bound = 0;          // certified per-atom deficiency lower bound
  bool vacuous = false;    // true when the support carries no codable atom
  std::string context;
  std::vector<AtomRow> atoms;
  std::vector<ClassRow> classes;

  std::string serialize() const;  // JSON object text
};

Certificate lemma1_certificate(const Separator& support, const Ball& b, std::size_t n,
                               Codebook& book);
Certificate lemma1_certificate(const Clopen& c, const Ball& b, std::size_t n, Codebook& book);

}  // namespace cantor
