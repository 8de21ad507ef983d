#pragma once

// Scenario plumbing: exact sequence sampling, finite success proxies for
// positive learners, experiment dispatch from JSON configs, and report
// validation. Everything numeric in a report is an exact rational rendered
// as "num/den"; reports are byte-identical across runs of the same config.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cantor/adversary.hpp"
#include "cantor/bits.hpp"
#include "cantor/codebook.hpp"
#include "cantor/learner.hpp"
#include "cantor/measure.hpp"
#include "cantor/rat.hpp"

namespace cantor {

// Standard splittable 64-bit mixer; advances `state` and returns one output.
std::uint64_t splitmix64(std::uint64_t& state);
// Independent per-trial seed derived from a base seed and a trial counter.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index);

struct SampledBits {
  Bits bits;
  // Generator bits consumed per emitted bit (the comparison transcript).
  std::vector<std::size_t> generator_bits;
};

// Draws an n-bit prefix whose bit k is 1 with the exact conditional
// probability mu(sigma 1)/mu(sigma): the seeded generator's bit stream is a
// lazily extended binary expansion compared digit-by-digit against the exact
// rational threshold, so no rounding ever occurs and zero-mass prefixes are
// never entered.
SampledBits sample_sequence_audited(const Measure& mu, std::size_t n, std::uint64_t seed);
Bits sample_sequence(const Measure& mu, std::size_t n, std::uint64_t seed);

enum class SuccessCriterion { bc_proxy, bd_proxy };

struct EmpiricalParams {
  std::size_t trials = 100;
  std::size_t horizon = 64;
  std::size_t budget = 16;  // learner steps per run
  SuccessCriterion criterion = SuccessCriterion::bc_proxy;
  long bd_bound = 0;                 // the N of bd-proxy(N)
  Rat tolerance = Rat::pow2(-20);    // bc-proxy demand on the final radius
  std::string codebook = "empty";    // "empty" | "run-length:<max>"
  std::uint64_t seed = 0;
};

// The measure a trial is judged against: the sampled sequence's conditional
// law within mu. Memoryless kinds return mu itself; a proper two-point
// mixture collapses to the sampled component after its first bit.
Measure trial_target(const Measure& mu, const Bits& sample);

// Fraction of trials (exact) on which the learner's run on the sampled
// horizon-length prefix meets the criterion: bc-proxy means the final
// emitted ball certifiably contains the trial target with radius below the
// tolerance; bd-proxy(N) means the estimated deficiency of the prefix
// against the final emitted ball stays at most N. Both are finite stand-ins
// for in-the-limit notions and say so in reports.
Rat empirical_success(const Learner& a, const Measure& mu, const EmpiricalParams& params);

struct ExperimentConfig {
  std::string scenario;
  std::string kind;  // "empirical" | "stage" | "amplify" | "diagonal"
  std::string family = "bernoulli";
  std::string learner = "always_null";
  std::string target = "bernoulli:p=1/2";  // sampled measure (empirical kind)
  Rat delta = Rat(1, 2);
  std::string base_center = "bernoulli:p=1/2";
  Rat base_radius = Rat(2);
  std::size_t n = 1;  // stage granularity (stage kind) / stage floor N (amplify kind)
  std::size_t n_max = 8;
  std::size_t budget = 8;
  std::size_t d = 8;
  std::optional<std::size_t> s_override;
  std::optional<long> threshold;
  std::optional<std::size_t> granularity_override;
  std::optional<std::string> host_center;  // family host override
  std::optional<Rat> host_radius;
  Rat eta = Rat(0);  // certified nullity entering a stage
  std::size_t trials = 100;
  std::size_t horizon = 64;
  std::string criterion = "bc-proxy";  // "bc-proxy" | "bd-proxy:<N>"
  Rat tolerance = Rat::pow2(-20);
  std::string codebook = "empty";
  std::uint64_t seed = 20260814;
  std::string output;  // suggested report path; empty means stdout

  std::string serialize() const;
  static ExperimentConfig parse(const std::string& json_text);

  Ball base_ball() const;
  AdversaryParams adversary_params() const;
  EmpiricalParams empirical_params() const;

  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.serialize() == b.serialize();
  }
};

struct Report {
  std::string scenario;
  std::string kind;
  std::string config;       // serialized config echo
  std::string environment;  // deterministic arithmetic/version stamp
  std::string results;      // kind-specific JSON object
  bool valid = false;       // validation outcome stamped at production time

  std::string serialize() const;
};

// Dispatches on config.kind, runs the scenario, validates the produced
// report, and stamps the outcome. Deterministic given the config.
Report run_experiment(const ExperimentConfig& config);

struct ValidationResult {
  bool ok = true;
  std::vector<std::string> diagnostics;
};

// Re-derives every exact claim a report makes from the report text alone:
// schema shape, config echo round-trip, separator disjointness and
// guarantees, pigeonhole average and its 2^-s bound, mass accounting,
// certificate replay (bit-for-bit), precision recomputation, and the
// verdict arithmetic of diagonal rounds. Returns false with diagnostics on
// the first tampered or inconsistent field.
ValidationResult validate_report(const std::string& report_json);

}  // namespace cantor
