#include "cantor/harness.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "cantor/clopen.hpp"
#include "cantor/errors.hpp"
#include "cantor/family.hpp"

namespace cantor {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kEnvironmentStamp =
    "cantor-lab 1.0 (c++20, exact rational arithmetic via gmp)";
// Truncation level for certified ball membership in the bc-proxy. Radius-0
// balls around distinct rationals of desk-scale height resolve far earlier.
constexpr std::size_t kContainPrecision = 48;

// MSB-first bit stream over mt19937_64 outputs.
class BitSource {
 public:
  explicit BitSource(std::uint64_t seed) : gen_(seed) {}
  int next() {
    if (left_ == 0) {
      word_ = gen_();
      left_ = 64;
    }
    --left_;
    return static_cast<int>((word_ >> left_) & 1u);
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t word_ = 0;
  int left_ = 0;
};

Codebook make_codebook(const std::string& spec) {
  Codebook book;
  if (spec == "empty") return book;
  constexpr const char* kRunLength = "run-length:";
  if (spec.rfind(kRunLength, 0) == 0) {
    std::size_t max_len = std::stoul(spec.substr(std::string(kRunLength).size()));
    book.register_set(run_length_requests(max_len), spec);
    return book;
  }
  throw std::invalid_argument("unknown codebook spec '" + spec + "'");
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) {
  // The splitmix stream at position `index`, startable from any trial
  // without touching the others (the counter scheme behind parallel trials).
  std::uint64_t state = base + index * 0x9e3779b97f4a7c15ULL;
  return splitmix64(state);
}

SampledBits sample_sequence_audited(const Measure& mu, std::size_t n, std::uint64_t seed) {
  BitSource source(seed);
  MeasureWalker walker(mu);
  SampledBits out;
  Bits prefix;
  for (std::size_t k = 0; k < n; ++k) {
    if (walker.prob().is_zero())
      throw std::logic_error("sample_sequence: entered a zero-mass prefix");
    const Rat q = walker.conditional_one();
    int bit;
    std::size_t used = 0;
    if (q.is_zero()) {
      bit = 0;
    } else if (q == Rat(1)) {
      bit = 1;
    } else {
      // Compare a lazily drawn uniform x = 0.b1 b2 ... against q digit by
      // digit; the emitted bit is 1 exactly when x < q. Each round doubles
      // the remaining fraction of q to expose its next binary digit.
      Rat frac = q;
      for (;;) {
        frac = frac * Rat(2);
        int digit = 0;
        if (!(frac < Rat(1))) {
          digit = 1;
          frac = frac - Rat(1);
        }
        int drawn = source.next();
        ++used;
        if (drawn != digit) {
          bit = drawn < digit ? 1 : 0;
          break;
        }
      }
    }
    walker.step(bit);
    prefix = prefix.append(bit);
    out.generator_bits.push_back(used);
  }
  out.bits = std::move(prefix);
  return out;
}

Bits sample_sequence(const Measure& mu, std::size_t n, std::uint64_t seed) {
  return sample_sequence_audited(mu, n, seed).bits;
}

Measure trial_target(const Measure& mu, const Bits& sample) {
  const MeasureSpec& spec = mu.spec();
  if (spec.kind == MeasureKind::mixture && spec.p > Rat(0) && spec.p < Rat(1) &&
      sample.size() >= 1) {
    // A proper two-point mixture has disjoint component supports after one
    // bit, so the posterior collapses to the sampled component exactly.
    return Measure::mixture(sample.bit(0) == 0 ? Rat(1) : Rat(0));
  }
  return mu;
}

Rat empirical_success(const Learner& a, const Measure& mu, const EmpiricalParams& params) {
  if (params.trials == 0)
    throw std::invalid_argument("empirical_success: trials must be positive");
  if (params.horizon == 0)
    throw std::invalid_argument("empirical_success: horizon must be positive");
  const Codebook book = make_codebook(params.codebook);
  std::size_t wins = 0;
  for (std::size_t t = 0; t < params.trials; ++t) {
    const Bits x = sample_sequence(mu, params.horizon, trial_seed(params.seed, t));
    const LearnerTrace trace = run_learner(a, x, params.budget);
    if (trace.emitted.empty()) continue;
    const Ball& last = trace.emitted.back().first;
    if (params.criterion == SuccessCriterion::bc_proxy) {
      if (last.radius < params.tolerance &&
          last.contains(trial_target(mu, x), kContainPrecision) == Fit::inside)
        ++wins;
    } else {
      const DeficiencyValue v = d_hat(x, last.center, book);
      if (!v.infinite && v.value <= Rat(params.bd_bound)) ++wins;
    }
  }
  return Rat(static_cast<long>(wins), static_cast<long>(params.trials));
}

// ---------------------------------------------------------------------------
// Configs and reports

std::string ExperimentConfig::serialize() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["kind"] = kind;
  j["family"] = family;
  j["learner"] = learner;
  j["target"] = target;
  j["delta"] = delta.str();
  j["base"] = ordered_json{{"center", base_center}, {"radius", base_radius.str()}};
  j["n"] = n;
  j["n_max"] = n_max;
  j["budget"] = budget;
  j["d"] = d;
  j["s_override"] = s_override ? ordered_json(*s_override) : ordered_json(nullptr);
  j["threshold"] = threshold ? ordered_json(*threshold) : ordered_json(nullptr);
  j["granularity_override"] =
      granularity_override ? ordered_json(*granularity_override) : ordered_json(nullptr);
  j["family_host"] = host_center ? ordered_json{{"center", *host_center},
                                                {"radius", host_radius->str()}}
                                 : ordered_json(nullptr);
  j["eta"] = eta.str();
  j["trials"] = trials;
  j["horizon"] = horizon;
  j["criterion"] = criterion;
  j["tolerance"] = tolerance.str();
  j["codebook"] = codebook;
  j["seed"] = seed;
  j["output"] = output;
  return j.dump();
}

ExperimentConfig ExperimentConfig::parse(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config parse: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config parse: top level must be an object");

  ExperimentConfig c;
  auto bad = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument("config parse at '" + key + "': " + why);
  };
  auto rat_field = [&](const ordered_json& v, const std::string& key) {
    if (!v.is_string()) bad(key, "expected a rational \"num/den\" string");
    return Rat::parse(v.get<std::string>());
  };
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const ordered_json& v = it.value();
    try {
      if (key == "scenario") c.scenario = v.get<std::string>();
      else if (key == "kind") c.kind = v.get<std::string>();
      else if (key == "family") c.family = v.get<std::string>();
      else if (key == "learner") c.learner = v.get<std::string>();
      else if (key == "target") c.target = v.get<std::string>();
      else if (key == "delta") c.delta = rat_field(v, key);
      else if (key == "base") {
        c.base_center = v.at("center").get<std::string>();
        c.base_radius = rat_field(v.at("radius"), key);
      } else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "n_max") c.n_max = v.get<std::size_t>();
      else if (key == "budget") c.budget = v.get<std::size_t>();
      else if (key == "d") c.d = v.get<std::size_t>();
      else if (key == "s_override") {
        if (!v.is_null()) c.s_override = v.get<std::size_t>();
      } else if (key == "threshold") {
        if (!v.is_null()) c.threshold = v.get<long>();
      } else if (key == "granularity_override") {
        if (!v.is_null()) c.granularity_override = v.get<std::size_t>();
      } else if (key == "family_host") {
        if (!v.is_null()) {
          c.host_center = v.at("center").get<std::string>();
          c.host_radius = rat_field(v.at("radius"), key);
        }
      } else if (key == "eta") c.eta = rat_field(v, key);
      else if (key == "trials") c.trials = v.get<std::size_t>();
      else if (key == "horizon") c.horizon = v.get<std::size_t>();
      else if (key == "criterion") c.criterion = v.get<std::string>();
      else if (key == "tolerance") c.tolerance = rat_field(v, key);
      else if (key == "codebook") c.codebook = v.get<std::string>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "output") c.output = v.get<std::string>();
      else bad(key, "unknown field");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      bad(key, e.what());
    }
  }
  if (c.kind != "empirical" && c.kind != "stage" && c.kind != "amplify" && c.kind != "diagonal")
    bad("kind", "must be one of empirical | stage | amplify | diagonal");
  if (c.host_center.has_value() != c.host_radius.has_value())
    bad("family_host", "center and radius must be given together");
  return c;
}

Ball ExperimentConfig::base_ball() const {
  return Ball{Measure::parse(base_center), base_radius};
}

AdversaryParams ExperimentConfig::adversary_params() const {
  AdversaryParams p;
  p.n_max = n_max;
  p.budget = budget;
  p.s_override = s_override;
  p.d = d;
  p.threshold = threshold;
  p.granularity_override = granularity_override;
  if (host_center) p.family_host = Ball{Measure::parse(*host_center), *host_radius};
  return p;
}

EmpiricalParams ExperimentConfig::empirical_params() const {
  EmpiricalParams p;
  p.trials = trials;
  p.horizon = horizon;
  p.budget = budget;
  p.tolerance = tolerance;
  p.codebook = codebook;
  p.seed = seed;
  if (criterion == "bc-proxy") {
    p.criterion = SuccessCriterion::bc_proxy;
  } else if (criterion.rfind("bd-proxy:", 0) == 0) {
    p.criterion = SuccessCriterion::bd_proxy;
    p.bd_bound = std::stol(criterion.substr(9));
  } else {
    throw std::invalid_argument("config parse at 'criterion': unknown criterion '" + criterion +
                                "'");
  }
  return p;
}

std::string Report::serialize() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["kind"] = kind;
  j["config"] = ordered_json::parse(config);
  j["environment"] = environment;
  j["results"] = ordered_json::parse(results);
  j["valid"] = valid;
  return j.dump();
}

Report run_experiment(const ExperimentConfig& config) {
  Report rep;
  rep.scenario = config.scenario;
  rep.kind = config.kind;
  rep.config = config.serialize();
  rep.environment = kEnvironmentStamp;

  ordered_json results;
  if (config.kind == "empirical") {
    const Learner a = Learner::parse(config.learner);
    const Measure mu = Measure::parse(config.target);
    const Rat success = empirical_success(a, mu, config.empirical_params());
    results["criterion"] = config.criterion;
    results["trials"] = config.trials;
    results["horizon"] = config.horizon;
    results["budget"] = config.budget;
    results["tolerance"] = config.tolerance.str();
    results["codebook"] = config.codebook;
    results["success"] = success.str();
    results["success_decimal"] = success.decimal();  // advisory rendering only
  } else if (config.kind == "stage") {
    const Family fam = Family::parse(config.family);
    const Learner a = Learner::parse(config.learner);
    const AdversaryParams params = config.adversary_params();
    const Schedule sched = build_schedule(fam, config.delta, config.n, config.base_ball(), params);
    Codebook book;
    const StageResult res = find_inconsistency(a, sched, config.eta, book, params);
    results["signal"] = res.signal == StageSignal::dense
                            ? "dense"
                            : res.signal == StageSignal::sparse ? "sparse" : "inconclusive";
    results["note"] = res.note;
    results["prec"] = res.prec.serialize();
    results["null"] = res.null_cells.serialize();
    results["report"] = res.report ? ordered_json::parse(res.report->to_json(config.scenario))
                                   : ordered_json(nullptr);
  } else if (config.kind == "amplify") {
    const Family fam = Family::parse(config.family);
    const Learner a = Learner::parse(config.learner);
    const AmplifyOutcome out = amplify(a, fam, config.base_ball(), config.n, config.eta,
                                       config.delta, config.adversary_params());
    results["branch"] = out.branch == AmplifyBranch::stage_witness
                            ? "stage-witness"
                            : out.branch == AmplifyBranch::null_amplified ? "null-amplified"
                                                                          : "inconclusive";
    results["stage"] = out.stage;
    results["eta"] = out.eta.str();
    results["succ_bound"] = out.succ_bound.str();
    results["learner_after"] = out.learner.serialize();
    results["refined"] = ordered_json{{"center", out.refined.center.serialize()},
                                      {"radius", out.refined.radius.str()}};
    ordered_json sampled = ordered_json::array();
    for (const Rat& m : out.sampled_null) sampled.push_back(m.str());
    results["sampled_null"] = std::move(sampled);
    results["report"] = out.report ? ordered_json::parse(out.report->to_json(config.scenario))
                                   : ordered_json(nullptr);
  } else if (config.kind == "diagonal") {
    const Family fam = Family::parse(config.family);
    const Learner a = Learner::parse(config.learner);
    const DiagonalReport diag =
        diagonalize(a, fam, config.delta, config.base_ball(), config.adversary_params());
    results = ordered_json::parse(diag.to_json(config.scenario));
  } else {
    throw std::invalid_argument("run_experiment: unknown kind '" + config.kind + "'");
  }
  rep.results = results.dump();

  Report draft = rep;
  draft.valid = false;
  rep.valid = validate_report(draft.serialize()).ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Validation: re-derive every exact claim from the report text alone.

namespace {

struct ValidationFailure {
  std::string msg;
};

void vcheck(bool cond, const std::string& msg) {
  if (!cond) throw ValidationFailure{msg};
}

const ordered_json& field(const ordered_json& j, const char* key, const char* where) {
  auto it = j.find(key);
  vcheck(it != j.end(), std::string(where) + ": missing field '" + key + "'");
  return *it;
}

Rat vrat(const ordered_json& v, const std::string& what) {
  vcheck(v.is_string(), what + ": expected a rational string");
  try {
    return Rat::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ValidationFailure{what + ": " + e.what()};
  }
}

// What a validated stage object hands back to its caller for cross-checks.
struct StageEcho {
  Rat succ;
  std::string member;
  std::size_t stage = 0;
  std::size_t separator_granularity = 0;
};

StageEcho validate_stage(const ordered_json& r, const ExperimentConfig& cfg,
                         const std::string& expected_learner, const Rat& expected_eta) {
  for (const char* key : {"scenario", "verdict", "stage", "covering", "family", "pigeonhole",
                          "masses", "succ_upper_bound", "succ_upper_bound_with_null",
                          "certificates", "config"})
    field(r, key, "stage report");
  vcheck(r["scenario"] == cfg.scenario, "stage report: scenario mismatch");

  const std::size_t n = r["stage"].get<std::size_t>();
  const ordered_json& fj = r["family"];
  const ordered_json& cj = r["config"];
  const Rat delta = vrat(field(cj, "delta", "stage config"), "stage delta");
  vcheck(delta == cfg.delta, "stage report: delta disagrees with the config echo");
  const Rat eta = vrat(field(cj, "eta", "stage config"), "stage eta");
  vcheck(eta == expected_eta, "stage report: eta disagrees with the round chain");
  vcheck(field(cj, "learner", "stage config") == expected_learner,
         "stage report: learner disagrees with the round chain");
  vcheck(field(cj, "budget", "stage config").get<std::size_t>() == cfg.budget,
         "stage report: budget mismatch");
  const std::size_t s = field(fj, "s", "family block").get<std::size_t>();
  vcheck(s <= 24, "stage report: implausible separation depth");
  const std::size_t L = field(fj, "M", "family block").get<std::size_t>();
  vcheck(field(cj, "L", "stage config").get<std::size_t>() == L,
         "stage report: separator granularity echo mismatch");
  const long tau = field(cj, "threshold", "stage config").get<long>();
  vcheck(tau == (cfg.threshold ? *cfg.threshold : static_cast<long>(n)),
         "stage report: threshold mismatch");
  const Rat f = vrat(field(cj, "f", "stage config"), "stage f");
  vcheck(f == Rat::pow2(-static_cast<long>(L + s)), "stage report: f(n) recomputation failed");

  // Family checks: separators parse, are pairwise disjoint, and the exact
  // member guarantees recompute.
  const Family fam = Family::parse(cfg.family);
  const std::size_t count = static_cast<std::size_t>(1) << s;
  const ordered_json& params = field(fj, "params", "family block");
  const ordered_json& seps_json = field(fj, "separators", "family block");
  const ordered_json& guars = field(fj, "guarantees", "family block");
  vcheck(params.size() == count && seps_json.size() == count && guars.size() == count,
         "stage report: family arrays disagree with 2^s");
  std::vector<Separator> seps;
  std::vector<Measure> members;
  for (std::size_t k = 0; k < count; ++k) {
    seps.push_back(Separator::parse(seps_json[k].get<std::string>()));
    members.push_back(fam.member(Rat::parse(params[k].get<std::string>())));
    vcheck(vrat(guars[k], "guarantee") == seps[k].mass(members[k]),
           "stage report: guarantee recomputation failed");
    vcheck(vrat(guars[k], "guarantee") > Rat(1) - delta / Rat(8),
           "stage report: guarantee below 1 - delta/8");
  }
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = a + 1; b < count; ++b)
      vcheck(seps[a].disjoint_with(seps[b]), "stage report: separators are not disjoint");

  const std::string host_center = cfg.host_center ? *cfg.host_center : cfg.base_center;
  const Rat host_radius = cfg.host_center ? *cfg.host_radius : cfg.base_radius;
  const ordered_json& host = field(fj, "host", "family block");
  vcheck(host["center"] == host_center && vrat(host["radius"], "host radius") == host_radius,
         "stage report: family host mismatch");

  // Covering recomputation plus the density inequality at the chosen index
  // (and the failure of every earlier index, which pins determinism).
  const Rat eps = min(Rat::pow2(-static_cast<long>(n)) * delta / Rat(4), cfg.base_radius);
  const Covering covering = Family::parse(cfg.family).cover(eps);
  const ordered_json& cov = r["covering"];
  const std::size_t ci = field(cov, "index", "covering block").get<std::size_t>();
  vcheck(ci < covering.size(), "stage report: covering index out of range");
  vcheck(cov["center"] == covering.ball(ci).center.serialize(),
         "stage report: covering center recomputation failed");
  vcheck(vrat(cov["radius"], "covering radius") == covering.radius(),
         "stage report: covering radius recomputation failed");
  const Clopen prec = Clopen::parse(field(cj, "prec", "stage config").get<std::string>());
  const Clopen nul = Clopen::parse(field(cj, "null", "stage config").get<std::string>());
  const Rat bar = Rat(1) - eta - Rat(3) * delta / Rat(4);
  const Rat shift = Rat::pow2(static_cast<long>(n)) * covering.radius();
  vcheck(covering.ball(ci).center.mass(prec) - shift > bar,
         "stage report: density inequality fails at the chosen covering ball");
  for (std::size_t i = 0; i < ci; ++i)
    vcheck(!(covering.ball(i).center.mass(prec) - shift > bar),
           "stage report: covering index is not the first dense ball");

  // Pigeonhole recomputation over the emitted centers.
  const ordered_json& certs = r["certificates"];
  vcheck(certs.is_array() && !certs.empty(), "stage report: no certificates");
  std::vector<Measure> centers;
  for (const auto& e : certs) centers.push_back(Measure::parse(e["center"].get<std::string>()));
  std::vector<Rat> avg;
  for (std::size_t k = 0; k < count; ++k) {
    Rat sum(0);
    for (const Measure& c : centers) sum += seps[k].mass(c);
    avg.push_back(sum / Rat(static_cast<long>(centers.size())));
  }
  std::size_t argmin = 0;
  for (std::size_t k = 1; k < count; ++k)
    if (avg[k] < avg[argmin]) argmin = k;
  const ordered_json& pj = r["pigeonhole"];
  const std::size_t sel = field(pj, "j", "pigeonhole block").get<std::size_t>();
  vcheck(sel == argmin, "stage report: pigeonhole index is not the first minimiser");
  vcheck(vrat(pj["beta"], "beta") == avg[sel], "stage report: beta recomputation failed");
  vcheck(avg[sel] <= Rat::pow2(-static_cast<long>(s)), "stage report: beta exceeds 2^-s");
  const Measure xi = members[sel];
  vcheck(pj["member"] == xi.serialize(), "stage report: pigeonhole member mismatch");

  // Certificates: bit-for-bit replay against a fresh codebook, flag
  // recomputation, and the inconsistent-mass accumulation.
  Codebook replay_book;
  Rat inconsistent(0);
  std::vector<Bits> all_sources;
  for (const auto& e : certs) {
    const Rat radius = vrat(field(e, "radius", "certificate entry"), "emitted radius");
    vcheck(radius < f, "stage report: emitted radius does not clear the precision demand");
    const Ball ball{Measure::parse(e["center"].get<std::string>()), radius};
    const ordered_json& c = field(e, "certificate", "certificate entry");
    vcheck(c.is_object(), "stage report: certificate must be an object");
    vcheck(Separator::parse(c["support"].get<std::string>()) == seps[sel],
           "stage report: certificate support is not the selected separator");
    // Count-window supports are certified at the window width, clopen
    // supports at the stage depth.
    const std::size_t expect_g = seps[sel].is_count_window() ? seps[sel].granularity() : n;
    vcheck(c["granularity"].get<std::size_t>() == expect_g,
           "stage report: certificate granularity mismatch");
    vcheck(vrat(c["kraft_sum"], "kraft sum") <= Rat(1), "stage report: Kraft sum exceeds 1");
    const Certificate replayed = lemma1_certificate(seps[sel], ball, n, replay_book);
    vcheck(replayed.serialize() == c.dump(), "stage report: certificate replay mismatch");
    const bool inc = replayed.vacuous || replayed.bound > tau;
    vcheck(e["inconsistent"].get<bool>() == inc,
           "stage report: inconsistency flag disagrees with its certificate");
    const ordered_json& sources = field(e, "sources", "certificate entry");
    vcheck(sources.is_array() && !sources.empty(), "stage report: certificate without sources");
    for (const auto& src : sources) {
      Bits sigma(src.get<std::string>());
      vcheck(sigma.size() == n, "stage report: source string of wrong length");
      all_sources.push_back(sigma);
      if (inc) inconsistent += seps[sel].prefix_mass(xi, sigma);
    }
  }
  std::vector<Bits> sorted = all_sources;
  std::sort(sorted.begin(), sorted.end());
  vcheck(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
         "stage report: duplicated source string");
  vcheck(Clopen::from_cylinders(all_sources) == prec,
         "stage report: sources do not reproduce the precision set");

  // Mass accounting.
  const ordered_json& mj = r["masses"];
  const Rat prec_mass = vrat(field(mj, "prec", "masses"), "prec mass");
  const Rat null_mass = vrat(field(mj, "null", "masses"), "null mass");
  const Rat inc_mass = vrat(field(mj, "inconsistent", "masses"), "inconsistent mass");
  vcheck(prec_mass == xi.mass(prec), "stage report: prec mass recomputation failed");
  vcheck(null_mass == xi.mass(nul), "stage report: null mass recomputation failed");
  vcheck(inc_mass == inconsistent, "stage report: inconsistent mass recomputation failed");
  vcheck(inc_mass <= prec_mass, "stage report: inconsistent mass exceeds prec mass");
  vcheck(prec_mass + null_mass <= Rat(1), "stage report: prec and null masses overlap");
  const Rat succ = vrat(r["succ_upper_bound"], "success bound");
  vcheck(succ == Rat(1) - inc_mass, "stage report: success bound arithmetic failed");
  vcheck(vrat(r["succ_upper_bound_with_null"], "combined bound") == succ - null_mass,
         "stage report: combined bound arithmetic failed");
  vcheck(r["verdict"] == (succ < delta ? "stage-witness" : "inconclusive"),
         "stage report: verdict disagrees with the success bound");

  return StageEcho{succ, xi.serialize(), n, L};
}

void validate_empirical(const ordered_json& results, const ExperimentConfig& cfg) {
  for (const char* key :
       {"criterion", "trials", "horizon", "budget", "tolerance", "codebook", "success"})
    field(results, key, "empirical results");
  vcheck(results["criterion"] == cfg.criterion, "empirical results: criterion echo mismatch");
  vcheck(results["trials"].get<std::size_t>() == cfg.trials,
         "empirical results: trials echo mismatch");
  vcheck(results["horizon"].get<std::size_t>() == cfg.horizon,
         "empirical results: horizon echo mismatch");
  vcheck(results["budget"].get<std::size_t>() == cfg.budget,
         "empirical results: budget echo mismatch");
  vcheck(vrat(results["tolerance"], "tolerance") == cfg.tolerance,
         "empirical results: tolerance echo mismatch");
  vcheck(results["codebook"] == cfg.codebook, "empirical results: codebook echo mismatch");
  const Rat success = vrat(results["success"], "success fraction");
  vcheck(success >= Rat(0) && success <= Rat(1), "empirical results: success outside [0, 1]");
  vcheck((success * Rat(static_cast<long>(cfg.trials))).is_integer(),
         "empirical results: success is not a fraction of the trial count");
  cfg.empirical_params();  // criterion string must parse
}

void validate_stage_kind(const ordered_json& results, const ExperimentConfig& cfg) {
  for (const char* key : {"signal", "note", "prec", "null", "report"})
    field(results, key, "stage results");
  const std::string signal = results["signal"].get<std::string>();
  if (signal == "dense") {
    vcheck(results["report"].is_object(), "stage results: dense signal without a report");
    const StageEcho echo = validate_stage(results["report"], cfg, cfg.learner, cfg.eta);
    vcheck(echo.stage == cfg.n, "stage results: report stage disagrees with the config");
    vcheck(results["prec"] == results["report"]["config"]["prec"],
           "stage results: prec echo mismatch");
    vcheck(results["null"] == results["report"]["config"]["null"],
           "stage results: null echo mismatch");
  } else if (signal == "sparse") {
    vcheck(results["report"].is_null(), "stage results: sparse signal carries a report");
    Clopen::parse(results["prec"].get<std::string>());
    Clopen::parse(results["null"].get<std::string>());
  } else if (signal == "inconclusive") {
    vcheck(results["report"].is_null(), "stage results: inconclusive signal carries a report");
    vcheck(cfg.budget == 0, "stage results: inconclusive signal with a positive budget");
  } else {
    vcheck(false, "stage results: unknown signal '" + signal + "'");
  }
}

void validate_amplify(const ordered_json& results, const ExperimentConfig& cfg) {
  for (const char* key :
       {"branch", "stage", "eta", "succ_bound", "learner_after", "refined", "sampled_null",
        "report"})
    field(results, key, "amplify results");
  const std::string branch = results["branch"].get<std::string>();
  const Rat eta_after = vrat(results["eta"], "eta");
  const std::size_t stage = results["stage"].get<std::size_t>();
  if (branch == "null-amplified") {
    vcheck(stage == cfg.n + 1, "amplify results: null branch must decide at stage N+1");
    vcheck(eta_after == cfg.eta + cfg.delta / Rat(2),
           "amplify results: eta does not advance by delta/2");
    const std::string after = results["learner_after"].get<std::string>();
    vcheck(after.rfind("wrap(f=2^-(1*n+", 0) == 0 &&
               after.size() > cfg.learner.size() + 1 &&
               after.compare(after.size() - cfg.learner.size() - 1, cfg.learner.size(),
                             cfg.learner) == 0,
           "amplify results: wrapped learner does not carry the inner learner");
    Learner::parse(after);
    vcheck(results["report"].is_null(), "amplify results: null branch carries a report");
    const ordered_json& sampled = results["sampled_null"];
    vcheck(sampled.is_array() && !sampled.empty(),
           "amplify results: null branch without sampled masses");
    for (const auto& m : sampled)
      vcheck(vrat(m, "sampled null mass") > eta_after,
             "amplify results: sampled member misses the amplified nullity");
    vcheck(results["refined"]["center"] == cfg.base_center &&
               vrat(results["refined"]["radius"], "refined radius") == cfg.base_radius,
           "amplify results: null branch must keep the base ball");
  } else if (branch == "stage-witness") {
    vcheck(stage == cfg.n + 1, "amplify results: witness branch must decide at stage N+1");
    vcheck(eta_after == cfg.eta, "amplify results: witness branch must not move eta");
    vcheck(results["report"].is_object(), "amplify results: witness branch without a report");
    const StageEcho echo = validate_stage(results["report"], cfg, cfg.learner, cfg.eta);
    vcheck(vrat(results["succ_bound"], "succ bound") == echo.succ,
           "amplify results: succ bound disagrees with the stage report");
    vcheck(results["refined"]["center"] == echo.member,
           "amplify results: witness ball is not centered on the pigeonhole member");
    const Rat radius = vrat(results["refined"]["radius"], "witness radius");
    const Rat margin = cfg.delta - echo.succ;  // inconsistent - (1 - delta)
    if (margin > Rat(0)) {
      const std::size_t g = std::max(echo.stage, echo.separator_granularity);
      vcheck(radius >= Rat(0) && radius <= margin * Rat::pow2(-static_cast<long>(g + 1)),
             "amplify results: witness radius exceeds its margin scale");
    } else {
      vcheck(radius == Rat(0), "amplify results: nonpositive margin demands a radius of 0");
    }
  } else if (branch == "inconclusive") {
    vcheck(results["report"].is_null(), "amplify results: inconclusive branch carries a report");
    vcheck(eta_after == cfg.eta, "amplify results: inconclusive branch must not move eta");
  } else {
    vcheck(false, "amplify results: unknown branch '" + branch + "'");
  }
}

void validate_diagonal(const ordered_json& results, const ExperimentConfig& cfg) {
  for (const char* key : {"kind", "delta", "rounds_cap", "verdict", "final_eta", "final_ball",
                          "candidate", "final_learner", "rounds"})
    field(results, key, "diagonal results");
  vcheck(results["kind"] == "diagonal", "diagonal results: kind mismatch");
  vcheck(vrat(results["delta"], "delta") == cfg.delta, "diagonal results: delta echo mismatch");
  const Int cap_div = (Int(2) * cfg.delta.den() + cfg.delta.num() - 1) / cfg.delta.num();
  const std::size_t cap = static_cast<std::size_t>(cap_div.get_ui()) + 1;
  vcheck(results["rounds_cap"].get<std::size_t>() == cap,
         "diagonal results: rounds cap recomputation failed");
  const ordered_json& rounds = results["rounds"];
  vcheck(rounds.is_array() && rounds.size() <= cap, "diagonal results: too many rounds");

  Rat eta(0);
  std::string learner = cfg.learner;
  std::size_t stage = 0;
  std::string verdict = "inconclusive";
  std::string final_center = cfg.base_center;
  for (std::size_t i = 0; i < rounds.size(); ++i) {
    const ordered_json& round = rounds[i];
    vcheck(round["round"].get<std::size_t>() == i + 1, "diagonal results: round numbering");
    const std::string branch = round["branch"].get<std::string>();
    const bool last = i + 1 == rounds.size();
    if (branch == "null-amplified") {
      vcheck(round["stage"].get<std::size_t>() == stage + 1,
             "diagonal results: stages must climb one per round");
      stage = round["stage"].get<std::size_t>();
      eta = eta + cfg.delta / Rat(2);
      vcheck(vrat(round["eta_after"], "round eta") == eta,
             "diagonal results: eta chain recomputation failed");
      const std::string after = round["learner_after"].get<std::string>();
      vcheck(after.rfind("wrap(f=2^-(1*n+", 0) == 0 &&
                 after.size() > learner.size() + 1 &&
                 after.compare(after.size() - learner.size() - 1, learner.size(), learner) == 0,
             "diagonal results: round learner does not wrap the previous one");
      Learner::parse(after);
      learner = after;
      vcheck(round["report"].is_null(), "diagonal results: null round carries a report");
      if (eta > Rat(1) - cfg.delta) {
        vcheck(last, "diagonal results: rounds continue past nullity overflow");
        verdict = "nullity-overflow";
      }
    } else if (branch == "stage-witness") {
      vcheck(last, "diagonal results: witness rounds are terminal");
      vcheck(round["stage"].get<std::size_t>() == stage + 1,
             "diagonal results: stages must climb one per round");
      vcheck(vrat(round["eta_after"], "round eta") == eta,
             "diagonal results: witness round must not move eta");
      vcheck(round["report"].is_object(), "diagonal results: witness round without a report");
      const StageEcho echo = validate_stage(round["report"], cfg, learner, eta);
      vcheck(echo.stage == stage + 1, "diagonal results: report stage mismatch");
      vcheck(vrat(round["succ_bound"], "round succ") == echo.succ,
             "diagonal results: round success bound mismatch");
      verdict = echo.succ < cfg.delta ? "stage-witness" : "inconclusive";
      final_center = echo.member;
    } else if (branch == "inconclusive") {
      vcheck(last, "diagonal results: inconclusive rounds are terminal");
      vcheck(round["report"].is_null(), "diagonal results: inconclusive round with a report");
      verdict = "inconclusive";
    } else {
      vcheck(false, "diagonal results: unknown branch '" + branch + "'");
    }
  }
  vcheck(results["verdict"] == verdict, "diagonal results: verdict recomputation failed");
  vcheck(vrat(results["final_eta"], "final eta") == eta,
         "diagonal results: final eta recomputation failed");
  vcheck(results["final_learner"] == learner,
         "diagonal results: final learner recomputation failed");
  const ordered_json& fb = results["final_ball"];
  vcheck(fb.is_object(), "diagonal results: missing final ball");
  vcheck(fb["center"] == final_center, "diagonal results: final ball center mismatch");
  vcheck(results["candidate"] == fb["center"],
         "diagonal results: candidate is not the final ball center");
}

}  // namespace

ValidationResult validate_report(const std::string& report_json) {
  ValidationResult res;
  try {
    ordered_json j;
    try {
      j = ordered_json::parse(report_json);
    } catch (const std::exception& e) {
      throw ValidationFailure{std::string("report is not valid JSON: ") + e.what()};
    }
    for (const char* key : {"scenario", "kind", "config", "environment", "results", "valid"})
      field(j, key, "report");
    vcheck(j["environment"].is_string() && !j["environment"].get<std::string>().empty(),
           "report: empty environment stamp");
    const ExperimentConfig cfg = ExperimentConfig::parse(j["config"].dump());
    vcheck(cfg.serialize() == j["config"].dump(), "report: config echo is not canonical");
    vcheck(cfg.scenario == j["scenario"], "report: scenario disagrees with the config echo");
    vcheck(cfg.kind == j["kind"], "report: kind disagrees with the config echo");
    const ordered_json& results = j["results"];
    vcheck(results.is_object(), "report: results must be an object");
    if (cfg.kind == "empirical") validate_empirical(results, cfg);
    else if (cfg.kind == "stage") validate_stage_kind(results, cfg);
    else if (cfg.kind == "amplify") validate_amplify(results, cfg);
    else validate_diagonal(results, cfg);
  } catch (const ValidationFailure& f) {
    res.ok = false;
    res.diagnostics.push_back(f.msg);
  } catch (const std::exception& e) {
    res.ok = false;
    res.diagnostics.push_back(std::string("validation error: ") + e.what());
  }
  return res;
}

}  // namespace cantor
