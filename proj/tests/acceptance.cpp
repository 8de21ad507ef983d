// Acceptance gate: ten independent end-to-end checks, one PASS/FAIL line
// each. Every inequality is exact rational arithmetic; randomized checks run
// from fixed seeds so the binary is deterministic. Where a check needs an
// expected value, it is recomputed here by a separate route (brute-force
// enumeration, direct binomial summation, a string-by-string learner sweep)
// rather than read back from the code under test. Exit status is the number
// of failed checks.

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cantor/adversary.hpp"
#include "cantor/bits.hpp"
#include "cantor/clopen.hpp"
#include "cantor/codebook.hpp"
#include "cantor/family.hpp"
#include "cantor/harness.hpp"
#include "cantor/learner.hpp"
#include "cantor/measure.hpp"
#include "cantor/rat.hpp"

namespace {

using namespace cantor;
using nlohmann::ordered_json;

struct check_failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw check_failure(what);
}

std::string scenario_path(const std::string& name) {
  return std::string(CANTOR_SOURCE_DIR) + "/scenarios/" + name + ".cfg";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Rat rat_pow(Rat base, std::size_t e) {
  Rat acc(1);
  while (e) {
    if (e & 1) acc *= base;
    base *= base;
    e >>= 1;
  }
  return acc;
}

// Exact binomial window mass sum_{k=lo}^{hi} C(M,k) p^k (1-p)^(M-k),
// summed term by term. This is the oracle the separator checks compare
// against; it shares no code with Separator::mass.
Rat window_mass(std::size_t M, std::size_t lo, std::size_t hi, const Rat& p) {
  const Rat q = Rat(1) - p;
  Rat total(0);
  for (std::size_t k = lo; k <= hi; ++k) {
    Int binom;
    mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(M),
                 static_cast<unsigned long>(k));
    total += Rat(binom, Int(1)) * rat_pow(p, k) * rat_pow(q, M - k);
  }
  return total;
}

Rat random_param(std::mt19937_64& rng) {
  const long d = static_cast<long>(rng() % 64) + 1;
  const long k = static_cast<long>(rng() % static_cast<unsigned long>(d + 1));
  return Rat(k, d);
}

// The three non-atomic product-style kinds; used for the metric axioms.
Measure random_product_measure(std::mt19937_64& rng) {
  switch (rng() % 3) {
    case 0: return Measure::bernoulli(random_param(rng));
    case 1: return Measure::mu_p(random_param(rng));
    default: return Measure::mixture(random_param(rng));
  }
}

// All five kinds; used for the certificate suite.
Measure random_any_measure(std::mt19937_64& rng) {
  switch (rng() % 5) {
    case 0: return Measure::bernoulli(random_param(rng));
    case 1: return Measure::mu_p(random_param(rng));
    case 2: return Measure::mixture(random_param(rng));
    case 3:
      return Measure::markov(random_param(rng), random_param(rng), random_param(rng));
    default: {
      const std::size_t len = rng() % 7;
      std::string s;
      for (std::size_t i = 0; i < len; ++i) s += (rng() & 1) ? '1' : '0';
      return Measure::point_mass(Bits(s));
    }
  }
}

// Brute-force level-n metric: max of a(C) - b(C) over all 2^(2^n) unions of
// level-n cylinders, from raw cylinder masses. Only feasible for tiny n,
// which is exactly where it serves as the oracle.
Rat brute_rho(const Measure& a, const Measure& b, std::size_t n) {
  std::vector<Rat> diff;
  for (const Bits& t : Bits::all_of_length(n)) diff.push_back(a.cylinder(t) - b.cylinder(t));
  Rat best(0);
  const std::size_t masks = std::size_t{1} << diff.size();
  for (std::size_t mask = 0; mask < masks; ++mask) {
    Rat sum(0);
    for (std::size_t i = 0; i < diff.size(); ++i)
      if (mask >> i & 1) sum += diff[i];
    if (best < sum) best = sum;
  }
  return best;
}

// 1. Metric axioms on 200 random pairs and 200 random triples, enclosure
//    widths, and agreement with the brute-force maximum at coarse levels.
void criterion_metric_axioms() {
  std::mt19937_64 rng(0x6d65747269633031ULL);
  for (int trial = 0; trial < 200; ++trial) {
    const Measure a = random_product_measure(rng);
    const Measure b = random_product_measure(rng);
    Rat prev(0);
    for (std::size_t n = 0; n <= 8; ++n) {
      const Rat ab = rho_n(a, b, n);
      require(ab == rho_n(b, a, n), "level metric must be symmetric");
      require(prev <= ab, "level metric must be monotone in the level");
      require(ab <= Rat(1), "level metric must stay within [0,1]");
      if (n <= 3)
        require(ab == brute_rho(a, b, n),
                "level metric must equal the brute-force clopen maximum");
      prev = ab;
    }
    for (std::size_t M = 0; M <= 6; ++M) {
      const Interval iv = rho_interval(a, b, M);
      require(Rat(0) <= iv.lo && iv.lo <= iv.hi, "metric enclosure must be ordered");
      require(iv.width() <= Rat::pow2(-static_cast<long>(M)),
              "metric enclosure width must be at most 2^-M");
    }
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Measure a = random_product_measure(rng);
    const Measure b = random_product_measure(rng);
    const Measure c = random_product_measure(rng);
    for (std::size_t n = 0; n <= 8; ++n)
      require(rho_n(a, c, n) <= rho_n(a, b, n) + rho_n(b, c, n),
              "level metric must satisfy the triangle inequality");
  }
}

// 2. Hand-checked metric values.
void criterion_pinned_values() {
  const Measure half = Measure::bernoulli(Rat(1, 2));
  const Measure quarter = Measure::bernoulli(Rat(1, 4));
  require(rho_n(half, quarter, 1) == Rat(1, 4),
          "level-1 distance of Ber(1/2) and Ber(1/4) must be 1/4");
  require(rho_n(half, quarter, 2) == Rat(5, 16),
          "level-2 distance of Ber(1/2) and Ber(1/4) must be 5/16");
  const Interval iv = rho_interval(Measure::bernoulli(Rat(0)), Measure::bernoulli(Rat(1)), 3);
  require(iv.lo == Rat(1) && iv.hi == Rat(1),
          "enclosure for the two constant-bit sources must collapse to [1,1]");
}

// 3. Certificates on 100 random (clopen, measure, radius, granularity)
//    tuples: Kraft sums stay at most 1 and every canonical atom's directly
//    evaluated deficiency meets the certified bound.
void criterion_certificates() {
  std::mt19937_64 rng(0x6365727469663033ULL);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng() % 8 + 1;
    std::vector<Bits> cyls;
    while (cyls.empty()) {
      cyls.clear();
      for (std::size_t i = 0; i < (std::size_t{1} << n); ++i)
        if (rng() & 1) cyls.push_back(Bits::from_index(i, n));
    }
    const Clopen c = Clopen::from_cylinders(cyls);
    const Measure mu = random_any_measure(rng);
    const Rat r = Rat(static_cast<long>(rng() % 4)) * Rat::pow2(-static_cast<long>(rng() % 13));
    const Ball ball{mu, r};

    Codebook book;
    const Certificate cert = lemma1_certificate(c, ball, n, book);
    require(cert.kraft <= Rat(1), "certificate request set must obey the kraft inequality");
    if (!cert.vacuous) {
      require(cert.registration >= 1, "non-vacuous certificates must register a request set");
      require(book.request_set(cert.registration).kraft_sum() == cert.kraft,
              "registered kraft sum must match the certificate");
    }
    for (const Bits& atom : c.atoms()) {
      const DeficiencyValue ed = ed_hat(atom, ball, book);
      if (cert.vacuous)
        require(ed.infinite, "vacuous certificate atoms must have infinite deficiency");
      else
        require(ed.at_least(Rat(cert.bound)),
                "every atom must meet the certified deficiency bound");
    }
    require(book.global_kraft() <= Rat(1), "global kraft must stay at most 1");
  }
}

// 4. Orthogonal Bernoulli families for s = 0..4: pairwise-disjoint
//    separators, and every stored guarantee equals an independently summed
//    binomial window mass strictly above 15/16.
void criterion_orthogonal_families() {
  const Family fam = Family::bernoulli();
  const Ball host{Measure::bernoulli(Rat(1, 2)), Rat(2)};
  for (std::size_t s = 0; s <= 4; ++s) {
    const OrthFamily of = fam.orthogonal(host, s, Rat(1, 2));
    const std::size_t count = std::size_t{1} << s;
    require(of.members.size() == count && of.separators.size() == count &&
                of.guarantees.size() == count,
            "family must carry 2^s members, separators, and guarantees");
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i + 1; j < count; ++j)
        require(of.separators[i].disjoint_with(of.separators[j]),
                "separators must be pairwise disjoint");
    for (std::size_t j = 0; j < count; ++j) {
      const Separator& v = of.separators[j];
      const Rat p = of.members[j].cylinder(Bits("1"));
      Rat oracle;
      if (v.is_count_window()) {
        oracle = window_mass(v.granularity(), v.window_lo(), v.window_hi(), p);
      } else {
        // A one-member family separates with the whole space.
        require(count == 1 && v.clopen_set().is_full(),
                "a non-window separator must be the full space for the lone member");
        oracle = Rat(1);
      }
      require(oracle == of.guarantees[j],
              "stored guarantee must equal the directly summed window mass");
      require(v.mass(of.members[j]) == oracle,
              "separator mass evaluation must agree with the direct sum");
      require(oracle > Rat(15, 16), "each member must load its own separator above 15/16");
    }
  }
}

// 5. Every report produced by the stage machinery satisfies beta <= 2^-s
//    exactly, and tampering with a serialized report flips validation.
void criterion_pigeonhole() {
  const Family fam = Family::bernoulli();
  const Ball base{Measure::bernoulli(Rat(1, 2)), Rat(2)};
  const Learner stub = Learner::parse("stubborn:bernoulli:p=1/2");
  AdversaryParams ap;
  ap.s_override = 6;
  ap.budget = 8;

  const Schedule sched = build_schedule(fam, Rat(1, 2), 6, base, ap);
  Codebook book;
  const StageResult res = find_inconsistency(stub, sched, Rat(0), book, ap);
  require(res.signal == StageSignal::dense, "the stubborn stage must come back dense");
  require(res.report->beta <= Rat::pow2(-static_cast<long>(res.report->s)),
          "stage report must satisfy beta <= 2^-s");

  ExperimentConfig fcfg = ExperimentConfig::parse(slurp(scenario_path("frequency_witness")));
  const AmplifyOutcome out =
      amplify(Learner::parse(fcfg.learner), Family::parse(fcfg.family), fcfg.base_ball(),
              fcfg.n, fcfg.eta, fcfg.delta, fcfg.adversary_params());
  require(out.report.has_value(), "the frequency round must produce a stage report");
  require(out.report->beta <= Rat::pow2(-static_cast<long>(out.report->s)),
          "amplify report must satisfy beta <= 2^-s");

  const DiagonalReport dr = diagonalize(stub, fam, Rat(1, 2), base, ap);
  require(!dr.rounds.empty() && dr.rounds[0].report.has_value(),
          "the stubborn diagonal must open with a reporting round");
  require(dr.rounds[0].report->beta <=
              Rat::pow2(-static_cast<long>(dr.rounds[0].report->s)),
          "diagonal round report must satisfy beta <= 2^-s");

  const Report stage =
      run_experiment(ExperimentConfig::parse(slurp(scenario_path("adversary_stubborn"))));
  require(stage.valid, "the bundled stage scenario must self-validate");
  require(validate_report(stage.serialize()).ok, "the fresh stage report must validate");

  ordered_json beta_edit = ordered_json::parse(stage.serialize());
  beta_edit["results"]["report"]["pigeonhole"]["beta"] = "1/3";
  require(!validate_report(beta_edit.dump()).ok,
          "an edited pigeonhole average must flip validation to false");

  ordered_json cert_edit = ordered_json::parse(stage.serialize());
  auto& cert = cert_edit["results"]["report"]["certificates"][0]["certificate"];
  cert["m"] = cert["m"].get<long>() - 1;
  require(!validate_report(cert_edit.dump()).ok,
          "an edited certificate must flip validation to false");
}

// 6. Coverings of the Bernoulli family at eps in {1, 1/2, 1/4}: every grid
//    member is covered, and some covering ball sits inside every radius-eps
//    ball centered at a member, both certified through the Lipschitz bound.
void criterion_covering() {
  const Family fam = Family::bernoulli();
  const Rat kappa = fam.lipschitz();
  for (const Rat& eps : {Rat(1), Rat(1, 2), Rat(1, 4)}) {
    const Covering cov = fam.cover(eps);
    require(cov.eps() == eps && cov.size() >= 1, "covering must echo eps and be non-empty");
    for (long k = 0; k < 1000; ++k) {
      const Rat p(k, 999);
      const auto ci = cov.covering_index(p);
      require(ci.has_value(), "every grid member must land in some covering ball");
      require(kappa * abs(p - cov.param(*ci)) <= cov.radius(),
              "coverage must be certified by the lipschitz bound");
      const auto di = cov.contained_index(p);
      require(di.has_value(), "every member ball must contain some covering ball");
      require(kappa * abs(p - cov.param(*di)) + cov.radius() <= eps,
              "containment must be certified by the lipschitz bound");
    }
  }
}

// 7. Positive learners: first_bit is exactly right at horizon 1 across the
//    mixture grid, and the rational learner clears 99% on the Bernoulli grid
//    at horizon 2000 with 500 trials per parameter.
void criterion_positive_learners() {
  const std::vector<Rat> grid = {Rat(0), Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(1)};

  EmpiricalParams mix;
  mix.trials = 200;
  mix.horizon = 1;
  mix.budget = 4;
  mix.criterion = SuccessCriterion::bc_proxy;
  mix.tolerance = Rat::pow2(-20);
  mix.seed = 20260814;
  const Learner fb = Learner::parse("first_bit");
  for (const Rat& p : grid)
    require(empirical_success(fb, Measure::mixture(p), mix) == Rat(1),
            "first_bit must succeed on every mixture trial at horizon 1");

  EmpiricalParams ber;
  ber.trials = 500;
  ber.horizon = 2000;
  ber.budget = 16;
  ber.criterion = SuccessCriterion::bc_proxy;
  ber.tolerance = Rat::pow2(-20);
  ber.seed = 20260814;
  const Learner rb = Learner::parse("rational_bernoulli:err=inv_cbrt");
  for (const Rat& p : grid)
    require(empirical_success(rb, Measure::bernoulli(p), ber) >= Rat(99, 100),
            "the rational learner must clear 99% on bernoulli p=" + p.str());
}

// 8. Stage analysis end to end, checked against a string-by-string sweep
//    performed here first: the stubborn learner is run on all 64 length-6
//    strings directly, the pigeonhole averages and the selected member's
//    window mass are recomputed by direct binomial summation, and only then
//    is the stage pipeline required to reproduce every number exactly.
void criterion_stage_end_to_end() {
  const Family fam = Family::bernoulli();
  const Ball base{Measure::bernoulli(Rat(1, 2)), Rat(2)};
  AdversaryParams ap;
  ap.s_override = 6;
  ap.budget = 8;
  const Schedule sched = build_schedule(fam, Rat(1, 2), 6, base, ap);
  require(sched.s == 6 && sched.fam.separators.size() == 64,
          "the stage must host 64 members at separation depth 6");
  const std::size_t M = sched.L;

  // Sweep: the learner answers every length-6 string with the same radius-0
  // ball, well below the stage precision demand, and never goes null.
  const Learner stub = Learner::parse("stubborn:bernoulli:p=1/2");
  const Measure center = Measure::bernoulli(Rat(1, 2));
  for (std::size_t v = 0; v < 64; ++v) {
    const LearnerTrace tr = stub.run(Bits::from_index(v, 6), 8);
    require(!tr.is_null(), "the stubborn learner must answer every string");
    const auto ball = tr.first_ball_below(sched.f_at_stage);
    require(ball.has_value(), "every answer must clear the stage precision demand");
    require(ball->center == center && ball->radius == Rat(0),
            "every answer must be the one fixed radius-0 ball");
  }

  // With a single emitted center, the pigeonhole average at separator j is
  // just Ber(1/2)(V_j); recompute all 64 by direct binomial summation.
  std::size_t best = 0;
  std::optional<Rat> best_beta;
  for (std::size_t j = 0; j < 64; ++j) {
    const Separator& v = sched.fam.separators[j];
    require(v.is_count_window() && v.granularity() == M,
            "stage separators must be ones-count windows at granularity L");
    const Rat beta = window_mass(M, v.window_lo(), v.window_hi(), Rat(1, 2));
    if (!best_beta || beta < *best_beta) {
      best_beta = beta;
      best = j;
    }
  }
  require(*best_beta <= Rat::pow2(-6), "the smallest average must be at most 2^-6");

  const Separator& vsel = sched.fam.separators[best];
  const Rat psel = sched.fam.members[best].cylinder(Bits("1"));
  const Rat oracle_mass = window_mass(M, vsel.window_lo(), vsel.window_hi(), psel);
  require(oracle_mass == sched.fam.guarantees[best],
          "the selected member's window mass must match its stored guarantee");
  require(oracle_mass > Rat(15, 16), "the selected member must load its separator above 15/16");

  // Pipeline: the stage must reproduce the sweep's numbers exactly.
  Codebook book;
  const StageResult res = find_inconsistency(stub, sched, Rat(0), book, ap);
  require(res.signal == StageSignal::dense, "the stage must find a dense covering ball");
  const InconsistencyReport& rep = *res.report;
  require(rep.separator_index == best, "the stage must select the sweep's separator");
  require(rep.beta == *best_beta, "the stage average must equal the direct sum");
  require(rep.xi == sched.fam.members[best], "the stage must turn against the selected member");
  require(rep.prec_mass == Rat(1) && rep.null_mass == Rat(0),
          "all strings are precise and none are null for this learner");
  require(rep.emitted.size() == 1 && rep.emitted[0].inconsistent,
          "the single emitted ball must be judged inconsistent");
  require(rep.emitted[0].sources.size() == 64, "all 64 strings must share the one ball");
  require(rep.emitted[0].cert.has_value(), "the inconsistent ball must carry a certificate");
  const Certificate& cert = *rep.emitted[0].cert;
  require(rep.threshold == 6, "the inconsistency threshold must default to the stage level");
  require(cert.bound > rep.threshold, "the certificate bound must clear the threshold");
  require(cert.kraft <= Rat(1), "the certificate kraft sum must stay at most 1");
  // The radius-0 learner leaves no slack, so the certified inconsistent mass
  // is not just >= the selected window mass minus slack; it equals it.
  require(rep.inconsistent_mass >= oracle_mass,
          "certified inconsistent mass must not fall below the sweep oracle");
  require(rep.inconsistent_mass == oracle_mass,
          "certified inconsistent mass must equal the sweep oracle exactly");
  require(rep.succ_upper == Rat(1) - oracle_mass, "the success bound must complement the mass");
  require(rep.succ_upper < Rat(1, 2), "the success bound must fall below delta");

  // Harness: the bundled scenario validates from its serialized text alone.
  const Report r =
      run_experiment(ExperimentConfig::parse(slurp(scenario_path("adversary_stubborn"))));
  require(r.valid, "the bundled stage scenario must self-validate");
  require(validate_report(r.serialize()).ok, "the serialized report must re-validate");
}

// 9. Diagonalization: the always-null learner overflows the nullity budget
//    within 5 rounds; the stubborn learner is caught by a stage witness in
//    round 1; both reports validate from their serialized text.
void criterion_diagonalization() {
  const ExperimentConfig ncfg = ExperimentConfig::parse(slurp(scenario_path("diagonal_null")));
  const Report nr = run_experiment(ncfg);
  require(nr.valid, "the always-null diagonal report must self-validate");
  require(validate_report(nr.serialize()).ok, "the always-null report must re-validate");
  const ordered_json nj = ordered_json::parse(nr.serialize());
  require(nj["results"]["verdict"].get<std::string>() == "nullity-overflow",
          "the always-null learner must end in nullity overflow");
  require(nj["results"]["rounds"].size() <= 5, "overflow must arrive within 5 rounds");

  const DiagonalReport dn = diagonalize(Learner::parse(ncfg.learner), Family::parse(ncfg.family),
                                        ncfg.delta, ncfg.base_ball(), ncfg.adversary_params());
  require(dn.rounds_cap == 5, "the round cap at delta=1/2 must be 5");
  require(dn.verdict == "nullity-overflow" && dn.rounds.size() == 3,
          "the always-null loop must overflow on round 3");
  require(dn.final_eta == Rat(3, 4) && dn.final_eta > Rat(1) - ncfg.delta,
          "the final certified nullity must pass 1 - delta");

  ExperimentConfig scfg;
  scfg.scenario = "acceptance_stubborn_diagonal";
  scfg.kind = "diagonal";
  scfg.family = "bernoulli";
  scfg.learner = "stubborn:bernoulli:p=1/2";
  scfg.delta = Rat(1, 2);
  scfg.s_override = 6;
  scfg.budget = 8;
  scfg.n_max = 8;
  const Report sr = run_experiment(scfg);
  require(sr.valid, "the stubborn diagonal report must self-validate");
  require(validate_report(sr.serialize()).ok, "the stubborn diagonal report must re-validate");
  const ordered_json sj = ordered_json::parse(sr.serialize());
  require(sj["results"]["verdict"].get<std::string>() == "stage-witness",
          "the stubborn learner must end in a stage witness");
  require(sj["results"]["rounds"].size() == 1, "the stubborn learner must be caught in round 1");
}

// 10. Registering more request sets never increases any k_hat and never
//     decreases any estimated deficiency, across 50 randomized registrations
//     probed on every string of length <= 5 plus long constant runs.
void criterion_codebook_monotone() {
  std::mt19937_64 rng(0x6b7261667431300aULL);
  Codebook book;

  std::vector<Bits> probes;
  for (std::size_t len = 0; len <= 5; ++len)
    for (const Bits& t : Bits::all_of_length(len)) probes.push_back(t);
  for (std::size_t k : {8, 12, 16, 20}) {
    probes.push_back(Bits(std::string(k, '0')));
    probes.push_back(Bits(std::string(k, '1')));
  }

  const Ball wide{Measure::bernoulli(Rat(1, 3)), Rat::pow2(-10)};
  const Ball strict{Measure::point_mass(Bits("101")), Rat(0)};

  auto khats = [&] {
    std::vector<unsigned long> v;
    for (const Bits& t : probes) v.push_back(book.k_hat(t));
    return v;
  };
  auto eds = [&](const Ball& b) {
    std::vector<DeficiencyValue> v;
    for (const Bits& t : probes) v.push_back(ed_hat(t, b, book));
    return v;
  };

  std::vector<unsigned long> k_prev = khats();
  std::vector<DeficiencyValue> wide_prev = eds(wide);
  std::vector<DeficiencyValue> strict_prev = eds(strict);

  for (int step = 0; step < 50; ++step) {
    RequestSet rs;
    if (rng() % 2) {
      const std::size_t entries = rng() % 4 + 1;
      for (std::size_t i = 0; i < entries; ++i) {
        const std::size_t len = rng() % 9;
        const std::size_t index = len ? rng() % (std::size_t{1} << len) : 0;
        rs.add(Request{Bits::from_index(index, len),
                       static_cast<unsigned long>(rng() % 30 + 3)});
      }
    } else {
      const std::size_t len = rng() % 9 + 2;
      const std::size_t ones = rng() % (len + 1);
      Int count;
      mpz_bin_uiui(count.get_mpz_t(), len, ones);
      const unsigned long bits = mpz_sizeinbase(count.get_mpz_t(), 2);
      rs.add(ClassRequest{len, ones, bits + static_cast<unsigned long>(rng() % 8 + 3)});
    }
    require(rs.kraft_sum() <= Rat(1), "randomized request sets must obey the kraft budget");
    book.register_set(rs, "randomized probe registration");
    require(book.global_kraft() <= Rat(1), "global kraft must hold after every registration");

    const std::vector<unsigned long> k_now = khats();
    const std::vector<DeficiencyValue> wide_now = eds(wide);
    const std::vector<DeficiencyValue> strict_now = eds(strict);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      require(k_now[i] <= k_prev[i], "a new registration must never increase k_hat");
      require(wide_now[i].infinite == wide_prev[i].infinite &&
                  (wide_now[i].infinite || wide_now[i].value >= wide_prev[i].value),
              "a new registration must never decrease estimated deficiency");
      require(strict_now[i].infinite == strict_prev[i].infinite &&
                  (strict_now[i].infinite || strict_now[i].value >= strict_prev[i].value),
              "a new registration must never decrease radius-0 deficiency");
    }
    k_prev = k_now;
    wide_prev = wide_now;
    strict_prev = strict_now;
  }
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  struct Criterion {
    const char* label;
    void (*fn)();
  };
  const std::vector<Criterion> gate = {
      {"01 metric axioms, enclosures, brute-force oracle", &criterion_metric_axioms},
      {"02 pinned metric values", &criterion_pinned_values},
      {"03 certificate kraft sums and deficiency bounds", &criterion_certificates},
      {"04 orthogonal families: disjointness, guarantees", &criterion_orthogonal_families},
      {"05 pigeonhole bound and tamper detection", &criterion_pigeonhole},
      {"06 coverings: grid coverage and containment", &criterion_covering},
      {"07 positive learners: mixture and bernoulli grids", &criterion_positive_learners},
      {"08 stage witness against the 64-string sweep", &criterion_stage_end_to_end},
      {"09 diagonalization: overflow and round-1 witness", &criterion_diagonalization},
      {"10 codebook growth never weakens bounds", &criterion_codebook_monotone},
  };

  int failures = 0;
  for (const Criterion& c : gate) {
    const auto started = clock::now();
    std::string error;
    try {
      c.fn();
    } catch (const std::exception& e) {
      error = e.what();
    } catch (...) {
      error = "unrecognized exception";
    }
    const double secs = std::chrono::duration<double>(clock::now() - started).count();
    if (error.empty())
      std::printf("PASS  %-52s %7.2fs\n", c.label, secs);
    else {
      ++failures;
      std::printf("FAIL  %-52s %7.2fs  %s\n", c.label, secs, error.c_str());
    }
    std::fflush(stdout);
  }
  return failures;
}
