#include "cantor/adversary.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "cantor/errors.hpp"

namespace cantor {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json ball_json(const Ball& b) {
  return ordered_json{{"center", b.center.serialize()}, {"radius", b.radius.str()}};
}

// Truncation level for the three-valued ball-inclusion checks below. The
// checks only shrink a report's witness radius, never any certified mass, so
// a conservative fixed level is safe.
constexpr std::size_t kFitPrecision = 16;

}  // namespace

Schedule build_schedule(const Family& family, const Rat& delta, std::size_t n,
                        const Ball& base, const AdversaryParams& params) {
  if (n == 0) throw std::invalid_argument("build_schedule: stage must be positive");
  if (!(delta > Rat(0)) || delta > Rat(1))
    throw std::invalid_argument("build_schedule: delta must lie in (0, 1]");
  const std::size_t s =
      params.s_override ? *params.s_override : 4 * n + params.d;
  const Rat eps = min(Rat::pow2(-static_cast<long>(n)) * delta / Rat(4), base.radius);
  Covering covering = family.cover(eps);
  const Ball host = params.family_host ? *params.family_host : base;
  OrthFamily fam = family.orthogonal(host, s, delta, params.granularity_override);
  const std::size_t L = fam.granularity;
  if (L + s < n)
    throw std::invalid_argument("build_schedule: stage exceeds the precision exponent L + s");
  PrecisionSchedule f = PrecisionSchedule::dyadic(1, L + s - n);
  Rat f_at_stage = f(n);
  return Schedule{n,    s,
                  delta, eps,
                  base, host,
                  std::move(covering), std::move(fam),
                  L,    f,
                  std::move(f_at_stage)};
}

std::pair<std::size_t, Rat> pigeonhole_select(const std::vector<Measure>& centers,
                                              const OrthFamily& fam) {
  if (centers.empty())
    throw std::invalid_argument("pigeonhole_select: no centers to average over");
  if (fam.separators.empty())
    throw std::invalid_argument("pigeonhole_select: family has no separators");
  const Rat t(static_cast<long>(centers.size()));
  std::size_t best = 0;
  Rat best_beta;
  for (std::size_t j = 0; j < fam.separators.size(); ++j) {
    Rat sum(0);
    for (const Measure& c : centers) sum += fam.separators[j].mass(c);
    Rat beta = sum / t;
    if (j == 0 || beta < best_beta) {
      best = j;
      best_beta = std::move(beta);
    }
  }
  // Disjoint separators give sum_j beta_j <= 1, so the minimum over the 2^s
  // of them cannot exceed 2^-s. Re-checked exactly rather than trusted.
  if (!(best_beta <= Rat::pow2(-static_cast<long>(fam.s))))
    throw std::logic_error("pigeonhole_select: minimum average exceeds 2^-s");
  return {best, best_beta};
}

StageResult find_inconsistency(const Learner& a, const Schedule& sched, const Rat& eta,
                               Codebook& book, const AdversaryParams& params) {
  StageResult out;
  if (params.budget == 0) {
    out.signal = StageSignal::inconclusive;
    out.note = "zero learner budget";
    return out;
  }
  const std::size_t n = sched.n;
  out.prec = prec_set(a, sched.f, n, params.budget);
  out.null_cells = null_set(a, n, params.budget);

  // Dense covering ball: grid center whose prec mass clears 1 - eta - 3delta/4
  // even after discounting the ball's own radius at granularity n.
  const Rat bar = Rat(1) - eta - Rat(3) * sched.delta / Rat(4);
  const Rat shift = Rat::pow2(static_cast<long>(n)) * sched.covering.radius();
  std::optional<std::size_t> dense;
  for (std::size_t i = 0; i < sched.covering.size(); ++i) {
    if (sched.covering.ball(i).center.mass(out.prec) - shift > bar) {
      dense = i;
      break;
    }
  }
  if (!dense) {
    out.signal = StageSignal::sparse;
    out.note = "no covering ball certifies density";
    return out;
  }

  // Collect the balls the learner commits to, deduplicated so the pigeonhole
  // averages over distinct centers. Membership in prec and emission of a
  // ball below f(n) are the same predicate, so the source strings partition
  // the precision set exactly.
  std::vector<EmittedBall> emitted;
  for (const Bits& sigma : Bits::all_of_length(n)) {
    auto trace = run_learner(a, sigma, params.budget);
    auto hit = trace.first_ball_below(sched.f_at_stage);
    if (!hit) continue;
    const std::string key = hit->center.serialize();
    auto same = std::find_if(emitted.begin(), emitted.end(), [&](const EmittedBall& e) {
      return e.ball.radius == hit->radius && e.ball.center.serialize() == key;
    });
    if (same == emitted.end()) {
      emitted.push_back(EmittedBall{*hit, {sigma}, false, {}});
    } else {
      same->sources.push_back(sigma);
    }
  }
  if (emitted.empty())
    throw std::logic_error("find_inconsistency: dense stage emitted no balls");
  {
    std::vector<Bits> sources;
    for (const EmittedBall& e : emitted)
      sources.insert(sources.end(), e.sources.begin(), e.sources.end());
    if (!(Clopen::from_cylinders(sources) == out.prec))
      throw std::logic_error("find_inconsistency: emitted sources disagree with the precision set");
  }

  std::vector<Measure> centers;
  centers.reserve(emitted.size());
  for (const EmittedBall& e : emitted) centers.push_back(e.ball.center);
  auto [j, beta] = pigeonhole_select(centers, sched.fam);
  const Separator& sep = sched.fam.separators[j];
  const Measure& xi = sched.fam.members[j];
  const long tau = params.threshold ? *params.threshold : static_cast<long>(n);

  for (EmittedBall& e : emitted) {
    Certificate cert = lemma1_certificate(sep, e.ball, n, book);
    e.inconsistent = cert.vacuous || cert.bound > tau;
    e.cert = std::move(cert);
  }

  const Rat prec_mass = xi.mass(out.prec);
  const Rat null_mass = xi.mass(out.null_cells);
  Rat inconsistent_mass(0);
  for (const EmittedBall& e : emitted) {
    if (!e.inconsistent) continue;
    for (const Bits& sigma : e.sources) inconsistent_mass += sep.prefix_mass(xi, sigma);
  }
  if (!(inconsistent_mass <= prec_mass))
    throw std::logic_error("find_inconsistency: inconsistent mass exceeds precision mass");
  if (!(prec_mass + null_mass <= Rat(1)))
    throw std::logic_error("find_inconsistency: precision and null masses overlap");

  std::vector<Rat> family_params;
  family_params.reserve(sched.fam.members.size());
  for (const Measure& m : sched.fam.members) family_params.push_back(m.spec().p);

  Rat succ_upper = Rat(1) - inconsistent_mass;
  Rat succ_combined = succ_upper - null_mass;
  InconsistencyReport rep{n,
                          sched.delta,
                          eta,
                          params.budget,
                          a.serialize(),
                          sched.s,
                          sched.L,
                          sched.f_at_stage,
                          *dense,
                          sched.covering.ball(*dense),
                          sched.fam.host,
                          std::move(family_params),
                          sched.fam.separators,
                          sched.fam.guarantees,
                          out.prec,
                          out.null_cells,
                          std::move(emitted),
                          j,
                          std::move(beta),
                          xi,
                          tau,
                          prec_mass,
                          null_mass,
                          std::move(inconsistent_mass),
                          std::move(succ_upper),
                          std::move(succ_combined)};
  out.signal = StageSignal::dense;
  out.report = std::move(rep);
  return out;
}

AmplifyOutcome amplify(const Learner& a, const Family& family, const Ball& base,
                       std::size_t N, const Rat& eta, const Rat& delta,
                       const AdversaryParams& params) {
  if (params.budget == 0)
    return AmplifyOutcome{AmplifyBranch::inconclusive, base, N, a, eta, {}, Rat(1), {}};
  for (std::size_t n = N + 1; n <= params.n_max; ++n) {
    Schedule sched = build_schedule(family, delta, n, base, params);
    Codebook book;
    StageResult stage = find_inconsistency(a, sched, eta, book, params);
    if (stage.signal == StageSignal::dense) {
      InconsistencyReport rep = std::move(*stage.report);
      // Witness ball around the pigeonhole member, scaled by the margin over
      // 1 - delta and shrunk until the inclusion in the base certifies.
      const Rat margin = rep.inconsistent_mass - (Rat(1) - delta);
      Rat radius(0);
      if (margin > Rat(0)) {
        const std::size_t g = std::max(n, rep.L);
        radius = margin * Rat::pow2(-static_cast<long>(g + 1));
      }
      Ball witness{rep.xi, radius};
      for (int tries = 0; tries < 128 && radius > Rat(0); ++tries) {
        if (witness.within(base, kFitPrecision) == Fit::inside) break;
        radius = radius / Rat(2);
        witness.radius = radius;
      }
      if (radius > Rat(0) && witness.within(base, kFitPrecision) != Fit::inside)
        witness.radius = Rat(0);
      Rat succ = rep.succ_upper;
      return AmplifyOutcome{AmplifyBranch::stage_witness, std::move(witness), n,
                            a,       eta,
                            std::move(rep), std::move(succ),
                            {}};
    }
    if (stage.signal == StageSignal::sparse) {
      Learner wrapped = threshold_wrap(a, sched.f);
      const Rat eta_next = eta + delta / Rat(2);
      // The wrapped learner is null exactly where the inner one missed the
      // precision demand, so every family member picks up nullity at least
      // eta + delta/2; spot-check a few covering centers exactly.
      Clopen wrapped_null = null_set(wrapped, n, params.budget);
      std::vector<Rat> sampled;
      std::vector<std::size_t> picks{0, sched.covering.size() / 2, sched.covering.size() - 1};
      picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
      for (std::size_t i : picks) {
        Rat mass = sched.covering.ball(i).center.mass(wrapped_null);
        if (!(mass > eta_next))
          throw std::logic_error("amplify: sampled member misses the amplified nullity");
        sampled.push_back(std::move(mass));
      }
      return AmplifyOutcome{AmplifyBranch::null_amplified, base,  n, std::move(wrapped),
                            eta_next,                      {},    Rat(1),
                            std::move(sampled)};
    }
    return AmplifyOutcome{AmplifyBranch::inconclusive, base, n, a, eta, {}, Rat(1), {}};
  }
  return AmplifyOutcome{AmplifyBranch::inconclusive, base, N, a, eta, {}, Rat(1), {}};
}

DiagonalReport diagonalize(const Learner& a, const Family& family, const Rat& delta,
                           const Ball& base, const AdversaryParams& params) {
  if (!(delta > Rat(0)) || delta > Rat(1))
    throw std::invalid_argument("diagonalize: delta must lie in (0, 1]");
  DiagonalReport rep;
  rep.delta = delta;
  // ceil(2/delta) + 1 rounds always suffice: each null round adds delta/2.
  const Int cap_div = (Int(2) * delta.den() + delta.num() - 1) / delta.num();
  rep.rounds_cap = static_cast<std::size_t>(cap_div.get_ui()) + 1;
  rep.verdict = "inconclusive";

  Learner learner = a;
  Ball ball = base;
  Rat eta(0);
  std::size_t stage = 0;
  for (std::size_t round = 1; round <= rep.rounds_cap; ++round) {
    AmplifyOutcome out = amplify(learner, family, ball, stage, eta, delta, params);
    RoundRecord rec;
    rec.round = round;
    rec.stage = out.stage;
    rec.eta_after = out.eta;
    if (out.branch == AmplifyBranch::stage_witness) {
      rec.branch = "stage-witness";
      rec.succ_bound = out.succ_bound;
      rec.learner_after = learner.serialize();
      rec.report = std::move(out.report);
      rep.verdict = out.succ_bound < delta ? "stage-witness" : "inconclusive";
      ball = std::move(out.refined);
      rep.rounds.push_back(std::move(rec));
      break;
    }
    if (out.branch == AmplifyBranch::inconclusive) {
      rec.branch = "inconclusive";
      rec.learner_after = learner.serialize();
      rep.rounds.push_back(std::move(rec));
      break;
    }
    eta = out.eta;
    learner = std::move(out.learner);
    stage = out.stage;
    ball = std::move(out.refined);
    rec.branch = "null-amplified";
    rec.learner_after = learner.serialize();
    rep.rounds.push_back(std::move(rec));
    if (eta > Rat(1) - delta) {
      rep.verdict = "nullity-overflow";
      break;
    }
  }
  rep.final_eta = eta;
  rep.final_ball = ball;
  rep.candidate = ball.center;
  rep.final_learner = learner.serialize();
  return rep;
}

std::string InconsistencyReport::to_json(const std::string& scenario) const {
  ordered_json j;
  j["scenario"] = scenario;
  j["verdict"] = succ_upper < delta ? "stage-witness" : "inconclusive";
  j["stage"] = stage;
  j["covering"] = ordered_json{{"index", covering_index},
                               {"center", covering_ball.center.serialize()},
                               {"radius", covering_ball.radius.str()}};
  ordered_json params_json = ordered_json::array();
  for (const Rat& p : family_params) params_json.push_back(p.str());
  ordered_json separators_json = ordered_json::array();
  for (const Separator& v : separators) separators_json.push_back(v.serialize());
  ordered_json guarantees_json = ordered_json::array();
  for (const Rat& g : guarantees) guarantees_json.push_back(g.str());
  j["family"] = ordered_json{{"s", s},
                             {"M", L},
                             {"params", std::move(params_json)},
                             {"host", ball_json(family_host)},
                             {"separators", std::move(separators_json)},
                             {"guarantees", std::move(guarantees_json)}};
  j["pigeonhole"] = ordered_json{
      {"j", separator_index}, {"beta", beta.str()}, {"member", xi.serialize()}};
  j["masses"] = ordered_json{{"prec", prec_mass.str()},
                             {"null", null_mass.str()},
                             {"inconsistent", inconsistent_mass.str()}};
  j["succ_upper_bound"] = succ_upper.str();
  j["succ_upper_bound_with_null"] = succ_upper_combined.str();
  ordered_json certs = ordered_json::array();
  for (const EmittedBall& e : emitted) {
    ordered_json sources = ordered_json::array();
    for (const Bits& sigma : e.sources) sources.push_back(sigma.str());
    ordered_json entry{{"sources", std::move(sources)},
                       {"center", e.ball.center.serialize()},
                       {"radius", e.ball.radius.str()},
                       {"inconsistent", e.inconsistent}};
    entry["certificate"] =
        e.cert ? ordered_json::parse(e.cert->serialize()) : ordered_json(nullptr);
    certs.push_back(std::move(entry));
  }
  j["certificates"] = std::move(certs);
  j["config"] = ordered_json{{"learner", learner},
                             {"delta", delta.str()},
                             {"eta", eta.str()},
                             {"threshold", threshold},
                             {"budget", budget},
                             {"f", f_value.str()},
                             {"L", L},
                             {"prec", prec.serialize()},
                             {"null", null_cells.serialize()}};
  return j.dump();
}

std::string DiagonalReport::to_json(const std::string& scenario) const {
  ordered_json j;
  j["scenario"] = scenario;
  j["kind"] = "diagonal";
  j["delta"] = delta.str();
  j["rounds_cap"] = rounds_cap;
  j["verdict"] = verdict;
  j["final_eta"] = final_eta.str();
  j["final_ball"] = final_ball ? ball_json(*final_ball) : ordered_json(nullptr);
  j["candidate"] = candidate ? ordered_json(candidate->serialize()) : ordered_json(nullptr);
  j["final_learner"] = final_learner;
  ordered_json rounds_json = ordered_json::array();
  for (const RoundRecord& r : rounds) {
    ordered_json entry{{"round", r.round},
                       {"stage", r.stage},
                       {"branch", r.branch},
                       {"eta_after", r.eta_after.str()},
                       {"succ_bound", r.succ_bound.str()},
                       {"learner_after", r.learner_after}};
    entry["report"] =
        r.report ? ordered_json::parse(r.report->to_json(scenario)) : ordered_json(nullptr);
    rounds_json.push_back(std::move(entry));
  }
  j["rounds"] = std::move(rounds_json);
  return j.dump();
}

}  // namespace cantor
