#pragma once

// The adversarial stage analysis and the diagonalization loop built on it.
//
// A stage fixes a granularity n, a precision demand f, and an orthogonal
// member family with disjoint separators. The learner is either precise on a
// set so heavy that some covering ball is "dense" -- in which case the
// pigeonhole over separators produces one member xi whose separator carries
// almost none of the emitted balls, and codebook certificates convert that
// into an exact upper bound on the learner's success against xi -- or no
// covering ball is dense, in which case a threshold-wrapped learner is
// certified null on delta/2 more mass than before. Iterating the dichotomy
// either finds a stage witness with success below delta or drives the
// certified nullity past 1 - delta.
//
// Everything reported here is exact rational arithmetic; reports serialize to
// JSON that a validator can re-derive from scratch.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor/codebook.hpp"
#include "cantor/family.hpp"
#include "cantor/learner.hpp"
#include "cantor/measure.hpp"
#include "cantor/rat.hpp"

namespace cantor {

struct AdversaryParams {
  std::size_t n_max = 8;   // last stage the search may visit
  std::size_t budget = 8;  // learner steps per queried string
  // Separation depth; default s(n) = 4n + d. The bundled scenarios pin it
  // explicitly to keep separator granularities desk-sized.
  std::optional<std::size_t> s_override;
  std::size_t d = 8;
  // Inconsistency threshold tau for certificate bounds; default tau = n.
  std::optional<long> threshold;
  // Forwarded to the orthogonal-family search (pins the window granularity).
  std::optional<std::size_t> granularity_override;
  // Host ball for the orthogonal family; default is the stage's base ball.
  // Hosting on the much smaller covering balls is supported but the window
  // granularity certifying separators inside a radius-2^-k ball grows like
  // 4^(k+s), so desk-scale runs host on the base ball; every reported
  // inequality is checked exactly either way.
  std::optional<Ball> family_host;
};

// Everything a single stage needs, derived from (family, delta, n, base).
struct Schedule {
  std::size_t n;        // stage granularity
  std::size_t s;        // separation depth: 2^s members / separators
  Rat delta;
  Rat eps;              // covering scale: min(2^-n * delta/4, base radius)
  Ball base;
  Ball family_host;
  Covering covering;
  OrthFamily fam;
  std::size_t L;        // max separator granularity
  PrecisionSchedule f;  // f(m) = 2^-(m + (L + s - n)); f(n) = 2^-(L+s)
  Rat f_at_stage;       // f(n), the radius demand on emitted balls
};

// Throws InvalidArgument when n = 0, delta lies outside (0, 1], or the
// family's separator granularity cannot absorb the stage (L + s < n).
Schedule build_schedule(const Family& family, const Rat& delta, std::size_t n,
                        const Ball& base, const AdversaryParams& params = {});

// Index j minimising beta_j = (1/t) sum_i centers[i](V_j) over the family's
// separators, with the minimum value. Disjointness forces min beta <= 2^-s;
// that inequality is re-checked exactly and a violation throws LogicError.
// Ties break to the smallest index.
std::pair<std::size_t, Rat> pigeonhole_select(const std::vector<Measure>& centers,
                                              const OrthFamily& fam);

// One distinct ball emitted during a stage, with every queried string that
// produced it and the certificate judging it against the selected separator.
struct EmittedBall {
  Ball ball;
  std::vector<Bits> sources;
  bool inconsistent = false;
  std::optional<Certificate> cert;
};

struct InconsistencyReport {
  std::size_t stage;
  Rat delta;
  Rat eta;
  std::size_t budget;
  std::string learner;          // serialized learner the stage interrogated
  std::size_t s;
  std::size_t L;
  Rat f_value;                  // 2^-(L+s)
  std::size_t covering_index;   // the dense covering ball
  Ball covering_ball;
  Ball family_host;
  std::vector<Rat> family_params;     // parameters of the 2^s members
  std::vector<Separator> separators;
  std::vector<Rat> guarantees;
  Clopen prec;                  // strings of length `stage` answered precisely
  Clopen null_cells;            // strings on which the learner went null
  std::vector<EmittedBall> emitted;   // distinct balls, stage-order
  std::size_t separator_index;  // pigeonhole choice j
  Rat beta;
  Measure xi;                   // the member the stage turns against
  long threshold;
  Rat prec_mass;                // xi(prec)
  Rat null_mass;                // xi(null_cells)
  Rat inconsistent_mass;        // xi-mass of precise strings with inconsistent balls
  Rat succ_upper;               // 1 - inconsistent_mass
  Rat succ_upper_combined;      // 1 - inconsistent_mass - null_mass

  std::string to_json(const std::string& scenario = "") const;
};

enum class StageSignal { dense, sparse, inconclusive };

struct StageResult {
  StageSignal signal = StageSignal::inconclusive;
  std::optional<InconsistencyReport> report;  // engaged exactly when dense
  Clopen prec;        // filled on dense and sparse outcomes alike
  Clopen null_cells;
  std::string note;
};

// Runs one stage: computes the precision/null sets, hunts for a dense
// covering ball, and on success performs the pigeonhole + certification
// pass. `book` receives the stage's separator registrations.
StageResult find_inconsistency(const Learner& a, const Schedule& sched, const Rat& eta,
                               Codebook& book, const AdversaryParams& params = {});

inline Rat succ_upper_bound(const InconsistencyReport& rep) { return rep.succ_upper; }

enum class AmplifyBranch { stage_witness, null_amplified, inconclusive };

struct AmplifyOutcome {
  AmplifyBranch branch;
  Ball refined;        // witness ball, or the unchanged base on other branches
  std::size_t stage;   // stage that decided (N on the inconclusive fast path)
  Learner learner;     // threshold-wrapped on the null branch, else unchanged
  Rat eta;             // certified nullity after this round
  std::optional<InconsistencyReport> report;
  Rat succ_bound;      // 1 - inconsistent mass on the witness branch, else 1
  // Exact nullity of sampled family members under the wrapped learner
  // (null branch only); each is checked > eta_out before returning.
  std::vector<Rat> sampled_null;
};

// One round of the dichotomy starting above stage N. Dense stage: returns a
// witness ball around xi whose radius keeps it inside `base`. Sparse stage:
// returns the threshold-wrapped learner and eta + delta/2.
AmplifyOutcome amplify(const Learner& a, const Family& family, const Ball& base,
                       std::size_t N, const Rat& eta, const Rat& delta,
                       const AdversaryParams& params = {});

struct RoundRecord {
  std::size_t round = 0;
  std::size_t stage = 0;
  std::string branch;  // "stage-witness" | "null-amplified" | "inconclusive"
  Rat eta_after;
  Rat succ_bound;      // meaningful on the witness branch
  std::string learner_after;
  std::optional<InconsistencyReport> report;
};

struct DiagonalReport {
  Rat delta;
  std::size_t rounds_cap = 0;  // ceil(2/delta) + 1
  std::vector<RoundRecord> rounds;
  std::string verdict;         // "stage-witness" | "nullity-overflow" | "inconclusive"
  Rat final_eta;
  std::optional<Ball> final_ball;
  std::optional<Measure> candidate;  // center of the final ball
  std::string final_learner;

  std::string to_json(const std::string& scenario = "") const;
};

// Full diagonalization: threads (ball, stage, eta, learner) through at most
// ceil(2/delta) + 1 rounds of amplify. Ends with "stage-witness" when a
// witness round certifies success below delta, "nullity-overflow" once
// eta > 1 - delta, and "inconclusive" when the stage range or a budget runs
// out first.
DiagonalReport diagonalize(const Learner& a, const Family& family, const Rat& delta,
                           const Ball& base, const AdversaryParams& params = {});

}  // namespace cantor
