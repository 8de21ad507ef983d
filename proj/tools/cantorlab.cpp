// cantorlab — command-line front end for the exact measure-identification lab.
//
// Every number printed is an exact rational ("num/den"); decimal renderings
// are advisory. Exit codes: 0 success, 2 validation failure, 3 hypothesis
// violation at the requested scale, 4 inconclusive (budget exhausted without
// a verdict).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cantor/codebook.hpp"
#include "cantor/errors.hpp"
#include "cantor/family.hpp"
#include "cantor/harness.hpp"
#include "cantor/learner.hpp"
#include "cantor/measure.hpp"

using namespace cantor;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitInconclusive = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out.good()) throw std::runtime_error("cannot write '" + path + "'");
  out << text << "\n";
  std::cerr << "report written to " << path << "\n";
}

std::string deficiency_text(const DeficiencyValue& d) {
  return d.infinite ? "inf" : d.value.str();
}

int cmd_family_list() {
  struct Row {
    std::string name;
    Family fam;
    std::string members;
  };
  const std::vector<Row> rows = {
      {"bernoulli", Family::bernoulli(), "bernoulli:p=t for t in [0,1]"},
      {"mu_p", Family::mu_p(), "mu_p:p=t for t in [0,1]"},
      {"mixture", Family::mixture(), "mixture:p=t for t in [0,1]"},
      {"singleton:<measure>", Family::singleton(Measure::bernoulli(Rat(1, 2))),
       "the one fixed measure"},
  };
  for (const auto& row : rows) {
    std::cout << row.name << "\n"
              << "  members:    " << row.members << "\n"
              << "  lipschitz:  " << row.fam.lipschitz().str() << "\n"
              << "  orthogonal: " << (row.fam.has_orthogonal_generator() ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

int cmd_measure_eval(const std::string& spec, const std::string& sigma) {
  const Measure m = Measure::parse(spec);
  const Rat mass = m.cylinder(Bits(sigma));
  std::cout << mass.str() << " (" << mass.decimal() << ")\n";
  return kExitOk;
}

int cmd_rho(const std::string& a, const std::string& b, std::size_t M) {
  const Interval d = rho_interval(Measure::parse(a), Measure::parse(b), M);
  std::cout << "[" << d.lo.str() << ", " << d.hi.str() << "]"
            << " ([" << d.lo.decimal() << ", " << d.hi.decimal() << "])\n";
  return kExitOk;
}

int cmd_learner_run(const std::string& spec, const std::string& input, std::size_t budget,
                    const std::string& csv_path) {
  const Learner a = Learner::parse(spec);
  const Bits sigma(input);
  const LearnerTrace trace = a.run(sigma, budget);

  ordered_json j;
  j["learner"] = a.serialize();
  j["input"] = sigma.str();
  j["budget"] = budget;
  j["emitted"] = ordered_json::array();
  for (const auto& [ball, stamp] : trace.emitted)
    j["emitted"].push_back({{"center", ball.center.serialize()},
                            {"radius", ball.radius.str()},
                            {"stamp", stamp}});
  j["null"] = trace.is_null();
  std::cout << j.dump(2) << "\n";

  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv.good()) throw std::runtime_error("cannot write '" + csv_path + "'");
    Codebook book;
    csv << "stage,sigma,emitted_radius,ed_hat,label\n";
    for (std::size_t n = 1; n <= sigma.size(); ++n) {
      const Bits prefix = sigma.prefix(n);
      const LearnerTrace t = a.run(prefix, budget);
      if (t.emitted.empty()) {
        csv << n << "," << prefix.str() << ",,," << "null\n";
        continue;
      }
      const Ball& last = t.emitted.back().first;
      csv << n << "," << prefix.str() << "," << last.radius.str() << ","
          << deficiency_text(ed_hat(prefix, last, book)) << ",emitted\n";
    }
    std::cerr << "trace written to " << csv_path << "\n";
  }
  return kExitOk;
}

int cmd_sample(const std::string& spec, std::size_t n, std::uint64_t seed, bool audit) {
  const SampledBits s = sample_sequence_audited(Measure::parse(spec), n, seed);
  if (!audit) {
    std::cout << s.bits.str() << "\n";
    return kExitOk;
  }
  std::size_t total = 0;
  ordered_json j;
  j["bits"] = s.bits.str();
  j["generator_bits"] = s.generator_bits;
  for (std::size_t used : s.generator_bits) total += used;
  j["generator_bits_total"] = total;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// Shared driver for `experiment` and the `adversary` verbs: runs the config,
// writes the report, and maps the outcome onto the exit-code contract.
int run_config(const std::string& config_path, const std::string& out_flag,
               const std::string& expect_kind) {
  const ExperimentConfig cfg = ExperimentConfig::parse(slurp(config_path));
  if (!expect_kind.empty() && cfg.kind != expect_kind)
    throw std::runtime_error("config kind is '" + cfg.kind + "', this verb runs '" +
                             expect_kind + "'");
  const Report report = run_experiment(cfg);
  const std::string destination = !out_flag.empty() ? out_flag : cfg.output;
  emit(report.serialize(), destination);
  if (!report.valid) {
    std::cerr << "report failed self-validation\n";
    return kExitValidation;
  }
  const ordered_json results = ordered_json::parse(report.results);
  const char* verdict_key = report.kind == "stage"     ? "signal"
                            : report.kind == "amplify" ? "branch"
                            : report.kind == "diagonal" ? "verdict"
                                                        : nullptr;
  if (verdict_key && results.at(verdict_key).get<std::string>() == "inconclusive")
    return kExitInconclusive;
  return kExitOk;
}

int cmd_verify(const std::string& path) {
  const ValidationResult v = validate_report(slurp(path));
  if (v.ok) {
    std::cout << "valid\n";
    return kExitOk;
  }
  std::cout << "invalid\n";
  for (const std::string& d : v.diagnostics) std::cerr << d << "\n";
  return kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact laboratory for identifying probability measures on binary sequences"};
  app.require_subcommand(1);

  // family list
  auto* family = app.add_subcommand("family", "bundled parametrized families");
  family->require_subcommand(1);
  family->add_subcommand("list", "list the families and their constants");

  // measure eval
  auto* measure = app.add_subcommand("measure", "evaluate measures");
  measure->require_subcommand(1);
  auto* meval = measure->add_subcommand("eval", "exact cylinder mass of a prefix");
  std::string meval_spec, meval_sigma;
  meval->add_option("--spec", meval_spec, "measure spec, eg. bernoulli:p=1/2")->required();
  meval->add_option("--sigma", meval_sigma, "finite 0/1 prefix")->required();

  // rho
  auto* rho = app.add_subcommand("rho", "metric enclosure between two measures");
  std::string rho_a, rho_b;
  std::size_t rho_M = 8;
  rho->add_option("--a", rho_a, "first measure spec")->required();
  rho->add_option("--b", rho_b, "second measure spec")->required();
  rho->add_option("--M", rho_M, "truncation level (tail error 2^-M)");

  // learner run
  auto* learner = app.add_subcommand("learner", "run learners");
  learner->require_subcommand(1);
  auto* lrun = learner->add_subcommand("run", "run a learner on a finite input");
  std::string lrun_spec, lrun_input, lrun_csv;
  std::size_t lrun_budget = 16;
  lrun->add_option("--spec", lrun_spec, "learner spec, eg. first_bit")->required();
  lrun->add_option("--input", lrun_input, "finite 0/1 input")->required();
  lrun->add_option("--budget", lrun_budget, "search budget per run");
  lrun->add_option("--csv", lrun_csv, "write a per-prefix trace (stage,sigma,emitted_radius,ed_hat,label)");

  // adversary stage|amplify|diagonalize
  auto* adversary = app.add_subcommand("adversary", "nullity amplification against a learner");
  adversary->require_subcommand(1);
  std::string adv_config, adv_out;
  auto add_adv = [&](const char* name, const char* help) {
    auto* sub = adversary->add_subcommand(name, help);
    sub->add_option("--config", adv_config, "experiment config (JSON)")->required();
    sub->add_option("--out", adv_out, "report destination (default: config output, else stdout)");
    return sub;
  };
  add_adv("stage", "single-stage inconsistency search");
  add_adv("amplify", "one amplification step (witness or grown nullity)");
  add_adv("diagonalize", "full diagonal run to a verdict");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run any experiment config");
  std::string exp_config, exp_out;
  experiment->add_option("--config", exp_config, "experiment config (JSON)")->required();
  experiment->add_option("--out", exp_out, "report destination (default: config output, else stdout)");

  // sample
  auto* sample = app.add_subcommand("sample", "draw an exact prefix from a measure");
  std::string sample_spec;
  std::size_t sample_n = 0;
  std::uint64_t sample_seed = 0;
  bool sample_audit = false;
  sample->add_option("--spec", sample_spec, "measure spec")->required();
  sample->add_option("--n", sample_n, "prefix length")->required();
  sample->add_option("--seed", sample_seed, "generator seed")->required();
  sample->add_flag("--audit", sample_audit, "print the per-bit generator-bit transcript");

  // verify
  auto* verify = app.add_subcommand("verify", "re-derive every exact claim of a report");
  std::string verify_path;
  verify->add_option("report", verify_path, "report JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (family->parsed()) return cmd_family_list();
    if (meval->parsed()) return cmd_measure_eval(meval_spec, meval_sigma);
    if (rho->parsed()) return cmd_rho(rho_a, rho_b, rho_M);
    if (lrun->parsed()) return cmd_learner_run(lrun_spec, lrun_input, lrun_budget, lrun_csv);
    if (adversary->parsed()) {
      const std::string verb = adversary->get_subcommands().front()->get_name();
      const std::string kind = verb == "diagonalize" ? "diagonal" : verb;
      return run_config(adv_config, adv_out, kind);
    }
    if (experiment->parsed()) return run_config(exp_config, exp_out, "");
    if (sample->parsed()) return cmd_sample(sample_spec, sample_n, sample_seed, sample_audit);
    if (verify->parsed()) return cmd_verify(verify_path);
  } catch (const HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << "\n";
    return kExitValidation;
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitInconclusive;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
