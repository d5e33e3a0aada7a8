#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "linten/harness/experiment.hpp"
#include "linten/harness/real_experiment.hpp"

namespace {

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

// fn descriptors:
//   additive:c1,c2,...           exactly additive
//   affine:b;c1,c2,...           additive plus constant offset b
//   bump:h,z;c1,c2,...           additive plus jump h on x_1 > z
//   poly:n,d                     random degree-d polynomial (seeded)
//   polybump:n,d,h,z             random polynomial plus jump
linten::ZooEntry parse_fn(const std::string& spec, std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw CLI::ValidationError("--fn", "missing ':' in " + spec);
  const std::string name = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (name == "additive") return linten::zoo_additive(parse_doubles(rest));
  const auto semi = rest.find(';');
  if (name == "affine") {
    if (semi == std::string::npos) throw CLI::ValidationError("--fn", "affine needs b;coeffs");
    return linten::zoo_affine(parse_doubles(rest.substr(semi + 1)),
                              std::stod(rest.substr(0, semi)));
  }
  if (name == "bump") {
    if (semi == std::string::npos) throw CLI::ValidationError("--fn", "bump needs h,z;coeffs");
    const auto hz = parse_doubles(rest.substr(0, semi));
    if (hz.size() != 2) throw CLI::ValidationError("--fn", "bump needs h,z;coeffs");
    return linten::zoo_bump(parse_doubles(rest.substr(semi + 1)), hz[0], hz[1]);
  }
  if (name == "poly" || name == "polybump") {
    const auto args = parse_doubles(rest);
    if ((name == "poly" && args.size() != 2) || (name == "polybump" && args.size() != 4))
      throw CLI::ValidationError("--fn", name + " argument count");
    linten::Rng rng = linten::Rng::derive(seed, 0x90171ULL);
    auto poly = linten::zoo_random_poly(static_cast<int>(args[0]), static_cast<int>(args[1]),
                                       rng);
    if (name == "poly") return poly;
    return linten::zoo_poly_bump(std::move(poly), args[2], args[3]);
  }
  throw CLI::ValidationError("--fn", "unknown family '" + name + "'");
}

int finish(const linten::TrialReport& report, const std::string& output,
           const std::string& format) {
  const std::string text = linten::emit_report(report, format);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << output << "\n";
      return 2;
    }
    out << text;
  }
  return report.all_bounds_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linten: property-testing experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path, "config file (JSON)")->required();

  auto* demo = app.add_subcommand("demo", "built-in demonstrations");
  demo->require_subcommand(1);
  int demo_n = 12;
  double demo_eps = 0.125;
  std::int64_t demo_trials = 2000;
  std::uint64_t demo_seed = 1;
  int demo_profile_trials = 2000;
  auto* imp = demo->add_subcommand(
      "impossibility", "blinding adversary vs. the batch tester at over-budget t");
  imp->add_option("--n", demo_n, "dimension");
  imp->add_option("--eps", demo_eps, "distance parameter (eps*2^n must be integral)");
  imp->add_option("--trials", demo_trials, "trials per cell");
  imp->add_option("--seed", demo_seed, "master seed");
  imp->add_option("--profile-trials", demo_profile_trials, "runs for the query profile");

  auto* lt = app.add_subcommand("list-testers", "list tester names");
  auto* la = app.add_subcommand("list-adversaries", "list adversary names");

  std::string fn_spec, dist = "gaussian", output, format = "json";
  double eps = 0.1, tol_abs = 1e-9, tol_rel = 1e-9;
  std::int64_t trials = 1000;
  std::uint64_t seed = 1;
  int n6 = 20, n8 = 0, degree = 1;
  std::string expect = "none";
  auto add_real_flags = [&](CLI::App* cmd) {
    cmd->add_option("--fn", fn_spec, "function descriptor")->required();
    cmd->add_option("--dist", dist, "sampling distribution (gaussian)");
    cmd->add_option("--eps", eps, "distance parameter");
    cmd->add_option("--trials", trials, "number of trials");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("--tol-abs", tol_abs, "absolute tolerance");
    cmd->add_option("--tol-rel", tol_rel, "relative tolerance");
    cmd->add_option("--expect", expect,
                    "registered bound: structured | far | none");
    cmd->add_option("--output", output, "write report here instead of stdout");
    cmd->add_option("--format", format, "json | csv");
  };
  auto* ra = app.add_subcommand("real-additivity", "additivity tester over R^n");
  add_real_flags(ra);
  ra->add_option("--n6", n6, "characterization rounds");
  auto* ld = app.add_subcommand("low-degree", "degree-d tester over R^n");
  add_real_flags(ld);
  ld->add_option("--d", degree, "degree bound")->required();
  ld->add_option("--n8", n8, "characterization rounds (0 = ceil(8 d^2))");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help exits clean; bad usage is 2
  }

  try {
    if (lt->parsed()) {
      std::cout << "blr3\nkpoint\nonline\nsample\nauto\nreal-additivity\nlow-degree\n";
      return 0;
    }
    if (la->parsed()) {
      std::cout << "null\npair_eraser\nsubset_eraser\ndprime\n";
      return 0;
    }
    if (run->parsed()) {
      const auto cfg = linten::ExperimentConfig::from_file(config_path);
      const auto report = linten::run_experiment(cfg);
      return finish(report, cfg.output, cfg.format);
    }
    if (imp->parsed()) {
      const auto rep = linten::impossibility_demo(demo_n, demo_eps, demo_trials, demo_seed,
                                                  demo_profile_trials);
      std::cout << linten::emit_impossibility_json(rep);
      return rep.all_bounds_pass() ? 0 : 1;
    }
    if (ra->parsed() || ld->parsed()) {
      linten::RealExperimentConfig cfg;
      cfg.verb = ra->parsed() ? "additivity" : "low-degree";
      cfg.fn = parse_fn(fn_spec, seed);
      cfg.dist = dist;
      cfg.eps = eps;
      cfg.d = degree;
      cfg.rounds = ra->parsed() ? n6 : n8;
      cfg.trials = trials;
      cfg.seed = seed;
      cfg.tol = linten::Tolerance{tol_abs, tol_rel};
      if (expect == "structured")
        cfg.expectation = linten::RealExpectation::Structured;
      else if (expect == "far")
        cfg.expectation = linten::RealExpectation::Far;
      else if (expect == "none")
        cfg.expectation = linten::RealExpectation::None;
      else
        throw CLI::ValidationError("--expect", "must be structured, far, or none");
      const auto report = linten::run_real_experiment(cfg);
      return finish(report, output, format);
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
