#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "linten/f2/spectrum.hpp"
#include "linten/harness/report.hpp"
#include "linten/harness/stats.hpp"
#include "linten/oracle/adversaries.hpp"
#include "linten/oracle/profile.hpp"
#include "linten/oracle/session.hpp"
#include "linten/testers/f2_testers.hpp"

namespace linten {

struct ExperimentConfig {
  std::string tester;  // blr3 | kpoint | online | sample | auto

  std::string instance_type = "linear";  // linear | far | implicit-linear | file
  int n = 0;
  double eps_far = 0.0;  // far instances: flipped fraction, exact distance
  std::string instance_path;

  std::string adversary = "null";  // null | pair_eraser | subset_eraser
  ManipulationKind kind = ManipulationKind::Erasure;
  BudgetRate rate = BudgetRate::FixedRate;
  double t = 0.0;
  int batch_size = 0;  // subset_eraser; 0 derives from the tester's batch
  int period = 0;      // subset_eraser; 0 derives batch_size + 1

  double eps = 0.1;
  int k = 4;  // kpoint only
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig from_file(const std::string& path);

  std::string instance_descriptor() const {
    std::ostringstream os;
    os << instance_type << "(n=" << n;
    if (instance_type == "far") os << ",eps=" << detail::fmt_double(eps_far);
    if (instance_type == "file") os << ",path=" << instance_path;
    os << ")";
    return os.str();
  }

  std::string adversary_descriptor() const {
    if (adversary == "null") return "null";
    std::ostringstream os;
    os << adversary << "(" << (kind == ManipulationKind::Erasure ? "erasure" : "corruption")
       << "," << (rate == BudgetRate::FixedRate ? "fixed" : "budget")
       << ",t=" << detail::fmt_double(t) << ")";
    return os.str();
  }
};

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.tester = j.at("tester").get<std::string>();
  const auto& inst = j.at("instance");
  c.instance_type = inst.value("type", std::string("linear"));
  c.n = inst.value("n", 0);
  c.eps_far = inst.value("eps_far", 0.0);
  c.instance_path = inst.value("path", std::string());
  if (j.contains("adversary")) {
    const auto& adv = j.at("adversary");
    c.adversary = adv.value("name", std::string("null"));
    const std::string kind = adv.value("kind", std::string("erasure"));
    if (kind == "erasure")
      c.kind = ManipulationKind::Erasure;
    else if (kind == "corruption")
      c.kind = ManipulationKind::Corruption;
    else
      throw std::invalid_argument("config: adversary.kind must be erasure or corruption");
    const std::string rate = adv.value("rate", std::string("fixed"));
    if (rate == "fixed")
      c.rate = BudgetRate::FixedRate;
    else if (rate == "budget")
      c.rate = BudgetRate::BudgetManaging;
    else
      throw std::invalid_argument("config: adversary.rate must be fixed or budget");
    c.t = adv.value("t", 0.0);
    c.batch_size = adv.value("batch_size", 0);
    c.period = adv.value("period", 0);
  }
  if (j.contains("params")) {
    const auto& p = j.at("params");
    c.eps = p.value("eps", 0.1);
    c.k = p.value("k", 4);
  }
  c.trials = j.at("trials").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.output = j.value("output", std::string());
  c.format = j.value("format", std::string("json"));
  return c;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

inline int harness_threads() {
  if (const char* env = std::getenv("LINTEN_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

namespace detail {

struct TrialAggregate {
  std::int64_t accepts = 0;
  std::int64_t rejects = 0;
  std::int64_t iterations = 0;
  std::int64_t iterations_with_erasure = 0;
  std::int64_t erasures_seen = 0;
  std::int64_t manipulated_hits = 0;
  std::int64_t total_queries = 0;

  TrialAggregate& operator+=(const TrialAggregate& o) {
    accepts += o.accepts;
    rejects += o.rejects;
    iterations += o.iterations;
    iterations_with_erasure += o.iterations_with_erasure;
    erasures_seen += o.erasures_seen;
    manipulated_hits += o.manipulated_hits;
    total_queries += o.total_queries;
    return *this;
  }
};

/// Runs `fn(trial)` for every trial index, sharded over threads. Trials
/// carry counter-derived seeds, so sharding never changes the numbers;
/// partials are combined in shard order for a deterministic reduce.
template <typename Fn>
TrialAggregate run_trials(std::int64_t trials, Fn&& fn) {
  const int threads = std::min<std::int64_t>(harness_threads(), trials);
  if (threads <= 1) {
    TrialAggregate total;
    for (std::int64_t i = 0; i < trials; ++i) total += fn(i);
    return total;
  }
  std::vector<TrialAggregate> partial(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      TrialAggregate agg;
      for (std::int64_t i = w; i < trials; i += threads) agg += fn(i);
      partial[static_cast<std::size_t>(w)] = agg;
    });
  }
  for (auto& th : pool) th.join();
  TrialAggregate total;
  for (const auto& p : partial) total += p;
  return total;
}

template <typename Domain>
std::unique_ptr<AdversaryStrategy<Domain>> build_adversary(const ExperimentConfig& c) {
  if (c.adversary == "null") return adversary_null<Domain>();
  if (c.adversary == "pair_eraser") return adversary_pair_eraser<Domain>();
  if (c.adversary == "subset_eraser") {
    const int batch = c.batch_size > 0 ? c.batch_size : batch_size_m(c.eps, c.t);
    const int period = c.period > 0 ? c.period : batch + 1;
    return adversary_subset_eraser<Domain>(batch, period);
  }
  throw std::invalid_argument("config: unknown adversary '" + c.adversary + "'");
}

template <typename Domain>
TestOutcome<typename Domain::Point> dispatch_tester(const ExperimentConfig& c,
                                                    Session<Domain>& s) {
  using Point = typename Domain::Point;
  if (c.tester == "blr3") return blr3_repeated(s, c.eps);
  if (c.tester == "online") return online_linearity_tester(s, c.eps, c.t, false);
  if (c.tester == "sample") return gr_sample_tester(s, c.eps);
  if (c.tester == "auto") return doubly_optimal_tester(s, c.eps, c.t);
  if (c.tester == "kpoint") {
    // one trial = one k-point round; only a certified violation rejects
    TestOutcome<Point> out;
    out.iterations = 1;
    const RoundResult r = k_point_round(s, c.k);
    if (r == RoundResult::Fail) out.verdict = Verdict::Reject;
    if (r == RoundResult::ErasureSeen) out.iterations_with_erasure = 1;
    out.queries_used = s.queries_answered();
    return out;
  }
  throw std::invalid_argument("config: unknown tester '" + c.tester + "'");
}

template <typename Domain>
TrialAggregate run_all_trials(const ExperimentConfig& c, const Domain& domain) {
  return run_trials(c.trials, [&](std::int64_t trial) {
    TrialAggregate agg;
    Rng seeder = Rng::derive(c.seed, static_cast<std::uint64_t>(trial));
    AdversaryConfig ac(c.kind, c.rate, c.adversary == "null" ? 0.0 : c.t);
    Session<Domain> session(domain, ac, build_adversary<Domain>(c), seeder.next_u64());
    const auto out = dispatch_tester(c, session);
    if (out.accepted())
      ++agg.accepts;
    else
      ++agg.rejects;
    agg.iterations += out.iterations;
    agg.iterations_with_erasure += out.iterations_with_erasure;
    agg.erasures_seen += out.erasures_seen;
    agg.manipulated_hits += session.manipulated_hits();
    agg.total_queries += out.queries_used;
    return agg;
  });
}

inline void register_bounds(const ExperimentConfig& c, TrialReport& r) {
  const bool linear_instance =
      c.instance_type == "linear" || c.instance_type == "implicit-linear";
  if (linear_instance && (c.adversary == "null" || c.kind == ManipulationKind::Erasure)) {
    // a linear base under erasures must never be rejected
    r.bounds.push_back(BoundCheck::make("one-sided-acceptance", '>', 1.0, r.accept_ci));
  }
  if (c.instance_type == "far" && c.trials > 0) {
    const auto reject_ci = wilson_interval(r.rejects, c.trials);
    if (c.tester == "kpoint") {
      const double base = (1.0 - std::pow(1.0 - 2.0 * c.eps_far, c.k - 1)) / 2.0;
      const double slack = 3.0 * bound_sigma(base, c.trials);
      r.bounds.push_back(
          BoundCheck::make("k-point-detection-rate", '>', base - slack, reject_ci));
    } else {
      const double slack = 2.0 * bound_sigma(2.0 / 3.0, c.trials);
      r.bounds.push_back(
          BoundCheck::make("soundness-two-thirds", '>', 2.0 / 3.0 - slack, reject_ci));
    }
  }
  if ((c.tester == "online" || c.tester == "auto") && c.adversary != "null" &&
      c.kind == ManipulationKind::Erasure && r.iterations > 0) {
    const auto seen_ci = wilson_interval(r.iterations_with_erasure, r.iterations);
    const double slack = 3.0 * bound_sigma(3.0 / 64.0, r.iterations);
    r.bounds.push_back(
        BoundCheck::make("erasure-exposure-3-64", '<', 3.0 / 64.0 + slack, seen_ci));
  }
  if (c.tester == "sample" && c.adversary == "pair_eraser" && r.total_queries > 0 &&
      c.n <= 30) {
    // fraction of answers served from manipulated cells: <= t*q^2/2^n
    const double q = static_cast<double>(r.total_queries) / static_cast<double>(c.trials);
    const double delta = c.t * q * q / std::ldexp(1.0, c.n);
    const auto hit_ci = wilson_interval(r.manipulated_hits, r.total_queries);
    const double slack = 2.0 * bound_sigma(std::min(delta, 1.0), r.total_queries);
    r.bounds.push_back(BoundCheck::make("manipulated-hit-rate", '<', delta + slack, hit_ci));
  }
}

}  // namespace detail

/// Builds the instance, spawns `trials` independent sessions with
/// counter-derived seeds, aggregates, and evaluates every bound check
/// registered for the tester/instance/adversary combination.
inline TrialReport run_experiment(const ExperimentConfig& c) {
  if (c.trials <= 0) throw std::invalid_argument("config: trials must be >= 1");
  if (c.tester.empty()) throw std::invalid_argument("config: tester missing");

  detail::TrialAggregate agg;
  // instance randomness comes from a stream no trial can collide with
  Rng inst_rng = Rng::derive(c.seed, 0xFEEDFACEFEEDFACEULL);

  if (c.instance_type == "implicit-linear") {
    if (c.n < 1) throw std::invalid_argument("config: implicit-linear needs n >= 1");
    ImplicitLinearDomain domain(random_wide_point(c.n, inst_rng));
    agg = detail::run_all_trials(c, domain);
  } else {
    BoolFn f = [&]() -> BoolFn {
      if (c.instance_type == "linear") {
        if (c.n < 1 || c.n > 30) throw std::invalid_argument("config: n out of [1,30]");
        const std::uint64_t mask = (std::uint64_t{1} << c.n) - 1;
        return LinearFn(c.n, static_cast<std::uint32_t>(inst_rng.next_u64() & mask))
            .materialize();
      }
      if (c.instance_type == "far") {
        if (c.n < 1 || c.n > 30) throw std::invalid_argument("config: n out of [1,30]");
        const std::int64_t flips = static_cast<std::int64_t>(
            std::llround(c.eps_far * std::ldexp(1.0, c.n)));
        return make_far_function(c.n, flips, inst_rng);
      }
      if (c.instance_type == "file") {
        std::ifstream in(c.instance_path);
        if (!in) throw std::invalid_argument("config: cannot open " + c.instance_path);
        return BoolFn::deserialize(in);
      }
      throw std::invalid_argument("config: unknown instance type '" + c.instance_type + "'");
    }();
    TableDomain domain(std::move(f));
    agg = detail::run_all_trials(c, domain);
  }

  TrialReport r;
  r.tester = c.tester;
  r.instance = c.instance_descriptor();
  r.adversary = c.adversary_descriptor();
  r.trials = c.trials;
  r.seed = c.seed;
  r.accepts = agg.accepts;
  r.rejects = agg.rejects;
  r.iterations = agg.iterations;
  r.iterations_with_erasure = agg.iterations_with_erasure;
  r.erasures_seen = agg.erasures_seen;
  r.manipulated_hits = agg.manipulated_hits;
  r.total_queries = agg.total_queries;
  r.mean_queries = static_cast<double>(agg.total_queries) / static_cast<double>(c.trials);
  r.accept_ci = wilson_interval(agg.accepts, c.trials);
  detail::register_bounds(c, r);
  return r;
}

// ---------------------------------------------------------------------------
// Blinding demonstration: an over-budget corruption adversary makes the
// tester unable to distinguish the zero function from a function that is
// exactly eps-far from linear.

struct ImpossibilityReport {
  int n = 0;
  double eps = 0;
  double t = 0;           // ceil(20 eps^2 2^n)
  std::int64_t ell = 0;   // eps * 2^n manipulated cells
  std::int64_t m0 = 0;    // ceil(1/(20 eps)) queries to finish the blind
  bool blind_completed_within_m0 = false;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  WilsonInterval accept_base_adv;   // zero function, blinding adversary
  WilsonInterval accept_far_adv;    // eps-far function, blinding adversary
  WilsonInterval accept_base_null;  // zero function, no adversary
  WilsonInterval accept_far_null;   // eps-far function, no adversary
  double gap_adv = 0;
  double gap_adv_halfwidth = 0;
  double gap_null = 0;
  double gap_null_halfwidth = 0;
  std::vector<BoundCheck> bounds;
  std::string note =
      "demonstrative: exhibits the blinding effect against this repository's tester, "
      "not a proof over all testers";

  bool all_bounds_pass() const {
    for (const auto& b : bounds) {
      if (!b.pass) return false;
    }
    return true;
  }
};

namespace detail {

inline WilsonInterval accept_rate_cell(
    const BoolFn& base, std::int64_t trials, std::uint64_t seed, std::uint64_t stream,
    double eps, double t, bool with_adversary, const std::vector<PointF2>& targets,
    const std::vector<std::uint8_t>& values) {
  std::int64_t accepts = 0;
  const detail::TrialAggregate agg = run_trials(trials, [&](std::int64_t trial) {
    TrialAggregate a;
    Rng seeder = Rng::derive(seed ^ stream, static_cast<std::uint64_t>(trial));
    auto strategy = with_adversary
                        ? adversary_dprime<TableDomain>(targets,
                                                        ManipulationKind::Corruption, values)
                        : adversary_null<TableDomain>();
    AdversaryConfig ac(ManipulationKind::Corruption, BudgetRate::FixedRate,
                       with_adversary ? t : 0.0);
    TableSession s(TableDomain(base), ac, std::move(strategy), seeder.next_u64());
    const auto out = online_linearity_tester(s, eps, t, /*enforce_case1=*/false);
    if (out.accepted()) ++a.accepts;
    return a;
  });
  accepts = agg.accepts;
  return wilson_interval(accepts, trials);
}

}  // namespace detail

/// The blinding construction: base g = the zero function; f differs from g
/// on the half-space x_1 = 0; the manipulated set is the ell least-queried
/// points of that half-space under the tester's own null-adversary query
/// profile; the adversary pins those cells to g's values as soon as budget
/// allows. With t >= 20 eps^2 2^n the blind completes before the tester's
/// early queries can separate the two runs.
inline ImpossibilityReport impossibility_demo(int n, double eps, std::int64_t trials,
                                              std::uint64_t seed,
                                              int profile_trials = 2000) {
  if (n < 2 || n > 24) throw std::invalid_argument("impossibility_demo: n out of [2,24]");
  const double full = std::ldexp(1.0, n);
  const double ell_real = eps * full;
  if (std::fabs(ell_real - std::llround(ell_real)) > 1e-9)
    throw std::invalid_argument("impossibility_demo: eps*2^n must be integral");
  if (trials <= 0) throw std::invalid_argument("impossibility_demo: trials must be >= 1");

  ImpossibilityReport rep;
  rep.n = n;
  rep.eps = eps;
  rep.ell = std::llround(ell_real);
  rep.t = std::ceil(20.0 * eps * eps * full);
  rep.m0 = static_cast<std::int64_t>(std::ceil(0.5 / (10.0 * eps)));
  rep.trials = trials;
  rep.seed = seed;

  BoolFn g = BoolFn(n, std::vector<std::uint8_t>(static_cast<std::size_t>(full), 0));

  // query-placement profile of the tester itself, null adversary
  const auto tester_fn = [eps, t = rep.t](TableSession& s) {
    online_linearity_tester(s, eps, t, /*enforce_case1=*/false);
  };
  const auto freq = profile_query_frequencies(tester_fn, g, profile_trials,
                                              static_cast<int>(rep.m0), seed ^ 0x9e37ULL);

  // disagreement half-space of f = 1 xor x_1, then its ell least-queried points
  std::vector<std::uint32_t> dset;
  for (std::uint32_t idx = 0; idx < static_cast<std::uint32_t>(full); ++idx) {
    if ((idx & 1u) == 0) dset.push_back(idx);
  }
  std::stable_sort(dset.begin(), dset.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (freq[a] != freq[b]) return freq[a] < freq[b];
    return a < b;
  });
  dset.resize(static_cast<std::size_t>(rep.ell));

  std::vector<PointF2> targets;
  std::vector<std::uint8_t> pin_values;  // g's values on the targets
  std::vector<std::uint8_t> far_table(static_cast<std::size_t>(full), 0);
  for (auto idx : dset) {
    targets.emplace_back(n, idx);
    pin_values.push_back(0);
    far_table[idx] = 1;
  }
  BoolFn g_far(n, std::move(far_table));

  // arithmetic and empirical check that the blind finishes within m0 queries
  {
    Rng probe_rng(Rng::derive(seed, 0xB11DULL).next_u64());
    AdversaryConfig ac(ManipulationKind::Corruption, BudgetRate::FixedRate, rep.t);
    TableSession probe(TableDomain(g_far), ac,
                       adversary_dprime<TableDomain>(targets, ManipulationKind::Corruption,
                                                     pin_values),
                       probe_rng.next_u64());
    for (std::int64_t i = 0; i < rep.m0; ++i) probe.query(random_point(n, probe_rng));
    rep.blind_completed_within_m0 =
        probe.manipulations_applied() >= rep.ell - rep.m0 &&
        static_cast<double>(rep.m0) * rep.t >= static_cast<double>(rep.ell);
  }

  rep.accept_base_adv = detail::accept_rate_cell(g, trials, seed, 0xA1, eps, rep.t, true,
                                                 targets, pin_values);
  rep.accept_far_adv = detail::accept_rate_cell(g_far, trials, seed, 0xA2, eps, rep.t, true,
                                                targets, pin_values);
  rep.accept_base_null = detail::accept_rate_cell(g, trials, seed, 0xA3, eps, rep.t, false,
                                                  targets, pin_values);
  rep.accept_far_null = detail::accept_rate_cell(g_far, trials, seed, 0xA4, eps, rep.t,
                                                 false, targets, pin_values);

  auto gap = [&](const WilsonInterval& a, const WilsonInterval& b, double& out,
                 double& half) {
    out = std::fabs(a.point - b.point);
    const double sa = proportion_sigma(a.point, trials);
    const double sb = proportion_sigma(b.point, trials);
    half = kZ95 * std::sqrt(sa * sa + sb * sb);
  };
  gap(rep.accept_base_adv, rep.accept_far_adv, rep.gap_adv, rep.gap_adv_halfwidth);
  gap(rep.accept_base_null, rep.accept_far_null, rep.gap_null, rep.gap_null_halfwidth);

  {
    WilsonInterval blinded{rep.gap_adv, std::max(0.0, rep.gap_adv - rep.gap_adv_halfwidth),
                           std::min(1.0, rep.gap_adv + rep.gap_adv_halfwidth)};
    WilsonInterval control{rep.gap_null,
                           std::max(0.0, rep.gap_null - rep.gap_null_halfwidth),
                           std::min(1.0, rep.gap_null + rep.gap_null_halfwidth)};
    rep.bounds.push_back(BoundCheck::make("blinded-gap", '<', 0.15, blinded));
    rep.bounds.push_back(BoundCheck::make("control-gap", '>', 1.0 / 3.0, control));
  }
  return rep;
}

inline std::string emit_impossibility_json(const ImpossibilityReport& r) {
  using detail::fmt_double;
  std::ostringstream os;
  os << "{\n";
  os << "  \"n\": " << r.n << ",\n";
  os << "  \"eps\": " << fmt_double(r.eps) << ",\n";
  os << "  \"t\": " << fmt_double(r.t) << ",\n";
  os << "  \"ell\": " << r.ell << ",\n";
  os << "  \"m0\": " << r.m0 << ",\n";
  os << "  \"blind_completed_within_m0\": " << (r.blind_completed_within_m0 ? "true" : "false")
     << ",\n";
  os << "  \"trials\": " << r.trials << ",\n";
  os << "  \"seed\": " << r.seed << ",\n";
  auto cell = [&](const char* name, const WilsonInterval& w) {
    os << "  \"" << name << "\": " << fmt_double(w.point) << ",\n";
  };
  cell("accept_base_adv", r.accept_base_adv);
  cell("accept_far_adv", r.accept_far_adv);
  cell("accept_base_null", r.accept_base_null);
  cell("accept_far_null", r.accept_far_null);
  os << "  \"gap_adv\": " << fmt_double(r.gap_adv) << ",\n";
  os << "  \"gap_adv_halfwidth\": " << fmt_double(r.gap_adv_halfwidth) << ",\n";
  os << "  \"gap_null\": " << fmt_double(r.gap_null) << ",\n";
  os << "  \"gap_null_halfwidth\": " << fmt_double(r.gap_null_halfwidth) << ",\n";
  os << "  \"note\": \"" << detail::json_escape(r.note) << "\",\n";
  os << "  \"bounds\": [";
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    const auto& b = r.bounds[i];
    os << (i ? ",\n    " : "\n    ");
    os << "{\"name\": \"" << detail::json_escape(b.name) << "\", \"direction\": \""
       << (b.direction == '>' ? ">=" : "<=") << "\", \"bound\": " << fmt_double(b.bound)
       << ", \"empirical\": " << fmt_double(b.empirical)
       << ", \"ci_lo\": " << fmt_double(b.ci_lo) << ", \"ci_hi\": " << fmt_double(b.ci_hi)
       << ", \"pass\": " << (b.pass ? "true" : "false") << "}";
  }
  os << (r.bounds.empty() ? "]\n" : "\n  ]\n");
  os << "}\n";
  return os.str();
}

}  // namespace linten
