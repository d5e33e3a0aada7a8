#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "linten/harness/stats.hpp"

namespace linten {

/// One named inequality checked against the run: `empirical (dir) bound`,
/// with the slack already folded into `bound`. The check passes only when
/// the confidence interval sits on the right side too.
struct BoundCheck {
  std::string name;
  char direction = '>';  // '>' for >=, '<' for <=
  double bound = 0;
  double empirical = 0;
  double ci_lo = 0;
  double ci_hi = 0;
  bool pass = false;

  static BoundCheck make(std::string name, char direction, double bound,
                         const WilsonInterval& w) {
    BoundCheck b;
    b.name = std::move(name);
    b.direction = direction;
    b.bound = bound;
    b.empirical = w.point;
    b.ci_lo = w.lo;
    b.ci_hi = w.hi;
    b.pass = direction == '>' ? (w.point >= bound && w.hi >= bound)
                              : (w.point <= bound && w.lo <= bound);
    return b;
  }
};

struct TrialReport {
  // config echo, so the report is self-describing
  std::string tester;
  std::string instance;
  std::string adversary;
  std::int64_t trials = 0;
  std::uint64_t seed = 0;
  std::string note;  // free-form label, e.g. "demonstrative"

  // aggregates
  std::int64_t accepts = 0;
  std::int64_t rejects = 0;
  std::int64_t iterations = 0;
  std::int64_t iterations_with_erasure = 0;
  std::int64_t erasures_seen = 0;
  std::int64_t manipulated_hits = 0;
  std::int64_t total_queries = 0;
  double mean_queries = 0;
  WilsonInterval accept_ci;

  std::vector<BoundCheck> bounds;

  bool all_bounds_pass() const {
    for (const auto& b : bounds) {
      if (!b.pass) return false;
    }
    return true;
  }
};

namespace detail {

/// 12 significant digits, locale-independent, byte-stable across replays.
inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Hand-rolled writer so field order and float formatting are pinned;
/// replaying a config must reproduce the report byte for byte.
inline std::string emit_report_json(const TrialReport& r) {
  using detail::fmt_double;
  using detail::json_escape;
  std::ostringstream os;
  os << "{\n";
  os << "  \"tester\": \"" << json_escape(r.tester) << "\",\n";
  os << "  \"instance\": \"" << json_escape(r.instance) << "\",\n";
  os << "  \"adversary\": \"" << json_escape(r.adversary) << "\",\n";
  os << "  \"trials\": " << r.trials << ",\n";
  os << "  \"seed\": " << r.seed << ",\n";
  os << "  \"note\": \"" << json_escape(r.note) << "\",\n";
  os << "  \"accepts\": " << r.accepts << ",\n";
  os << "  \"rejects\": " << r.rejects << ",\n";
  os << "  \"iterations\": " << r.iterations << ",\n";
  os << "  \"iterations_with_erasure\": " << r.iterations_with_erasure << ",\n";
  os << "  \"erasures_seen\": " << r.erasures_seen << ",\n";
  os << "  \"manipulated_hits\": " << r.manipulated_hits << ",\n";
  os << "  \"total_queries\": " << r.total_queries << ",\n";
  os << "  \"mean_queries\": " << fmt_double(r.mean_queries) << ",\n";
  os << "  \"accept_rate\": " << fmt_double(r.accept_ci.point) << ",\n";
  os << "  \"accept_ci_lo\": " << fmt_double(r.accept_ci.lo) << ",\n";
  os << "  \"accept_ci_hi\": " << fmt_double(r.accept_ci.hi) << ",\n";
  os << "  \"bounds\": [";
  for (std::size_t i = 0; i < r.bounds.size(); ++i) {
    const auto& b = r.bounds[i];
    os << (i ? ",\n    " : "\n    ");
    os << "{\"name\": \"" << json_escape(b.name) << "\", \"direction\": \""
       << (b.direction == '>' ? ">=" : "<=") << "\", \"bound\": " << fmt_double(b.bound)
       << ", \"empirical\": " << fmt_double(b.empirical)
       << ", \"ci_lo\": " << fmt_double(b.ci_lo) << ", \"ci_hi\": " << fmt_double(b.ci_hi)
       << ", \"pass\": " << (b.pass ? "true" : "false") << "}";
  }
  os << (r.bounds.empty() ? "]\n" : "\n  ]\n");
  os << "}\n";
  return os.str();
}

/// Fixed header row, one data row, then one `bound,...` row per check.
inline std::string emit_report_csv(const TrialReport& r) {
  using detail::fmt_double;
  std::ostringstream os;
  os << "tester,instance,adversary,trials,seed,accepts,rejects,iterations,"
        "iterations_with_erasure,erasures_seen,manipulated_hits,total_queries,"
        "mean_queries,accept_rate,accept_ci_lo,accept_ci_hi\n";
  os << r.tester << ',' << r.instance << ',' << r.adversary << ',' << r.trials << ','
     << r.seed << ',' << r.accepts << ',' << r.rejects << ',' << r.iterations << ','
     << r.iterations_with_erasure << ',' << r.erasures_seen << ',' << r.manipulated_hits
     << ',' << r.total_queries << ',' << fmt_double(r.mean_queries) << ','
     << fmt_double(r.accept_ci.point) << ',' << fmt_double(r.accept_ci.lo) << ','
     << fmt_double(r.accept_ci.hi) << '\n';
  for (const auto& b : r.bounds) {
    os << "bound," << b.name << ',' << (b.direction == '>' ? ">=" : "<=") << ','
       << fmt_double(b.bound) << ',' << fmt_double(b.empirical) << ','
       << fmt_double(b.ci_lo) << ',' << fmt_double(b.ci_hi) << ','
       << (b.pass ? "pass" : "fail") << '\n';
  }
  return os.str();
}

inline std::string emit_report(const TrialReport& r, const std::string& format) {
  if (format == "json") return emit_report_json(r);
  if (format == "csv") return emit_report_csv(r);
  throw std::invalid_argument("emit_report: unknown format '" + format + "'");
}

/// Inverse of emit_report_json, used by the round-trip checks.
inline TrialReport parse_report_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  TrialReport r;
  r.tester = j.at("tester").get<std::string>();
  r.instance = j.at("instance").get<std::string>();
  r.adversary = j.at("adversary").get<std::string>();
  r.trials = j.at("trials").get<std::int64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.note = j.at("note").get<std::string>();
  r.accepts = j.at("accepts").get<std::int64_t>();
  r.rejects = j.at("rejects").get<std::int64_t>();
  r.iterations = j.at("iterations").get<std::int64_t>();
  r.iterations_with_erasure = j.at("iterations_with_erasure").get<std::int64_t>();
  r.erasures_seen = j.at("erasures_seen").get<std::int64_t>();
  r.manipulated_hits = j.at("manipulated_hits").get<std::int64_t>();
  r.total_queries = j.at("total_queries").get<std::int64_t>();
  r.mean_queries = j.at("mean_queries").get<double>();
  r.accept_ci.point = j.at("accept_rate").get<double>();
  r.accept_ci.lo = j.at("accept_ci_lo").get<double>();
  r.accept_ci.hi = j.at("accept_ci_hi").get<double>();
  for (const auto& jb : j.at("bounds")) {
    BoundCheck b;
    b.name = jb.at("name").get<std::string>();
    b.direction = jb.at("direction").get<std::string>() == ">=" ? '>' : '<';
    b.bound = jb.at("bound").get<double>();
    b.empirical = jb.at("empirical").get<double>();
    b.ci_lo = jb.at("ci_lo").get<double>();
    b.ci_hi = jb.at("ci_hi").get<double>();
    b.pass = jb.at("pass").get<bool>();
    r.bounds.push_back(std::move(b));
  }
  return r;
}

}  // namespace linten
