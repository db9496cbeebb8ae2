#pragma once

// JSON and CSV for configurations and reports.
//
// Norm descriptors:
//   {"kind": "euclidean"}
//   {"kind": "q", "q": 3}              q may be the string "inf"
//   {"kind": "weighted", "weights": [1, 2], "q": 2}
//   {"kind": "product", "base": {...}, "l": 2, "exponent": 2}

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "logsob/error.hpp"
#include "logsob/functionals.hpp"
#include "logsob/lemma_suite.hpp"
#include "logsob/minimizer.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"
#include "logsob/tensorization.hpp"

namespace logsob {

using json = nlohmann::ordered_json;

/// Parse error in a descriptor or config file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// JSON has no infinities or NaN: encode them as strings.
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double read_number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(what + ": expected a number");
}

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace detail

inline json to_json(const NormSpec& n) {
  json j;
  switch (n.kind()) {
    case NormSpec::Kind::euclidean:
      j["kind"] = "euclidean";
      break;
    case NormSpec::Kind::q_norm:
      j["kind"] = "q";
      j["q"] = detail::number(n.exponent());
      break;
    case NormSpec::Kind::diagonal_weighted:
      j["kind"] = "weighted";
      j["weights"] = std::vector<double>(n.weights().begin(), n.weights().end());
      j["q"] = detail::number(n.exponent());
      break;
    case NormSpec::Kind::product:
      j["kind"] = "product";
      j["base"] = to_json(n.base());
      j["l"] = n.copies();
      j["exponent"] = n.exponent();
      break;
  }
  return j;
}

inline NormSpec norm_from_json(const json& j) {
  if (j.is_string()) return norm_from_json(json{{"kind", j.get<std::string>()}});
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("norm: expected an object with a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean" || kind == "l2") return NormSpec::euclidean();
  if (kind == "q" || kind == "lq") {
    if (!j.contains("q")) throw ConfigError("norm: kind \"q\" needs \"q\"");
    return NormSpec::q_norm(detail::read_number(j.at("q"), "norm.q"));
  }
  if (kind == "weighted") {
    if (!j.contains("weights")) throw ConfigError("norm: kind \"weighted\" needs \"weights\"");
    const double q = j.contains("q") ? detail::read_number(j.at("q"), "norm.q") : 2.0;
    return NormSpec::diagonal_weighted(j.at("weights").get<std::vector<double>>(), q);
  }
  if (kind == "product") {
    if (!j.contains("base") || !j.contains("l") || !j.contains("exponent")) {
      throw ConfigError("norm: kind \"product\" needs \"base\", \"l\" and \"exponent\"");
    }
    return NormSpec::product(norm_from_json(j.at("base")), j.at("l").get<std::size_t>(),
                             detail::read_number(j.at("exponent"), "norm.exponent"));
  }
  throw ConfigError("norm: unknown kind \"" + kind + "\"");
}

inline json to_json(const QuadratureSpec& s) {
  return json{{"scheme", to_string(s.scheme)},
              {"nodes_per_axis", s.nodes_per_axis},
              {"truncation_radius", s.truncation_radius},
              {"rel_tol", s.rel_tol},
              {"abs_tol", s.abs_tol},
              {"max_subdivisions", s.max_subdivisions}};
}

/// Fields missing from `j` keep their value in `base`.
inline QuadratureSpec quadrature_from_json(const json& j, QuadratureSpec base = {}) {
  if (!j.is_object()) throw ConfigError("quadrature: expected an object");
  if (j.contains("scheme")) {
    try {
      base.scheme = parse_scheme(j.at("scheme").get<std::string>());
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("nodes_per_axis")) base.nodes_per_axis = j.at("nodes_per_axis").get<int>();
  if (j.contains("truncation_radius")) {
    base.truncation_radius = detail::read_number(j.at("truncation_radius"), "truncation_radius");
  }
  if (j.contains("rel_tol")) base.rel_tol = detail::read_number(j.at("rel_tol"), "rel_tol");
  if (j.contains("abs_tol")) base.abs_tol = detail::read_number(j.at("abs_tol"), "abs_tol");
  if (j.contains("max_subdivisions")) base.max_subdivisions = j.at("max_subdivisions").get<int>();
  return base;
}

inline json to_json(const DeficitReport& r) {
  return json{{"p", r.p},
              {"mass", detail::number(r.mass)},
              {"entropy", detail::number(r.entropy)},
              {"energy", detail::number(r.energy)},
              {"deficit", detail::number(r.deficit)},
              {"quadrature_err", detail::number(r.quadrature_err)},
              {"constant", detail::number(r.constant)}};
}

inline json to_json(const MinimizeResult& r) {
  return json{{"theta_star", detail::numbers(r.theta_star)},
              {"deficit_star", detail::number(r.deficit_star)},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"distance_to_extremal", detail::number(r.distance_to_extremal)},
              {"best_fit", detail::numbers(r.best_fit)},
              {"failed_evaluations", r.failed_evaluations},
              {"conjectural", r.conjectural}};
}

inline json to_json(const LemmaCheck& c) {
  return json{{"lemma", c.lemma},
              {"case", c.label},
              {"closed_form", detail::number(c.closed_form)},
              {"quadrature", detail::number(c.quadrature)},
              {"quadrature_err", detail::number(c.quadrature_err)},
              {"rel_error", detail::number(c.rel_error)},
              {"pass", c.pass}};
}

/// Everything but the wall-clock time, so that reports are reproducible.
inline json to_json(const LemmaSuiteReport& r, double rel_tol) {
  json rows = json::array();
  for (const auto& c : r.rows) rows.push_back(to_json(c));
  return json{{"rel_tol", rel_tol},
              {"cases", r.rows.size()},
              {"failures", r.failures()},
              {"worst_rel_error", detail::number(r.worst_rel_error())},
              {"pass", r.all_pass()},
              {"rows", rows}};
}

// ---- CSV ----

namespace detail {

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "l,value,target,rel_error\n";
  for (const auto& r : rows) {
    os << detail::csv_number(r.l) << ',' << detail::csv_number(r.value) << ',' << detail::csv_number(r.target) << ','
       << detail::csv_number(r.rel_error) << '\n';
  }
}

inline void write_csv(std::ostream& os, const std::vector<LandscapeCell>& cells) {
  const std::size_t width = cells.empty() ? 0 : cells.front().theta.size();
  for (std::size_t i = 0; i < width; ++i) os << "theta" << i << ',';
  os << "deficit,error\n";
  for (const auto& c : cells) {
    for (double t : c.theta) os << detail::csv_number(t) << ',';
    os << detail::csv_number(c.deficit) << ',' << detail::csv_field(c.error) << '\n';
  }
}

}  // namespace logsob
