#pragma once

// The command layer behind the logsob tool: a run configuration (from a JSON
// file, overridden by flags) and one function per subcommand. Each command
// produces a machine-readable report (JSON or CSV) and a short summary.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "logsob/error.hpp"
#include "logsob/extremals.hpp"
#include "logsob/functionals.hpp"
#include "logsob/io.hpp"
#include "logsob/lemma_suite.hpp"
#include "logsob/minimizer.hpp"
#include "logsob/monomial.hpp"
#include "logsob/norms.hpp"
#include "logsob/quadrature.hpp"
#include "logsob/tensorization.hpp"

namespace logsob {

enum class Command { constants, verify_lemmas, deficit, tensorize, minimize };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::constants:
      return "constants";
    case Command::verify_lemmas:
      return "verify-lemmas";
    case Command::deficit:
      return "deficit";
    case Command::tensorize:
      return "tensorize";
    case Command::minimize:
      return "minimize";
  }
  return "?";
}

inline Command parse_command(const std::string& s) {
  for (Command c : {Command::constants, Command::verify_lemmas, Command::deficit, Command::tensorize,
                    Command::minimize}) {
    if (s == to_string(c)) return c;
  }
  if (s == "verify_lemmas") return Command::verify_lemmas;
  throw ConfigError("unknown command \"" + s + "\"");
}

/// A test function for the deficit command: kind plus named parameters.
///   extremal               sigma
///   stretched_exponential  q, sigma
///   perturbed              sigma, eps: the extremal times 1 + eps cos(|x - c|)
struct FunctionSpec {
  std::string kind = "extremal";
  std::map<std::string, double> params;
  std::vector<double> center;  ///< empty: origin

  double get(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
};

/// "kind" or "kind:key=value,key=value".
inline FunctionSpec parse_function(const std::string& s) {
  FunctionSpec f;
  const auto colon = s.find(':');
  f.kind = s.substr(0, colon);
  if (colon == std::string::npos) return f;
  std::stringstream rest(s.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("function: expected key=value, got \"" + item + "\"");
    try {
      f.params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("function: bad value in \"" + item + "\"");
    }
  }
  return f;
}

inline FunctionSpec function_from_json(const json& j) {
  if (j.is_string()) return parse_function(j.get<std::string>());
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("function: expected an object with a \"kind\"");
  FunctionSpec f;
  f.kind = j.at("kind").get<std::string>();
  for (const auto& [k, v] : j.items()) {
    if (k == "kind") continue;
    if (k == "center") {
      f.center = v.get<std::vector<double>>();
    } else {
      f.params[k] = detail::read_number(v, "function." + k);
    }
  }
  return f;
}

inline json to_json(const FunctionSpec& f) {
  json j{{"kind", f.kind}};
  for (const auto& [k, v] : f.params) j[k] = v;
  if (!f.center.empty()) j["center"] = f.center;
  return j;
}

struct RunConfig {
  Command command = Command::constants;
  double p = 2.0;
  std::vector<double> A = {0.0};
  NormSpec norm = NormSpec::euclidean();
  QuadratureSpec quadrature;
  std::string output_path;  ///< empty: report on stdout only
  std::uint64_t seed = 1;
  double l_max = 1e6;
  FunctionSpec function;
  std::string family = "stretched_exponential";
  int knots = 8;
  int starts = 0;  ///< extra seeded random starts for minimize
  int max_iters = 2000;
};

/// Fields missing from `j` keep their value in `base`.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    if (j.contains("command")) base.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("p")) base.p = detail::read_number(j.at("p"), "p");
    if (j.contains("A")) base.A = j.at("A").get<std::vector<double>>();
    if (j.contains("norm")) base.norm = norm_from_json(j.at("norm"));
    if (j.contains("quadrature")) base.quadrature = quadrature_from_json(j.at("quadrature"), base.quadrature);
    if (j.contains("output_path")) base.output_path = j.at("output_path").get<std::string>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("l_max")) base.l_max = detail::read_number(j.at("l_max"), "l_max");
    if (j.contains("function")) base.function = function_from_json(j.at("function"));
    if (j.contains("family")) {
      const json& fam = j.at("family");
      if (fam.is_string()) {
        base.family = fam.get<std::string>();
      } else {
        base.family = fam.at("kind").get<std::string>();
        if (fam.contains("knots")) base.knots = fam.at("knots").get<int>();
      }
    }
    if (j.contains("starts")) base.starts = j.at("starts").get<int>();
    if (j.contains("max_iters")) base.max_iters = j.at("max_iters").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return config_from_json(j, base);
}

inline json to_json(const RunConfig& c) {
  return json{{"command", to_string(c.command)},
              {"p", c.p},
              {"A", c.A},
              {"norm", to_json(c.norm)},
              {"quadrature", to_json(c.quadrature)},
              {"seed", c.seed}};
}

/// "1,0.5,2" -> {1, 0.5, 2}.
inline std::vector<double> parse_exponents(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--A: bad entry \"" + item + "\"");
    }
  }
  if (out.empty()) throw ConfigError("--A: empty list");
  return out;
}

struct CommandOutput {
  int exit_code = 0;
  std::string report;   ///< JSON or CSV
  std::string summary;  ///< human-readable, a few lines
};

namespace detail {

inline MonomialWeight weight_of(const RunConfig& c) {
  for (double a : c.A) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("A: exponents must be finite and >= 0");
  }
  if (c.A.empty()) throw ConfigError("A: empty exponent vector");
  return MonomialWeight(c.A);
}

inline void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must be a finite number > 1");
}

inline std::string fixed(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline ScalarField build_function(const FunctionSpec& f, double p, const MonomialWeight& w, const NormSpec& norm) {
  std::vector<double> c = f.center;
  if (c.empty()) c.assign(w.n(), 0.0);
  if (c.size() != w.n()) throw ConfigError("function: center has wrong dimension");
  if (!w.admissible(c)) throw ConfigError("function: center must vanish where A_i > 0");
  for (const auto& [k, v] : f.params) {
    if (k != "sigma" && k != "q" && k != "eps") throw ConfigError("function: unknown parameter \"" + k + "\"");
  }
  const double sigma = f.get("sigma", 1.0);
  if (!(sigma > 0.0)) throw ConfigError("function: sigma must be positive");
  if (f.kind == "extremal") return make_log_sobolev_extremal(p, sigma, c, w, norm);
  if (f.kind == "stretched_exponential") {
    const double q = f.get("q", hoelder_conjugate(p));
    if (!(q > 1.0)) throw ConfigError("function: q must be > 1");
    const ProfileFamily fam = ProfileFamily::stretched_exponential(w.n());
    std::vector<double> theta = {q, std::log(sigma)};
    theta.insert(theta.end(), c.begin(), c.end());
    return fam.field(theta, w, norm);
  }
  if (f.kind == "perturbed") {
    const double eps = f.get("eps", 0.2);
    if (!(std::abs(eps) < 1.0)) throw ConfigError("function: |eps| must be < 1");
    auto base = std::make_shared<const ExtremalProfile>(log_sobolev_extremal_profile(p, sigma, c, w, norm));
    ScalarField g = base->field();
    g.eval = [base, eps](std::span<const double> x) {
      double r2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - base->center[i]) * (x[i] - base->center[i]);
      return (*base)(x) * (1.0 + eps * std::cos(std::sqrt(r2)));
    };
    g.grad = nullptr;
    return g;
  }
  throw ConfigError("function: unknown kind \"" + f.kind + "\" (extremal, stretched_exponential, perturbed)");
}

}  // namespace detail

inline CommandOutput cmd_constants(const RunConfig& c) {
  detail::check_p(c.p);
  const MonomialWeight w = detail::weight_of(c);
  json j;
  j["p"] = c.p;
  j["A"] = c.A;
  j["n"] = w.n();
  j["D"] = w.D();
  j["norm"] = to_json(c.norm);
  j["Pi_A"] = w.pi_A();
  double log_m = log_weighted_ball_measure(c.norm, w);
  std::string source = "closed_form";
  if (std::isnan(log_m)) {
    log_m = std::log(weighted_ball_measure_by_quadrature(c.norm, w, 1e-10).value);
    source = "quadrature";
  }
  j["ball_measure"] = std::exp(log_m);
  j["ball_measure_source"] = source;
  const double lp = sharp_ls_constant_from_log_ball(c.p, w.D(), log_m);
  j["L_p"] = lp;
  std::string sobolev_note;
  if (!c.norm.is_euclidean()) {
    sobolev_note = "the Sobolev constant is tabulated for the Euclidean norm only";
  } else if (!(c.p < w.D())) {
    sobolev_note = "requires p < D";
  }
  if (sobolev_note.empty()) {
    j["C_pnA"] = sharp_sobolev_constant(c.p, w);
  } else {
    j["C_pnA"] = nullptr;
    j["C_pnA_omitted"] = sobolev_note;
  }
  CommandOutput out;
  out.report = j.dump(2) + "\n";
  out.summary = "A=" + w.describe() + " D=" + detail::fixed(w.D()) + " p=" + detail::fixed(c.p) +
                " norm=" + c.norm.describe() + "\n  Pi(A)=" + detail::fixed(w.pi_A()) +
                "  m(B_A)=" + detail::fixed(std::exp(log_m)) + " (" + source + ")\n  L_p=" + detail::fixed(lp) +
                (sobolev_note.empty() ? "  C_pnA=" + detail::fixed(sharp_sobolev_constant(c.p, w))
                                      : "  C_pnA omitted: " + sobolev_note) +
                "\n";
  return out;
}

/// Runs with the suite's own adaptive quadrature settings; the configured
/// quadrature spec does not apply.
inline CommandOutput cmd_verify_lemmas(const RunConfig&, const LemmaSuiteOptions& opt = {}) {
  const LemmaSuiteReport rep = run_lemma_suite(opt);
  CommandOutput out;
  out.report = to_json(rep, opt.rel_tol).dump(2) + "\n";
  std::map<std::string, std::pair<std::size_t, double>> by_lemma;
  for (const auto& r : rep.rows) {
    auto& e = by_lemma[r.lemma];
    ++e.first;
    e.second = std::max(e.second, r.rel_error);
  }
  std::ostringstream s;
  for (const auto& [name, e] : by_lemma) {
    s << "  " << name << ": " << e.first << " cases, worst rel error " << detail::fixed(e.second, 3) << "\n";
  }
  for (const auto& r : rep.rows) {
    if (!r.pass) s << "  FAIL " << r.lemma << " " << r.label << " rel error " << detail::fixed(r.rel_error, 3) << "\n";
  }
  s << (rep.all_pass() ? "all " : "") << rep.rows.size() - rep.failures() << "/" << rep.rows.size()
    << " closed forms match quadrature within " << detail::fixed(opt.rel_tol, 3) << "\n";
  out.summary = s.str();
  out.exit_code = rep.all_pass() ? 0 : 1;
  return out;
}

inline CommandOutput cmd_deficit(const RunConfig& c) {
  detail::check_p(c.p);
  const MonomialWeight w = detail::weight_of(c);
  const ScalarField f = detail::build_function(c.function, c.p, w, c.norm);
  const DeficitReport r = deficit(f, c.p, w, c.norm, c.quadrature);
  json j = to_json(c);
  j["function"] = to_json(c.function);
  j["result"] = to_json(r);
  CommandOutput out;
  out.report = j.dump(2) + "\n";
  out.summary = "deficit of " + c.function.kind + " on A=" + w.describe() + " p=" + detail::fixed(c.p) +
                ": " + detail::fixed(r.deficit, 6) + " (quadrature err " + detail::fixed(r.quadrature_err, 2) +
                ")\n  entropy=" + detail::fixed(r.entropy) + " energy=" + detail::fixed(r.energy) +
                " L_p=" + detail::fixed(r.constant) + "\n";
  return out;
}

inline CommandOutput cmd_tensorize(const RunConfig& c) {
  const MonomialWeight w = detail::weight_of(c);
  if (!(c.l_max >= 10.0) || !std::isfinite(c.l_max)) throw ConfigError("l-max must be a finite number >= 10");
  const auto rows = tensorized_constant_sequence(w, log_grid(10.0, c.l_max));
  std::ostringstream csv;
  write_csv(csv, rows);
  CommandOutput out;
  out.report = csv.str();
  const bool ok = errors_decreasing(rows);
  out.summary = "l C^2 -> L_2(A) = " + detail::fixed(rows.front().target) + " for A=" + w.describe() + "\n  l=" +
                detail::fixed(rows.back().l) + ": rel error " + detail::fixed(rows.back().rel_error, 3) +
                (ok ? ", decreasing along the grid\n" : ", NOT monotonically decreasing\n");
  out.exit_code = ok ? 0 : 1;
  return out;
}

inline CommandOutput cmd_minimize(const RunConfig& c) {
  detail::check_p(c.p);
  const MonomialWeight w = detail::weight_of(c);
  ProfileFamily fam;
  if (c.family == "stretched_exponential") {
    fam = ProfileFamily::stretched_exponential(w.n());
  } else if (c.family == "radial_spline") {
    if (c.knots < 3) throw ConfigError("family: radial_spline needs at least 3 knots");
    fam = ProfileFamily::radial_spline(w.n(), c.knots);
  } else {
    throw ConfigError("family: unknown kind \"" + c.family + "\" (stretched_exponential, radial_spline)");
  }
  if (c.starts < 0) throw ConfigError("starts must be >= 0");
  if (c.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  MinimizeOptions opts;
  opts.max_iters = c.max_iters;
  opts.quadrature = c.quadrature;
  MinimizeResult best = minimize_deficit(fam, c.p, w, c.norm, opts);
  for (const auto& start : random_starts(fam, static_cast<std::size_t>(c.starts), c.seed)) {
    opts.start = start;
    MinimizeResult r = minimize_deficit(fam, c.p, w, c.norm, opts);
    if (r.deficit_star < best.deficit_star) best = std::move(r);
  }
  json j = to_json(c);
  j["family"] = fam.name();
  if (fam.kind == ProfileFamily::Kind::radial_spline) j["knots"] = c.knots;
  j["starts"] = c.starts;
  j["result"] = to_json(best);
  CommandOutput out;
  out.report = j.dump(2) + "\n";
  std::ostringstream s;
  s << fam.name() << " on A=" << w.describe() << " p=" << detail::fixed(c.p) << ": deficit* "
    << detail::fixed(best.deficit_star, 3) << " after " << best.iterations << " iterations"
    << (best.converged ? "" : " (not converged)") << "\n";
  if (fam.kind == ProfileFamily::Kind::stretched_exponential) {
    s << "  q* = " << detail::fixed(best.theta_star[0], 6) << " (p' = " << detail::fixed(hoelder_conjugate(c.p), 6)
      << ")\n";
  }
  s << "  distance to the nearest extremal " << detail::fixed(best.distance_to_extremal, 3)
    << (best.conjectural ? " (general norm with weight: characterization not asserted)" : "") << "\n";
  out.summary = s.str();
  return out;
}

inline CommandOutput run_command(const RunConfig& c) {
  c.quadrature.validate();
  switch (c.command) {
    case Command::constants:
      return cmd_constants(c);
    case Command::verify_lemmas:
      return cmd_verify_lemmas(c);
    case Command::deficit:
      return cmd_deficit(c);
    case Command::tensorize:
      return cmd_tensorize(c);
    case Command::minimize:
      return cmd_minimize(c);
  }
  throw ConfigError("unknown command");
}

}  // namespace logsob
