// logsob: constants, lemma checks, deficits, tensorization tables and
// deficit minimization from the command line.
//
// Exit codes: 0 success, 1 verification or numerical failure, 2 usage/config error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "logsob/commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  double p = 0.0;
  std::string A;
  std::string norm;
  std::string q;
  int nodes = 0;
  double rtol = 0.0;
  double radius = 0.0;
  double l_max = 0.0;
  std::uint64_t seed = 0;
  std::string scheme;
  std::string function;
  std::string family;
  int knots = 0;
  int starts = 0;
  int max_iters = 0;
};

double parse_q(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double q = std::stod(s, &used);
    if (used == s.size()) return q;
  } catch (const std::exception&) {
  }
  throw logsob::ConfigError("--q: expected a number or \"inf\"");
}

logsob::RunConfig build_config(const CLI::App& app, const Flags& f, logsob::Command cmd) {
  using logsob::ConfigError;
  logsob::RunConfig c;
  if (!f.config.empty()) c = logsob::load_config(f.config);
  c.command = cmd;
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--p")) c.p = f.p;
  if (given("--A")) c.A = logsob::parse_exponents(f.A);
  if (given("--norm") || given("--q")) {
    const std::string kind = given("--norm") ? f.norm : "q";
    try {
      if (kind == "euclidean" || kind == "l2") {
        c.norm = logsob::NormSpec::euclidean();
      } else if (kind == "inf") {
        c.norm = logsob::NormSpec::q_norm(std::numeric_limits<double>::infinity());
      } else if (kind == "q") {
        if (!given("--q")) throw ConfigError("--norm q needs --q");
        c.norm = logsob::NormSpec::q_norm(parse_q(f.q));
      } else {
        throw ConfigError("--norm: expected euclidean, q or inf");
      }
    } catch (const logsob::DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (given("--nodes")) c.quadrature.nodes_per_axis = f.nodes;
  if (given("--rtol")) c.quadrature.rel_tol = f.rtol;
  if (given("--radius")) c.quadrature.truncation_radius = f.radius;
  if (given("--scheme")) {
    try {
      c.quadrature.scheme = logsob::parse_scheme(f.scheme);
    } catch (const logsob::DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (given("--l-max")) c.l_max = f.l_max;
  if (given("--seed")) c.seed = f.seed;
  if (given("--out")) c.output_path = f.out;
  if (given("--function")) c.function = logsob::parse_function(f.function);
  if (given("--family")) c.family = f.family;
  if (given("--knots")) c.knots = f.knots;
  if (given("--starts")) c.starts = f.starts;
  if (given("--max-iters")) c.max_iters = f.max_iters;
  try {
    c.quadrature.validate();
  } catch (const logsob::DomainError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp log-Sobolev constants, deficits and their numerical checks"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON run configuration; flags override it")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "write the report to this path as well");
  app.add_option("--p", f.p, "exponent p > 1");
  app.add_option("--A", f.A, "monomial exponents, comma separated (e.g. 1,0.5)");
  app.add_option("--norm", f.norm, "euclidean, q or inf");
  app.add_option("--q", f.q, "q of the l^q norm (number or inf)");
  app.add_option("--nodes", f.nodes, "initial nodes per half-line");
  app.add_option("--rtol", f.rtol, "quadrature relative tolerance");
  app.add_option("--radius", f.radius, "truncation radius (0: automatic)");
  app.add_option("--scheme", f.scheme, "quadrature scheme: tensor or adaptive");
  app.add_option("--l-max", f.l_max, "largest l in the tensorization table");
  app.add_option("--seed", f.seed, "seed for randomized starts");
  app.add_option("--function", f.function, "deficit test function, kind[:key=value,...]");
  app.add_option("--family", f.family, "minimize family: stretched_exponential or radial_spline");
  app.add_option("--knots", f.knots, "radial_spline knots");
  app.add_option("--starts", f.starts, "extra random starts for minimize");
  app.add_option("--max-iters", f.max_iters, "simplex iteration cap");

  const std::pair<const char*, const char*> subs[] = {
      {"constants", "Pi(A), m(B_A), L_p and C_pnA for (p, A, norm)"},
      {"verify-lemmas", "closed-form integrals against adaptive quadrature"},
      {"deficit", "log-Sobolev deficit of a test function"},
      {"tensorize", "convergence table of the tensorized constant (CSV)"},
      {"minimize", "Nelder-Mead search for deficit minimizers"},
  };
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const logsob::Command cmd = logsob::parse_command(app.get_subcommands().front()->get_name());
    const logsob::RunConfig cfg = build_config(app, f, cmd);
    const logsob::CommandOutput out = logsob::run_command(cfg);
    std::cout << out.summary << out.report;
    if (!cfg.output_path.empty()) {
      std::ofstream file(cfg.output_path);
      if (!file) {
        std::cerr << "error: cannot write " << cfg.output_path << "\n";
        return 2;
      }
      file << out.report;
    }
    return out.exit_code;
  } catch (const logsob::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const logsob::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const logsob::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
