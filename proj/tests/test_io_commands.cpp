#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "logsob/commands.hpp"
#include "logsob/io.hpp"

using namespace logsob;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "logsob_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LOGSOB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Io, NormRoundTrip) {
  const std::vector<NormSpec> norms = {NormSpec::euclidean(), NormSpec::q_norm(3.0), NormSpec::q_norm(INFINITY),
                                       NormSpec::diagonal_weighted({0.5, 2.0}, 1.5),
                                       NormSpec::product(NormSpec::q_norm(1.5), 3, 2.5)};
  const std::vector<double> x{0.3, -1.1, 0.7, 2.0, -0.4, 0.9};
  for (const NormSpec& nm : norms) {
    const NormSpec back = norm_from_json(json::parse(to_json(nm).dump()));
    EXPECT_EQ(to_json(back).dump(), to_json(nm).dump());
    const std::size_t n = nm.dimension() == 0 ? 3 : nm.dimension();
    const std::span<const double> xs(x.data(), n);
    EXPECT_EQ(back.norm(xs), nm.norm(xs)) << nm.describe();
  }
  EXPECT_EQ(norm_from_json(json("l2")).kind(), NormSpec::Kind::euclidean);
  EXPECT_THROW(norm_from_json(json{{"kind", "q"}}), ConfigError);
  EXPECT_THROW(norm_from_json(json{{"kind", "spherical"}}), ConfigError);
}

TEST(Io, QuadratureRoundTrip) {
  QuadratureSpec s;
  s.scheme = Scheme::adaptive;
  s.rel_tol = 3e-7;
  s.nodes_per_axis = 65;
  s.truncation_radius = 4.5;
  const QuadratureSpec back = quadrature_from_json(json::parse(to_json(s).dump()));
  EXPECT_EQ(to_json(back).dump(), to_json(s).dump());
  const QuadratureSpec partial = quadrature_from_json(json{{"rel_tol", 1e-5}}, s);
  EXPECT_EQ(partial.scheme, Scheme::adaptive);
  EXPECT_EQ(partial.rel_tol, 1e-5);
  EXPECT_THROW(quadrature_from_json(json{{"scheme", "simpson"}}), ConfigError);
}

TEST(Io, NonFiniteNumbersAsStrings) {
  DeficitReport r;
  r.deficit = NAN;
  r.energy = INFINITY;
  const json j = to_json(r);
  EXPECT_EQ(j["deficit"], "nan");
  EXPECT_EQ(j["energy"], "inf");
  EXPECT_EQ(detail::read_number(json("inf"), "x"), INFINITY);
  EXPECT_EQ(detail::read_number(json("2.5"), "x"), 2.5);
  EXPECT_THROW(detail::read_number(json("2.5x"), "x"), ConfigError);
}

TEST(Io, CsvEscaping) {
  std::ostringstream os;
  write_csv(os, std::vector<LandscapeCell>{{{2.0, 0.0}, 0.5, ""}, {{3.0, 1.0}, NAN, "bad, \"quoted\""}});
  const std::string s = os.str();
  EXPECT_NE(s.find("\"bad, \"\"quoted\"\"\""), std::string::npos) << s;
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}

TEST(Commands, ParseHelpers) {
  EXPECT_EQ(parse_exponents("1,0.5,2"), (std::vector<double>{1, 0.5, 2}));
  EXPECT_THROW(parse_exponents("1,x"), ConfigError);
  EXPECT_THROW(parse_exponents(""), ConfigError);
  const FunctionSpec f = parse_function("stretched_exponential:q=2.5,sigma=0.7");
  EXPECT_EQ(f.kind, "stretched_exponential");
  EXPECT_EQ(f.get("q", 0.0), 2.5);
  EXPECT_EQ(f.get("sigma", 0.0), 0.7);
  EXPECT_THROW(parse_function("extremal:sigma"), ConfigError);
  EXPECT_EQ(parse_command("verify_lemmas"), Command::verify_lemmas);
  EXPECT_THROW(parse_command("plot"), ConfigError);
}

TEST(Commands, ConfigPrecedence) {
  const auto path = scratch("precedence.json");
  write_file(path, R"({"command": "deficit", "p": 3, "A": [1, 0], "norm": {"kind": "q", "q": 3},
                       "quadrature": {"rel_tol": 1e-7}, "function": {"kind": "extremal", "sigma": 2}})");
  RunConfig base;
  base.seed = 9;
  const RunConfig c = load_config(path.string(), base);
  EXPECT_EQ(c.command, Command::deficit);
  EXPECT_EQ(c.p, 3.0);
  EXPECT_EQ(c.A, (std::vector<double>{1, 0}));
  EXPECT_EQ(c.norm.exponent(), 3.0);
  EXPECT_EQ(c.quadrature.rel_tol, 1e-7);
  EXPECT_EQ(c.function.get("sigma", 0.0), 2.0);
  EXPECT_EQ(c.seed, 9u);

  EXPECT_THROW(load_config(scratch("missing.json").string()), ConfigError);
  write_file(scratch("broken.json"), "{\"p\": ");
  EXPECT_THROW(load_config(scratch("broken.json").string()), ConfigError);
  EXPECT_THROW(config_from_json(json{{"p", "two"}}), ConfigError);
  EXPECT_THROW(config_from_json(json{{"A", "x"}}), ConfigError);
}

TEST(Commands, ConstantsReport) {
  RunConfig c;
  c.A = {2};
  const CommandOutput out = run_command(c);
  EXPECT_EQ(out.exit_code, 0);
  const json j = json::parse(out.report);
  EXPECT_NEAR(j["L_p"].get<double>(), sharp_ls_constant(2.0, MonomialWeight({2})), 1e-15);
  EXPECT_NEAR(j["ball_measure"].get<double>(), 1.0 / 3.0, 1e-15);
  EXPECT_TRUE(j["C_pnA"].is_number());

  c.A = {0};
  EXPECT_TRUE(json::parse(run_command(c).report)["C_pnA"].is_null());
  c.p = 0.5;
  EXPECT_THROW(run_command(c), ConfigError);
}

TEST(Commands, DeficitReport) {
  RunConfig c;
  c.command = Command::deficit;
  c.A = {1, 0};
  c.function = parse_function("extremal:sigma=0.8");
  c.function.center = {0.0, 0.4};
  json j = json::parse(run_command(c).report);
  EXPECT_NEAR(j["result"]["deficit"].get<double>(), 0.0, 1e-8);
  EXPECT_NEAR(j["result"]["mass"].get<double>(), 1.0, 1e-8);

  c.function = parse_function("stretched_exponential:q=3");
  EXPECT_GT(json::parse(run_command(c).report)["result"]["deficit"].get<double>(), 1e-3);
  c.function = parse_function("perturbed:eps=0.3");
  EXPECT_GT(json::parse(run_command(c).report)["result"]["deficit"].get<double>(), 1e-6);

  c.function = parse_function("extremal");
  c.function.center = {0.5, 0.0};
  EXPECT_THROW(run_command(c), ConfigError);
  c.function = parse_function("extremal:tau=1");
  EXPECT_THROW(run_command(c), ConfigError);
}

TEST(Commands, TensorizeCsv) {
  RunConfig c;
  c.command = Command::tensorize;
  c.A = {2};
  c.l_max = 1e4;
  const CommandOutput out = run_command(c);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_EQ(std::count(out.report.begin(), out.report.end(), '\n'), 5);
  c.l_max = 5;
  EXPECT_THROW(run_command(c), ConfigError);
}

TEST(Commands, MinimizeReport) {
  RunConfig c;
  c.command = Command::minimize;
  c.p = 3.0;
  c.starts = 2;
  c.quadrature.rel_tol = 1e-10;
  const json j = json::parse(run_command(c).report);
  EXPECT_NEAR(j["result"]["theta_star"][0].get<double>(), 1.5, 0.045);
  c.family = "polynomial";
  EXPECT_THROW(run_command(c), ConfigError);
}

TEST(Commands, Deterministic) {
  RunConfig c;
  c.command = Command::minimize;
  c.A = {1};
  c.starts = 2;
  c.seed = 7;
  EXPECT_EQ(run_command(c).report, run_command(c).report);
  c.command = Command::deficit;
  c.function = parse_function("perturbed:eps=0.1");
  EXPECT_EQ(run_command(c).report, run_command(c).report);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("constants --p 2 --A 2"), 0);
  EXPECT_EQ(run_cli("deficit --p 2 --A 1,0 --function extremal:sigma=2"), 0);
  EXPECT_EQ(run_cli("constants --p 0.5"), 2);
  EXPECT_EQ(run_cli("constants --A 1,x"), 2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli("constants --config /nonexistent/config.json"), 2);
  // tolerance the adaptive scheme cannot reach: runtime failure
  EXPECT_EQ(run_cli("deficit --scheme adaptive --rtol 1e-15"), 1);
}

TEST(Cli, ConfigFileAndOutput) {
  const auto cfg = scratch("cli.json");
  const auto out = scratch("cli_out.json");
  std::filesystem::remove(out);
  write_file(cfg, R"({"p": 3, "A": [0, 0], "norm": "euclidean"})");
  // the flag overrides the file
  ASSERT_EQ(run_cli("constants --config " + cfg.string() + " --p 1.5 --out " + out.string()), 0);
  const json j = json::parse(read_file(out));
  EXPECT_EQ(j["p"].get<double>(), 1.5);
  EXPECT_EQ(j["A"].size(), 2u);
}
