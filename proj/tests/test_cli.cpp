#include <doctest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "whilecc/cli.hpp"
#include "whilecc/programs.hpp"

using namespace whilecc;

namespace {

int exit_status(const std::string& args) {
  std::string cmd = std::string(WHILECC_BIN) + " " + args + " > /dev/null 2>&1";
  int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

cli::RunConfig config(std::string program, std::string input) {
  cli::RunConfig cfg;
  cfg.program = std::move(program);
  cfg.input = std::move(input);
  return cfg;
}

std::string sweep_text(const cli::RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                       const std::vector<std::uint64_t>& ns, unsigned threads, int* status = nullptr) {
  std::ostringstream out;
  int s = cli::sweep(cfg, seeds, ns, out, threads);
  if (status) *status = s;
  return out.str();
}

int clusters(const std::string& report) {
  std::size_t at = report.find("census: ");
  if (at == std::string::npos) return -1;
  return std::stoi(report.substr(at + 8));
}

// Deviation column of each table row, in row order.
std::vector<double> deviations(const std::string& report) {
  std::vector<double> out;
  std::istringstream in(report);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string seed, n, status, dev;
    if (!(row >> seed >> n >> status >> dev) || status != "ok") continue;
    out.push_back(std::stod(dev));
  }
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parse_inputs") {
    ValueTuple v = cli::parse_inputs("(3, 1/2, [1, 0, -2], true)",
                                     {Sort::nat(), Sort::real(), Sort::real().star(), Sort::boolean()});
    REQUIRE(v.size() == 4);
    CHECK(v[0].as_nat() == 3);
    CHECK(v[1].as_real().exact() == Rational(1, 2));
    CHECK(v[2].as_array().items->size() == 3);
    CHECK(v[3].as_bool());

    ValueTuple d = cli::parse_inputs("0.25", {Sort::real()});
    CHECK(d[0].as_real().exact() == Rational(1, 4));

    ValueTuple c = cli::parse_inputs("sqrt2", {Sort::real()});
    CHECK_FALSE(c[0].as_real().is_exact());
    CHECK(abs(Rational(c[0].as_real().approx(20) - Rational(665857, 470832))) < pow2(-18));

    CHECK_THROWS_AS(cli::parse_inputs("(1, 2)", {Sort::nat()}), cli::UsageError);
    CHECK_THROWS_AS(cli::parse_inputs("2", {Sort::interval()}), cli::UsageError);
    CHECK_THROWS_AS(cli::parse_inputs("nonsense", {Sort::real()}), cli::UsageError);
  }

  TEST_CASE("run prints the exact partial sum") {
    cli::RunConfig cfg = config("exp_approx", "1");
    cfg.n = 4;
    std::ostringstream out;
    CHECK(cli::run(cfg, out) == 0);
    CHECK(oracles::exp_partial_sum(1, 4) ==
          Rational("28610550901763172837819811744646057/10525233477347741206688720486400000"));
    CHECK(out.str().find("28610550901763172837819811744646057/10525233477347741206688720486400000") !=
          std::string::npos);
    CHECK(out.str().find("divergent no") != std::string::npos);
  }

  TEST_CASE("run reports divergence") {
    cli::RunConfig cfg = config("pivot", "(0,0,0)");
    cfg.fuel = 1000;
    std::ostringstream out;
    CHECK(cli::run(cfg, out) == 2);
    CHECK(out.str().find("divergent maybe") != std::string::npos);
  }

  TEST_CASE("json-lines output is one object") {
    cli::RunConfig cfg = config("choose_near", "(1/3)");
    cfg.n = 4;
    cfg.format = cli::Format::JsonLines;
    std::ostringstream out;
    CHECK(cli::run(cfg, out) == 0);
    std::string s = out.str();
    CHECK(s.front() == '{');
    CHECK(s.find('\n') == s.size() - 1);
  }

  TEST_CASE("exit codes") {
    CHECK(exit_status("run exp_approx --n 4 --input 1") == 0);
    CHECK(exit_status("run pivot --input \"(0,0,0)\" --fuel 1000") == 2);
    CHECK(exit_status("run pivot --bogus") == 1);
    CHECK(exit_status("run no_such_program --input 1") == 1);
    CHECK(exit_status("run pivot --input \"(1,2)\"") == 1);
    CHECK(exit_status("run pivot --input \"(1,0,0)\" --strategy enumerate:8:1000") == 0);
    CHECK(exit_status("run " WHILECC_SOURCE_DIR "/programs/isqrt.wcc --input 50") == 0);
  }

  TEST_CASE("strategies and seeds") {
    cli::RunConfig cfg = config("pivot", "(1,1,0)");
    cfg.seed = 9;
    CHECK(cli::strategy_of(cfg).to_string() == ChoiceStrategy::dovetail(9).to_string());
    cfg.strategy = "oracle:2";
    CHECK(cli::strategy_of(cfg).kind == ChoiceStrategy::Kind::Oracle);
    cfg.strategy = "enumerate:8:1000";
    CHECK_THROWS_AS(cli::strategy_of(cfg), cli::UsageError);
  }

  TEST_CASE("parse_list") {
    CHECK(cli::parse_list("0..3") == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(cli::parse_list("5,1,9") == std::vector<std::uint64_t>{5, 1, 9});
  }

  TEST_CASE("sweeps are reproducible regardless of threads") {
    cli::RunConfig cfg = config("root_bisect_fa", "0");
    std::string a = sweep_text(cfg, cli::parse_list("0..7"), {1, 3}, 1);
    std::string b = sweep_text(cfg, cli::parse_list("0..7"), {1, 3}, 4);
    CHECK(a == b);
    cfg.format = cli::Format::JsonLines;
    CHECK(sweep_text(cfg, {3, 4}, {2}, 2) == sweep_text(cfg, {3, 4}, {2}, 1));
  }

  TEST_CASE("a choose-free program gives one cluster") {
    cli::RunConfig cfg = config("exp_approx", "1/2");
    CHECK(clusters(sweep_text(cfg, cli::parse_list("0..9"), {3}, 0)) == 1);
  }

  TEST_CASE("bisection on f_0 gives several clusters") {
    cli::RunConfig cfg = config("root_bisect_fa", "0");
    int status = -1;
    std::string report = sweep_text(cfg, cli::parse_list("0..49"), {3}, 0, &status);
    CHECK(status == 0);
    CHECK(clusters(report) >= 2);
  }

  TEST_CASE("deviation shrinks with n") {
    cli::RunConfig cfg = config("exp_approx", "3/4");
    std::vector<double> dev = deviations(sweep_text(cfg, {0}, cli::parse_list("1..10"), 0));
    REQUIRE(dev.size() == 10);
    for (std::size_t i = 0; i < dev.size(); ++i) {
      CHECK(dev[i] < std::ldexp(1.0, -static_cast<int>(i + 1)));
      if (i > 0) CHECK(dev[i] < dev[i - 1]);
    }

    cli::RunConfig bis = config("root_bisect_fa", "0");
    std::vector<double> bdev = deviations(sweep_text(bis, {0}, cli::parse_list("1..10"), 0));
    REQUIRE(bdev.size() == 10);
    for (std::size_t i = 0; i < bdev.size(); ++i) CHECK(bdev[i] < std::ldexp(1.0, -static_cast<int>(i + 1)));
  }
}
