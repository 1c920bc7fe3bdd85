#include <fstream>
#include <regex>

#include "doctest.h"
#include "json.hpp"
#include "subject_run.hpp"
#include "vprec/config.hpp"
#include "vprec/profile.hpp"

using namespace vprec;
using testing_support::run_captured;

namespace {

const std::string kCli = VPREC_TEST_CLI;
const std::string kOrbitCommand =
    std::string(VPREC_TEST_ORBIT) + " " + VPREC_TEST_DATA + "/orbit_elements.txt";

std::vector<std::string> explore_args(const std::filesystem::path& workdir,
                                      std::vector<std::string> extra = {}) {
  std::vector<std::string> args{kCli, "explore", "--subject", kOrbitCommand,
                                "--workdir", workdir.string(), "--tol-rel", "1e-6",
                                "--interposer", VPREC_TEST_INTERPOSER};
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

TEST_CASE("explore the orbit subject end to end") {
  const auto dir = testing_support::scratch_dir("cli-explore");
  const auto start = std::chrono::steady_clock::now();
  const auto run = run_captured(dir, explore_args(dir / "work", {"--trial-log", (dir / "t.log").string(),
                                                                  "--output-config", (dir / "o.cfg").string(),
                                                                  "--profile", (dir / "p.txt").string()}));
  const auto elapsed = std::chrono::steady_clock::now() - start;
  INFO(run.err);
  REQUIRE(run.status.exit_code == 0);
  CHECK(elapsed < std::chrono::minutes(10));

  const auto profile = load_profile(dir / "p.txt");
  const auto config = load_config(dir / "o.cfg");
  REQUIRE(config.entries.size() == profile.size());

  // Visit order is the profile's frequency order.
  for (std::size_t i = 0; i < profile.size(); ++i) CHECK(config.entries[i].id == profile[i].id);

  int total = 0;
  for (const auto& e : config.entries) {
    CHECK(e.mode == SiteMode::vprec);
    total += e.format.precision_bits();
    if (e.function == MathFunction::floor || e.function == MathFunction::fabs) {
      CHECK(e.format.precision_bits() <= 8);
    }
  }
  CHECK(total <= 0.8 * 52 * static_cast<double>(config.entries.size()));

  const std::regex line(R"(site=0x[0-9a-f]{16} p=\d+ verdict=(pass|fail) wall_ms=\d+)");
  std::ifstream log(dir / "t.log");
  std::size_t n = 0;
  for (std::string l; std::getline(log, l); ++n) CHECK(std::regex_match(l, line));
  CHECK(n > profile.size());

  const auto json = nlohmann::json::parse(read_file(dir / "work" / "exploration.json"));
  CHECK(json["validation_passed"] == true);
  for (const auto& site : json["sites"]) {
    CHECK(site["precision_trials"].get<int>() <= 7);
    REQUIRE(site.contains("certificate"));
    CHECK(site["certificate"]["holds"] == true);
  }

  SUBCASE("deterministic") {
    const auto again = run_captured(dir, explore_args(dir / "work2"));
    REQUIRE(again.status.exit_code == 0);
    CHECK(load_config(dir / "work2" / "optimized.cfg") == config);
  }
  SUBCASE("report") {
    const auto rep = run_captured(dir, {kCli, "report", "--profile", (dir / "p.txt").string(),
                                        "--config", (dir / "o.cfg").string(), "--top", "10",
                                        "--csv", (dir / "r.csv").string(), "--svg-dir",
                                        (dir / "svg").string()});
    REQUIRE(rep.status.exit_code == 0);
    std::ifstream csv(dir / "r.csv");
    std::size_t rows = 0;
    for (std::string l; std::getline(csv, l);) ++rows;
    CHECK(rows == 11);
    for (const char* svg : {"calls.svg", "dynamic_range.svg", "precision.svg"}) {
      CHECK(read_file(dir / "svg" / svg).find("<svg") == 0);
    }
    CHECK(rep.err.find("sincos") != std::string::npos);
  }
  SUBCASE("init-config") {
    const auto init = run_captured(dir, {kCli, "init-config", "--profile", (dir / "p.txt").string()});
    REQUIRE(init.status.exit_code == 0);
    CHECK(parse_config(init.out) == initial_config(profile));
  }
}

TEST_CASE("explore exit statuses") {
  const auto dir = testing_support::scratch_dir("cli-status");
  SUBCASE("usage error") {
    CHECK(run_captured(dir, {kCli, "explore"}).status.exit_code == 1);
    CHECK(run_captured(dir, {kCli}).status.exit_code == 1);
  }
  SUBCASE("missing interposer") {
    const auto run = run_captured(dir, {kCli, "explore", "--subject", kOrbitCommand,
                                        "--workdir", (dir / "w").string(), "--interposer",
                                        (dir / "nope.so").string()});
    CHECK(run.status.exit_code == 1);
    CHECK(run.err.find("interposer") != std::string::npos);
  }
  SUBCASE("failing reference run") {
    const auto run = run_captured(dir, {kCli, "explore", "--subject", "exit 4", "--workdir",
                                        (dir / "w").string(), "--interposer",
                                        VPREC_TEST_INTERPOSER});
    CHECK(run.status.exit_code == 1);
    CHECK(run.err.find("reference run failed") != std::string::npos);
  }
  SUBCASE("output that never matches fails validation") {
    // The pid differs on every run, so no trial can pass.
    const auto run = run_captured(dir, {kCli, "explore", "--subject", kOrbitCommand + "; echo $$",
                                        "--workdir", (dir / "w").string(), "--interposer",
                                        VPREC_TEST_INTERPOSER, "--max-sites", "2"});
    CHECK(run.status.exit_code == 2);
    CHECK(run.err.find("passthrough") != std::string::npos);
  }
}
