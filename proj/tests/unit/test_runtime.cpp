#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "rounding_oracle.hpp"
#include "vprec/runtime.hpp"

using namespace vprec;

namespace {

void site_one() {}
void site_two() {}

const void* at(void (*fn)()) { return reinterpret_cast<const void*>(fn); }

RuntimeSettings settings(Mode mode) {
  RuntimeSettings s;
  s.mode = mode;
  return s;
}

std::uint64_t id_of(const void* address, MathFunction f) {
  return SiteResolver().resolve(address, f).hash;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "vprec-test-runtime";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("mode names") {
  CHECK(parse_mode("profile") == Mode::profile);
  CHECK(parse_mode("execute") == Mode::execute);
  CHECK(parse_mode("passthrough") == Mode::passthrough);
  CHECK_FALSE(parse_mode("fast"));
  CHECK(to_string(Mode::execute) == "execute");
}

TEST_CASE("host entry points resolve") {
  const auto g = GenuineFunctions::host();
  CHECK_FALSE(g.missing());
  GenuineFunctions partial = g;
  partial.unary[static_cast<int>(MathFunction::cbrt)] = nullptr;
  CHECK(partial.missing() == std::optional<std::string_view>("cbrt"));
}

TEST_CASE("profile mode records results of the genuine library") {
  Runtime rt(settings(Mode::profile), GenuineFunctions::host());
  CHECK(rt.call(MathFunction::sin, 2.0, at(site_one)) == std::sin(2.0));
  CHECK(rt.call(MathFunction::sin, -1.0, at(site_one)) == std::sin(-1.0));
  CHECK(rt.call(MathFunction::pow, 2.0, 0.5, at(site_two)) == std::pow(2.0, 0.5));

  const auto records = rt.profile_records();
  REQUIRE(records.size() == 2);
  const auto& s = records[0];
  CHECK(s.function == MathFunction::sin);
  CHECK(s.id == id_of(at(site_one), MathFunction::sin));
  CHECK(s.call_count == 2);
  CHECK(s.inputs[0].min == -1.0);
  CHECK(s.inputs[0].max == 2.0);
  CHECK(s.output.min == std::sin(-1.0));
  CHECK(s.output.max == std::sin(2.0));
  CHECK(s.object == "test_runtime");
  CHECK(records[1].inputs[1].min == 0.5);
  CHECK(records[1].inputs[1].max == 0.5);
}

TEST_CASE("sincos output interval covers both results") {
  Runtime rt(settings(Mode::profile), GenuineFunctions::host());
  double s = 0, c = 0;
  rt.call_sincos(0.5, &s, &c, at(site_one));
  CHECK(s == std::sin(0.5));
  CHECK(c == std::cos(0.5));
  const auto records = rt.profile_records();
  REQUIRE(records.size() == 1);
  CHECK(records[0].output.min == std::sin(0.5));
  CHECK(records[0].output.max == std::cos(0.5));
}

TEST_CASE("execute mode examples") {
  RuntimeSettings s = settings(Mode::execute);
  s.config.entries.push_back(
      {id_of(at(site_one), MathFunction::sin), MathFunction::sin, FloatFormat(11, 3), SiteMode::vprec});
  s.config.entries.push_back(
      {id_of(at(site_two), MathFunction::sin), MathFunction::sin, FloatFormat(11, 3),
       SiteMode::passthrough});
  s.config.entries.push_back(
      {id_of(at(site_one), MathFunction::fabs), MathFunction::fabs, FloatFormat(11, 0),
       SiteMode::vprec});
  const auto log = scratch("new-sites.log");
  std::filesystem::remove(log);
  s.new_sites_path = log;
  Runtime rt(s, GenuineFunctions::host());

  // sin(1) = 0.84147..., between 0.8125 and 0.875 at p=3; nearest is 0.8125.
  const double reduced = rt.call(MathFunction::sin, 1.0, at(site_one));
  CHECK(reduced == 0.8125);
  CHECK(reduced == oracle::round(std::sin(1.0), 11, 3).value);
  CHECK(rt.call(MathFunction::sin, 1.0, at(site_two)) == std::sin(1.0));
  CHECK(rt.call(MathFunction::fabs, -2.0, at(site_one)) == 2.0);
  CHECK(rt.call(MathFunction::fabs, -3.0, at(site_one)) == 4.0);

  // Unconfigured: default (52, 11), logged once.
  const double cos1 = rt.call(MathFunction::cos, 1.0, at(site_two));
  CHECK(std::abs(cos1 - std::cos(1.0)) <= std::abs(std::nextafter(std::cos(1.0), 0.0) - std::cos(1.0)));
  rt.call(MathFunction::cos, 1.0, at(site_two));
  std::ifstream in(log);
  std::string line, extra;
  REQUIRE(std::getline(in, line));
  CHECK(line.find("func=cos") != std::string::npos);
  CHECK(line.find("obj=test_runtime") != std::string::npos);
  CHECK_FALSE(std::getline(in, extra));
}

TEST_CASE("execute_in_format rounds the extended result") {
  CHECK(execute_in_format(MathFunction::sin, 1.0, std::nullopt, FloatFormat(11, 3)) == 0.8125);
  CHECK(execute_in_format(MathFunction::exp, 100.0, std::nullopt, FloatFormat(8, 23)) ==
        std::numeric_limits<double>::infinity());
  CHECK(execute_in_format(MathFunction::exp, -100.0, std::nullopt, FloatFormat(8, 23)) == 0.0);
  CHECK(std::isnan(execute_in_format(MathFunction::log, -1.0, std::nullopt, FloatFormat(8, 23))));
  CHECK(execute_in_format(MathFunction::floor, 2.7, std::nullopt, FloatFormat(11, 0)) == 2.0);
  CHECK(execute_in_format(MathFunction::floor, 3.7, std::nullopt, FloatFormat(11, 0)) == 4.0);
  double s = 0, c = 0;
  execute_sincos_in_format(1.0, &s, &c, FloatFormat(11, 3));
  CHECK(s == 0.8125);
  CHECK(c == oracle::round(std::cos(1.0), 11, 3).value);
}

TEST_CASE("passthrough mode records nothing") {
  Runtime rt(settings(Mode::passthrough), GenuineFunctions::host());
  CHECK(rt.call(MathFunction::atan2, 1.0, 2.0, at(site_one)) == std::atan2(1.0, 2.0));
  CHECK(rt.profile_records().empty());
}

TEST_CASE("concurrent profiling loses no calls") {
  Runtime rt(settings(Mode::profile), GenuineFunctions::host());
  constexpr int kThreads = 4;
  constexpr int kCalls = 10000;
  std::vector<std::thread> threads;
  for (int t = 0; t < kThreads; ++t) {
    threads.emplace_back([&rt, t] {
      for (int i = 0; i < kCalls; ++i) {
        rt.call(MathFunction::exp, t * kCalls + i, at(site_one));
        rt.call(MathFunction::hypot, i, t, at(site_two));
      }
    });
  }
  for (auto& th : threads) th.join();
  const auto records = rt.profile_records();
  REQUIRE(records.size() == 2);
  for (const auto& r : records) CHECK(r.call_count == kThreads * kCalls);
  const auto& e = records[0].function == MathFunction::exp ? records[0] : records[1];
  CHECK(e.inputs[0].min == 0.0);
  CHECK(e.inputs[0].max == kThreads * kCalls - 1);
}

TEST_CASE("profile flush") {
  RuntimeSettings s = settings(Mode::profile);
  s.profile_path = scratch("flush.profile");
  std::filesystem::remove(s.profile_path);
  {
    Runtime empty(s, GenuineFunctions::host());
    CHECK(empty.flush_profile());
    CHECK(load_profile(s.profile_path).empty());
  }
  {
    Runtime rt(s, GenuineFunctions::host());
    rt.call(MathFunction::cbrt, 8.0, at(site_one));
    CHECK(rt.flush_profile());
    const auto records = load_profile(s.profile_path);
    REQUIRE(records.size() == 1);
    CHECK(records[0].output.min == 2.0);
  }
  {
    // A process without calls does not clobber an existing profile.
    Runtime empty(s, GenuineFunctions::host());
    CHECK(empty.flush_profile());
    CHECK(load_profile(s.profile_path).size() == 1);
  }
  s.profile_path = "/nonexistent-dir/x.profile";
  Runtime bad(s, GenuineFunctions::host());
  bad.call(MathFunction::cbrt, 8.0, at(site_one));
  CHECK_FALSE(bad.flush_profile());
}

TEST_CASE("settings from the environment") {
  const auto config = scratch("env.cfg");
  {
    std::ofstream out(config);
    out << "#vprec-libm-config v1\ndefault p=10 r=5\n";
  }
  setenv(kEnvMode, "execute", 1);
  setenv(kEnvConfigFile, config.c_str(), 1);
  setenv(kEnvStackFrames, "3", 1);
  auto s = settings_from_environment();
  CHECK(s.mode == Mode::execute);
  CHECK(s.config.default_format == FloatFormat(5, 10));
  CHECK(s.stack_frames == 3);

  unsetenv(kEnvConfigFile);
  CHECK_THROWS_AS(settings_from_environment(), std::runtime_error);
  setenv(kEnvMode, "turbo", 1);
  CHECK_THROWS_AS(settings_from_environment(), std::runtime_error);
  setenv(kEnvMode, "profile", 1);
  setenv(kEnvStackFrames, "-1", 1);
  CHECK_THROWS_AS(settings_from_environment(), std::runtime_error);
  unsetenv(kEnvStackFrames);
  setenv(kEnvProfileFile, "relative.profile", 1);
  s = settings_from_environment();
  CHECK(s.profile_path.is_absolute());
  CHECK(s.profile_path.filename() == "relative.profile");
  unsetenv(kEnvMode);
  unsetenv(kEnvProfileFile);
  CHECK(settings_from_environment().mode == Mode::passthrough);
}
