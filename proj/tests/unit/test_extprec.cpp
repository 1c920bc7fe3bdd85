#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "extprec_fixture.hpp"
#include "random_doubles.hpp"
#include "vprec/extprec.hpp"
#include "vprec/format.hpp"
#include "vprec/runtime.hpp"

using namespace vprec;

namespace {

double ulp_distance(double a, double b) {
  if (a == b) return 0.0;
  const double gap = std::abs(std::nextafter(b, a) - b);
  return std::abs(a - b) / gap;
}

double host(MathFunction f, double x, double y = 0.0) {
  const auto g = GenuineFunctions::host();
  return arity(f) == 2 ? g.binary[static_cast<int>(f)](x, y) : g.unary[static_cast<int>(f)](x);
}

}  // namespace

TEST_CASE("fixture accuracy") {
  REQUIRE(std::size(fixture::kEntries) >= 20);
  for (const auto& e : fixture::kEntries) {
    const auto f = parse_math_function(e.func);
    REQUIRE(f);
    const double x = fixture::hex(e.x);
    const std::optional<double> y =
        e.y ? std::optional<double>(fixture::hex(*e.y)) : std::nullopt;
    const auto got = eval_extended(*f, x, y);
    const double ref_hi = fixture::hex(e.ref_hi);
    const double ref_lo = fixture::hex(e.ref_lo);
    INFO(e.func << "(" << e.x << (e.y ? ", " : "") << (e.y ? *e.y : "") << ")");
    if (is_exact_function(*f) || ref_lo == 0.0) {
      CHECK(got.hi == ref_hi);
      CHECK(got.lo == 0.0);
    } else {
      CHECK(fixture::relative_error(got.hi, got.lo, ref_hi, ref_lo) <= 0x1p-64);
    }
  }
}

TEST_CASE("examples") {
  const auto one = eval_extended(MathFunction::sin, 0.0);
  CHECK(one.hi == 0.0);
  CHECK(one.lo == 0.0);
  CHECK(eval_extended(MathFunction::fabs, -2.0).hi == 2.0);
  CHECK(eval_extended(MathFunction::floor, -0.5).hi == -1.0);
  CHECK(std::signbit(eval_extended(MathFunction::ceil, -0.5).hi));
  CHECK(eval_extended(MathFunction::pow, 2.0, 10.0).hi == 1024.0);
  CHECK(eval_extended(MathFunction::hypot, 3.0, 4.0).hi == 5.0);
  CHECK(eval_extended(MathFunction::cbrt, -27.0).hi == -3.0);
  CHECK_THROWS_AS(eval_extended(MathFunction::pow, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_extended(MathFunction::sin, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_extended(MathFunction::sincos, 2.0), std::invalid_argument);
}

TEST_CASE("special values follow the host library") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double unary_inputs[] = {0.0, -0.0, inf, -inf, nan, -1.0, 1.0, 2.0, -2.0};
  for (MathFunction f : kAllMathFunctions) {
    if (f == MathFunction::sincos) continue;
    for (double x : unary_inputs) {
      for (double y : {0.0, -0.0, inf, -inf, nan, 1.0, -1.0, 0.5}) {
        if (arity(f) == 1 && y != 0.0) continue;
        const double want = host(f, x, y);
        const auto got =
            arity(f) == 2 ? eval_extended(f, x, y) : eval_extended(f, x);
        INFO(name(f) << "(" << x << ", " << y << ") host=" << want << " got=" << got.hi);
        if (std::isnan(want)) {
          CHECK(std::isnan(got.hi));
        } else if (std::isinf(want) || want == 0.0) {
          CHECK(got.hi == want);
          CHECK(std::signbit(got.hi) == std::signbit(want));
          CHECK(got.lo == 0.0);
        } else {
          CHECK(ulp_distance(got.hi, want) <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("agreement with the host library on random inputs") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> wide(-50.0, 50.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> positive(1e-3, 1e3);
  for (int i = 0; i < 4000; ++i) {
    const double a = wide(rng), u = unit(rng), pz = positive(rng), b = wide(rng);
    const std::pair<MathFunction, std::pair<double, double>> cases[] = {
        {MathFunction::sin, {a, 0}},       {MathFunction::cos, {a, 0}},
        {MathFunction::tan, {a, 0}},       {MathFunction::asin, {u, 0}},
        {MathFunction::acos, {u, 0}},      {MathFunction::atan, {a, 0}},
        {MathFunction::atan2, {a, b}},     {MathFunction::exp, {a, 0}},
        {MathFunction::log, {pz, 0}},      {MathFunction::log2, {pz, 0}},
        {MathFunction::log10, {pz, 0}},    {MathFunction::pow, {pz, u * 8}},
        {MathFunction::sqrt, {pz, 0}},     {MathFunction::cbrt, {a, 0}},
        {MathFunction::hypot, {a, b}},     {MathFunction::fmod, {a, b}},
        {MathFunction::floor, {a, 0}},     {MathFunction::ceil, {a, 0}},
        {MathFunction::fabs, {a, 0}},
    };
    for (const auto& [f, args] : cases) {
      const auto got = arity(f) == 2 ? eval_extended(f, args.first, args.second)
                                     : eval_extended(f, args.first);
      const double want = host(f, args.first, args.second);
      INFO(name(f) << "(" << args.first << ", " << args.second << ")");
      if (is_exact_function(f) || f == MathFunction::sqrt) {
        CHECK(got.hi == want);
      } else {
        // glibc documents cbrt at up to 4 ulp; the others within 2.
        CHECK(ulp_distance(got.hi, want) <= (f == MathFunction::cbrt ? 4.0 : 2.0));
      }
    }
  }
}

TEST_CASE("result pairs are normalized") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 2000; ++i) {
    const double x = testing_support::random_in_binades(rng, -20, 8);
    for (MathFunction f : {MathFunction::sin, MathFunction::exp, MathFunction::atan,
                           MathFunction::cbrt}) {
      const auto v = eval_extended(f, x);
      if (v.hi == 0.0 || !std::isfinite(v.hi)) continue;
      CHECK(v.hi + v.lo == v.hi);
    }
  }
}

TEST_CASE("sincos matches separate evaluation") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    const double x = testing_support::random_in_binades(rng, -30, 30);
    const auto sc = eval_sincos(x);
    CHECK(sc.sin == eval_extended(MathFunction::sin, x));
    CHECK(sc.cos == eval_extended(MathFunction::cos, x));
  }
}
