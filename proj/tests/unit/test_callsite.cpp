#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "vprec/callsite.hpp"

using namespace vprec;

namespace {

void marker_a() {}
void marker_b() {}

const void* address_of(void (*fn)(), std::size_t offset = 0) {
  return reinterpret_cast<const char*>(reinterpret_cast<const void*>(fn)) + offset;
}

// Same immediate return address (inside middle), different callers.
__attribute__((noinline)) CallSiteId inner(SiteResolver& resolver) {
  CallSiteId id = resolver.resolve(__builtin_return_address(0), MathFunction::sin);
  asm volatile("" ::: "memory");
  return id;
}

__attribute__((noinline)) CallSiteId middle(SiteResolver& resolver) {
  CallSiteId id = inner(resolver);
  asm volatile("" ::: "memory");
  return id;
}

volatile int g_side_effect = 0;

// Distinct bodies keep identical-code folding from merging the two callers.
__attribute__((noinline)) CallSiteId outer_a(SiteResolver& resolver) {
  g_side_effect = 1;
  CallSiteId id = middle(resolver);
  asm volatile("" ::: "memory");
  return id;
}

__attribute__((noinline)) CallSiteId outer_b(SiteResolver& resolver) {
  g_side_effect = 2;
  CallSiteId id = middle(resolver);
  asm volatile("" ::: "memory");
  return id;
}

}  // namespace

TEST_CASE("addresses map to the containing object") {
  const auto loc = locate_address(address_of(marker_a));
  CHECK(loc.object == "test_callsite");
  CHECK(loc.offset > 0);
  const auto loc2 = locate_address(address_of(marker_a, 4));
  CHECK(loc2.offset == loc.offset + 4);

  const auto unmapped = locate_address(reinterpret_cast<const void*>(0x10));
  CHECK(unmapped.object == "?");
  CHECK(unmapped.offset == 0x10);
}

TEST_CASE("site hash is FNV-1a over frames and function") {
  const CodeLocation loc{"subject", 0x1234};
  const auto h_sin = site_hash(std::span(&loc, 1), MathFunction::sin);
  const auto h_cos = site_hash(std::span(&loc, 1), MathFunction::cos);
  CHECK(h_sin != h_cos);
  CHECK(h_sin == site_hash(std::span(&loc, 1), MathFunction::sin));
  const CodeLocation other{"subject", 0x1235};
  CHECK(h_sin != site_hash(std::span(&other, 1), MathFunction::sin));
  const CodeLocation renamed{"library.so", 0x1234};
  CHECK(h_sin != site_hash(std::span(&renamed, 1), MathFunction::sin));
}

TEST_CASE("resolver is deterministic and distinguishes sites") {
  SiteResolver resolver;
  const auto a1 = resolver.resolve(address_of(marker_a), MathFunction::exp);
  const auto a2 = resolver.resolve(address_of(marker_a), MathFunction::exp);
  const auto b = resolver.resolve(address_of(marker_b), MathFunction::exp);
  const auto a_log = resolver.resolve(address_of(marker_a), MathFunction::log);
  CHECK(a1 == a2);
  CHECK(a1.hash != b.hash);
  CHECK(a1.hash != a_log.hash);
  CHECK(a1.object == "test_callsite");

  SiteResolver fresh;
  CHECK(fresh.resolve(address_of(marker_a), MathFunction::exp) == a1);
}

TEST_CASE("stack-frame mode separates callers") {
  SiteResolver flat(0);
  CHECK(outer_a(flat).hash == outer_b(flat).hash);

  SiteResolver deep(2);
  const auto a = outer_a(deep);
  const auto b = outer_b(deep);
  CHECK(a.hash != b.hash);
  CHECK(a.offset == b.offset);  // the immediate site is still reported
  CHECK(a == outer_a(deep));
}

TEST_CASE("concurrent resolution agrees") {
  SiteResolver resolver;
  const auto expected = SiteResolver().resolve(address_of(marker_b, 2), MathFunction::pow);
  std::vector<std::thread> threads;
  std::vector<int> mismatches(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 5000; ++i) {
        if (resolver.resolve(address_of(marker_b, 2), MathFunction::pow) != expected) {
          ++mismatches[t];
        }
        resolver.resolve(address_of(marker_a, static_cast<std::size_t>(i % 64)),
                         MathFunction::sin);
      }
    });
  }
  for (auto& th : threads) th.join();
  for (int m : mismatches) CHECK(m == 0);
}
