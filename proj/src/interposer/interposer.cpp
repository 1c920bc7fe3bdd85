// Preloadable replacement for the binary64 math-library entry points.
//
// Activate with LD_PRELOAD=libvprec-libm.so and VPREC_LIBM_MODE. Only
// dynamically linked callers are intercepted; calls the compiler turned into
// inline instructions (build subjects with -fno-builtin) and statically linked
// programs never reach this library.

#include <dlfcn.h>
#include <gnu/lib-names.h>

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

#include "vprec/runtime.hpp"

namespace {

using vprec::GenuineFunctions;
using vprec::MathFunction;
using vprec::Runtime;

// Nonzero while this thread is inside the library; nested math calls (from the
// extended evaluator, the C++ runtime, ...) go straight to the genuine code.
thread_local int t_depth = 0;

GenuineFunctions g_genuine;
Runtime* g_runtime = nullptr;

struct DepthGuard {
  DepthGuard() noexcept { ++t_depth; }
  ~DepthGuard() { --t_depth; }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;
};

// Default symbol versions; RTLD_NEXT from here finds e.g. log@GLIBC_2.2.5.
template <typename Fn>
Fn next_symbol(const char* symbol) {
  static void* const libm = ::dlopen(LIBM_SO, RTLD_LAZY | RTLD_NOLOAD);
  if (libm != nullptr) {
    if (void* sym = ::dlsym(libm, symbol)) return reinterpret_cast<Fn>(sym);
  }
  return reinterpret_cast<Fn>(::dlsym(RTLD_NEXT, symbol));
}

GenuineFunctions resolve_next() {
  GenuineFunctions g;
  for (const auto f : vprec::kAllMathFunctions) {
    const std::string symbol(vprec::name(f));
    const auto i = static_cast<std::size_t>(f);
    if (f == MathFunction::sincos) {
      g.sincos = next_symbol<GenuineFunctions::SinCos>(symbol.c_str());
    } else if (vprec::arity(f) == 2) {
      g.binary[i] = next_symbol<GenuineFunctions::Binary>(symbol.c_str());
    } else {
      g.unary[i] = next_symbol<GenuineFunctions::Unary>(symbol.c_str());
    }
  }
  return g;
}

void flush_at_exit() {
  if (g_runtime == nullptr) return;
  DepthGuard guard;
  g_runtime->flush_profile();
}

__attribute__((constructor(101))) void on_load() {
  DepthGuard guard;
  g_genuine = resolve_next();
  if (const auto missing = g_genuine.missing()) {
    std::fprintf(stderr, "vprec-libm: cannot resolve genuine '%.*s': %s\n",
                 static_cast<int>(missing->size()), missing->data(), ::dlerror());
    std::abort();
  }
  try {
    g_runtime = new Runtime(vprec::settings_from_environment(), g_genuine);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vprec-libm: %s\n", e.what());
    std::abort();
  }
  if (g_runtime->mode() == vprec::Mode::profile) std::atexit(flush_at_exit);
}

// Calls can arrive before on_load() (from other libraries' constructors).
template <MathFunction F>
GenuineFunctions::Unary genuine_unary() {
  auto& fn = g_genuine.unary[static_cast<std::size_t>(F)];
  if (fn == nullptr) fn = next_symbol<GenuineFunctions::Unary>(std::string(vprec::name(F)).c_str());
  return fn;
}

template <MathFunction F>
GenuineFunctions::Binary genuine_binary() {
  auto& fn = g_genuine.binary[static_cast<std::size_t>(F)];
  if (fn == nullptr) fn = next_symbol<GenuineFunctions::Binary>(std::string(vprec::name(F)).c_str());
  return fn;
}

template <MathFunction F>
double unary(double x, const void* caller) {
  if (t_depth > 0 || g_runtime == nullptr) return genuine_unary<F>()(x);
  DepthGuard guard;
  return g_runtime->call(F, x, caller);
}

template <MathFunction F>
double binary(double x, double y, const void* caller) {
  if (t_depth > 0 || g_runtime == nullptr) return genuine_binary<F>()(x, y);
  DepthGuard guard;
  return g_runtime->call(F, x, y, caller);
}

}  // namespace

#define VPREC_UNARY(fn) \
  extern "C" double fn(double x) noexcept { return unary<MathFunction::fn>(x, __builtin_return_address(0)); }
#define VPREC_BINARY(fn)                                      \
  extern "C" double fn(double x, double y) noexcept {         \
    return binary<MathFunction::fn>(x, y, __builtin_return_address(0)); \
  }

VPREC_UNARY(sin)
VPREC_UNARY(cos)
VPREC_UNARY(tan)
VPREC_UNARY(asin)
VPREC_UNARY(acos)
VPREC_UNARY(atan)
VPREC_UNARY(exp)
VPREC_UNARY(log)
VPREC_UNARY(log2)
VPREC_UNARY(log10)
VPREC_UNARY(sqrt)
VPREC_UNARY(cbrt)
VPREC_UNARY(floor)
VPREC_UNARY(ceil)
VPREC_UNARY(fabs)
VPREC_BINARY(atan2)
VPREC_BINARY(pow)
VPREC_BINARY(hypot)
VPREC_BINARY(fmod)

extern "C" void sincos(double x, double* s, double* c) noexcept {
  if (t_depth > 0 || g_runtime == nullptr) {
    if (g_genuine.sincos == nullptr) g_genuine.sincos = next_symbol<GenuineFunctions::SinCos>("sincos");
    g_genuine.sincos(x, s, c);
    return;
  }
  DepthGuard guard;
  g_runtime->call_sincos(x, s, c, __builtin_return_address(0));
}

/// Writes the profile now (profile mode); returns 0 on success.
extern "C" int vprec_libm_flush_profile() noexcept {
  if (g_runtime == nullptr || g_runtime->mode() != vprec::Mode::profile) return -1;
  DepthGuard guard;
  return g_runtime->flush_profile() ? 0 : -1;
}
