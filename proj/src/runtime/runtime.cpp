#include "vprec/runtime.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "vprec/extprec.hpp"
#include "vprec/hexfloat.hpp"

namespace vprec {

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::passthrough: return "passthrough";
    case Mode::profile: return "profile";
    case Mode::execute: return "execute";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) noexcept {
  if (text == "passthrough") return Mode::passthrough;
  if (text == "profile") return Mode::profile;
  if (text == "execute") return Mode::execute;
  return std::nullopt;
}

namespace {

std::string_view env(const char* key) {
  const char* value = std::getenv(key);
  return value == nullptr ? std::string_view{} : std::string_view{value};
}

std::filesystem::path absolute_or_empty(std::string_view text) {
  if (text.empty()) return {};
  std::error_code ec;
  auto path = std::filesystem::absolute(std::filesystem::path(text), ec);
  return ec ? std::filesystem::path(text) : path;
}

}  // namespace

RuntimeSettings settings_from_environment() {
  RuntimeSettings s;
  if (const auto mode_text = env(kEnvMode); !mode_text.empty()) {
    const auto mode = parse_mode(mode_text);
    if (!mode) {
      throw std::runtime_error(std::string(kEnvMode) + "='" + std::string(mode_text) +
                               "' is not one of passthrough, profile, execute");
    }
    s.mode = *mode;
  }
  if (const auto frames = env(kEnvStackFrames); !frames.empty()) {
    int k = 0;
    const auto [ptr, ec] = std::from_chars(frames.data(), frames.data() + frames.size(), k);
    if (ec != std::errc{} || ptr != frames.data() + frames.size() || k < 0 ||
        k > SiteResolver::kMaxStackFrames) {
      throw std::runtime_error(std::string(kEnvStackFrames) + " must be an integer in [0,64]");
    }
    s.stack_frames = k;
  }
  // Resolved now: the subject may change directory before exiting.
  const auto profile = env(kEnvProfileFile);
  s.profile_path = absolute_or_empty(profile.empty() ? kDefaultProfileFile : profile);
  s.new_sites_path = absolute_or_empty(env(kEnvNewSitesFile));

  if (s.mode == Mode::execute) {
    const auto config_path = env(kEnvConfigFile);
    if (config_path.empty()) {
      throw std::runtime_error(std::string(kEnvConfigFile) + " must be set in execute mode");
    }
    s.config = load_config(std::filesystem::path(config_path));
  }
  return s;
}

GenuineFunctions GenuineFunctions::host() {
  GenuineFunctions g;
  using F = MathFunction;
  const auto set = [&g](F f, Unary u) { g.unary[static_cast<std::size_t>(f)] = u; };
  set(F::sin, ::sin);
  set(F::cos, ::cos);
  set(F::tan, ::tan);
  set(F::asin, ::asin);
  set(F::acos, ::acos);
  set(F::atan, ::atan);
  set(F::exp, ::exp);
  set(F::log, ::log);
  set(F::log2, ::log2);
  set(F::log10, ::log10);
  set(F::sqrt, ::sqrt);
  set(F::cbrt, ::cbrt);
  set(F::floor, ::floor);
  set(F::ceil, ::ceil);
  set(F::fabs, ::fabs);
  const auto set2 = [&g](F f, Binary b) { g.binary[static_cast<std::size_t>(f)] = b; };
  set2(F::atan2, ::atan2);
  set2(F::pow, ::pow);
  set2(F::hypot, ::hypot);
  set2(F::fmod, ::fmod);
  g.sincos = ::sincos;
  return g;
}

std::optional<std::string_view> GenuineFunctions::missing() const noexcept {
  for (const auto f : kAllMathFunctions) {
    const auto i = static_cast<std::size_t>(f);
    if (f == MathFunction::sincos) {
      if (sincos == nullptr) return name(f);
    } else if (arity(f) == 2 ? binary[i] == nullptr : unary[i] == nullptr) {
      return name(f);
    }
  }
  return std::nullopt;
}

double execute_in_format(MathFunction f, double x, std::optional<double> y,
                         const FloatFormat& fmt) {
  return round_to_format(eval_extended(f, x, y), fmt).value;
}

void execute_sincos_in_format(double x, double* s, double* c, const FloatFormat& fmt) {
  const SinCosValue v = eval_sincos(x);
  *s = round_to_format(v.sin, fmt).value;
  *c = round_to_format(v.cos, fmt).value;
}

Runtime::Runtime(RuntimeSettings settings, GenuineFunctions genuine)
    : settings_(std::move(settings)), genuine_(genuine), resolver_(settings_.stack_frames) {
  for (const auto& e : settings_.config.entries) entries_.emplace(e.id, e);
}

std::optional<FloatFormat> Runtime::format_for(const CallSiteId& site, MathFunction f) {
  const auto it = entries_.find(site.hash);
  if (it == entries_.end()) {
    note_new_site(site, f);
    return settings_.config.default_format;
  }
  if (it->second.mode == SiteMode::passthrough) return std::nullopt;
  return it->second.format;
}

void Runtime::note_new_site(const CallSiteId& site, MathFunction f) {
  std::lock_guard lock(new_sites_mutex_);
  if (!new_sites_.insert(site.hash).second || settings_.new_sites_path.empty()) return;
  std::ofstream out(settings_.new_sites_path, std::ios::app);
  if (!out) {
    std::fprintf(stderr, "vprec-libm: cannot append to %s\n",
                 settings_.new_sites_path.c_str());
    return;
  }
  out << "site id=" << format_hex64(site.hash) << " func=" << name(f) << " obj=" << site.object
      << " off=" << format_hex64(site.offset) << '\n';
}

void Runtime::record(const CallSiteId& site, MathFunction f, std::span<const double> operands,
                     std::span<const double> results) {
  std::lock_guard lock(profile_mutex_);
  auto [it, inserted] = profile_.try_emplace(site.hash);
  if (inserted) {
    it->second.function = f;
    it->second.id = site.hash;
    it->second.object = site.object;
    it->second.offset = site.offset;
  }
  it->second.observe(operands, results);
}

double Runtime::call(MathFunction f, double x, const void* return_address) {
  const auto genuine = genuine_.unary[static_cast<std::size_t>(f)];
  switch (settings_.mode) {
    case Mode::passthrough:
      return genuine(x);
    case Mode::profile: {
      const double result = genuine(x);
      record(resolver_.resolve(return_address, f), f, std::span(&x, 1), std::span(&result, 1));
      return result;
    }
    case Mode::execute: {
      const auto fmt = format_for(resolver_.resolve(return_address, f), f);
      return fmt ? execute_in_format(f, x, std::nullopt, *fmt) : genuine(x);
    }
  }
  return genuine(x);
}

double Runtime::call(MathFunction f, double x, double y, const void* return_address) {
  const auto genuine = genuine_.binary[static_cast<std::size_t>(f)];
  switch (settings_.mode) {
    case Mode::passthrough:
      return genuine(x, y);
    case Mode::profile: {
      const double result = genuine(x, y);
      const std::array<double, 2> operands{x, y};
      record(resolver_.resolve(return_address, f), f, operands, std::span(&result, 1));
      return result;
    }
    case Mode::execute: {
      const auto fmt = format_for(resolver_.resolve(return_address, f), f);
      return fmt ? execute_in_format(f, x, y, *fmt) : genuine(x, y);
    }
  }
  return genuine(x, y);
}

void Runtime::call_sincos(double x, double* s, double* c, const void* return_address) {
  constexpr auto f = MathFunction::sincos;
  switch (settings_.mode) {
    case Mode::passthrough:
      genuine_.sincos(x, s, c);
      return;
    case Mode::profile: {
      genuine_.sincos(x, s, c);
      const std::array<double, 2> results{*s, *c};
      record(resolver_.resolve(return_address, f), f, std::span(&x, 1), results);
      return;
    }
    case Mode::execute: {
      const auto fmt = format_for(resolver_.resolve(return_address, f), f);
      if (fmt) {
        execute_sincos_in_format(x, s, c, *fmt);
      } else {
        genuine_.sincos(x, s, c);
      }
      return;
    }
  }
}

std::vector<CallSiteRecord> Runtime::profile_records() const {
  std::vector<CallSiteRecord> records;
  {
    std::lock_guard lock(profile_mutex_);
    records.reserve(profile_.size());
    for (const auto& [id, r] : profile_) records.push_back(r);
  }
  sort_by_frequency(records);
  return records;
}

bool Runtime::flush_profile() const noexcept {
  try {
    const auto records = profile_records();
    std::error_code ec;
    if (records.empty() && std::filesystem::exists(settings_.profile_path, ec)) return true;
    write_file_atomic(settings_.profile_path, write_profile(records));
    return true;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "vprec-libm: profile not written: %s\n", e.what());
    return false;
  }
}

}  // namespace vprec
