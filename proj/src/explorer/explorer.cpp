#include "vprec/explorer.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "json.hpp"

#include "vprec/hexfloat.hpp"
#include "vprec/runtime.hpp"
#include "vprec/subprocess.hpp"

namespace vprec {

SearchOutcome search_minimal(const std::function<bool(int)>& passes, int lo, int hi) {
  SearchOutcome out;
  out.value = hi;
  ++out.trials;
  if (!passes(hi)) return out;
  out.feasible = true;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    ++out.trials;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  out.value = hi;
  return out;
}

std::string format_trial_log(std::span<const TrialLogEntry> log) {
  std::string out;
  for (const auto& e : log) {
    out += "site=" + format_hex64(e.site) + " p=" + std::to_string(e.precision) +
           " verdict=" + (e.pass ? "pass" : "fail") +
           " wall_ms=" + std::to_string(e.wall.count()) + "\n";
  }
  return out;
}

ExplorationResult explore_sites(std::span<const CallSiteRecord> profile, TrialRunner& runner,
                                const ExploreOptions& options) {
  auto records = merge_duplicates(profile);
  sort_by_frequency(records);

  ExplorationResult result;
  result.config = initial_config(records);
  auto& config = result.config;

  const std::size_t limit = std::min(records.size(), options.max_sites.value_or(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& record = records[i];
    SiteOutcome site;
    site.id = record.id;
    site.function = record.function;
    site.calls = record.call_count;
    if (i >= limit) {
      result.sites.push_back(site);
      continue;
    }
    site.explored = true;
    ConfigEntry& entry = *config.find(record.id);

    const auto trial = [&](int p, int r, bool logged) {
      entry.format = FloatFormat(r, p);
      entry.mode = SiteMode::vprec;
      const TrialResult t = runner.run(config);
      if (logged) result.trial_log.push_back({record.id, p, t.pass, t.wall});
      return t.pass;
    };

    const auto search =
        search_minimal([&](int p) { return trial(p, FloatFormat::kMaxExponentBits, true); },
                       FloatFormat::kMinPrecisionBits, FloatFormat::kMaxPrecisionBits);
    site.precision_trials = search.trials;
    if (!search.feasible) {
      entry.format = FloatFormat::binary64();
      entry.mode = SiteMode::passthrough;
      site.mode = SiteMode::passthrough;
      result.warnings.push_back("site " + format_hex64(record.id) + " (" +
                                std::string(name(record.function)) +
                                ") fails even at p=52; left as passthrough");
      result.sites.push_back(site);
      continue;
    }
    site.precision = search.value;

    if (options.certificates) {
      Certificate cert;
      if (site.precision > 0) {
        cert.below_fails = !trial(site.precision - 1, FloatFormat::kMaxExponentBits, true);
      }
      cert.at_passes = trial(site.precision, FloatFormat::kMaxExponentBits, true);
      if (!cert.holds()) {
        result.warnings.push_back("site " + format_hex64(record.id) +
                                  ": minimality check failed at p=" +
                                  std::to_string(site.precision) +
                                  " (check is not monotone in p)");
      }
      site.certificate = cert;
    }

    if (options.explore_range) {
      const auto range = search_minimal(
          [&](int r) { return trial(site.precision, r, false); }, FloatFormat::kMinExponentBits,
          FloatFormat::kMaxExponentBits);
      site.range_trials = range.trials;
      site.range_bits = range.feasible ? range.value : FloatFormat::kMaxExponentBits;
    } else {
      site.range_bits = std::clamp(derive_range_bits(record) + options.range_margin,
                                   FloatFormat::kMinExponentBits, FloatFormat::kMaxExponentBits);
    }
    entry.format = FloatFormat(site.range_bits, site.precision);
    entry.mode = SiteMode::vprec;
    result.sites.push_back(site);
  }

  result.validation_passed = runner.run(config).pass;
  if (!result.validation_passed) {
    result.warnings.push_back("final validation with the optimized configuration failed");
  }
  return result;
}

std::string exploration_json(const ExplorationResult& result) {
  using nlohmann::json;
  json sites = json::array();
  for (const auto& s : result.sites) {
    json j{{"id", format_hex64(s.id)},
           {"func", std::string(name(s.function))},
           {"calls", s.calls},
           {"explored", s.explored},
           {"p", s.precision},
           {"r", s.range_bits},
           {"mode", std::string(to_string(s.mode))},
           {"precision_trials", s.precision_trials},
           {"range_trials", s.range_trials}};
    if (s.certificate) {
      json c{{"at_passes", s.certificate->at_passes}, {"holds", s.certificate->holds()}};
      c["below_fails"] = s.certificate->below_fails ? json(*s.certificate->below_fails) : json();
      j["certificate"] = c;
    }
    sites.push_back(std::move(j));
  }
  json doc{{"sites", sites},
           {"warnings", result.warnings},
           {"validation_passed", result.validation_passed},
           {"trials", result.trial_log.size()}};
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::pair<std::string, std::string>> preload_environment(const SubjectSetup& setup,
                                                                    Mode mode) {
  std::string preload = setup.interposer.string();
  if (const char* existing = std::getenv("LD_PRELOAD"); existing != nullptr && *existing) {
    preload += ":";
    preload += existing;
  }
  return {{"LD_PRELOAD", preload}, {kEnvMode, std::string(to_string(mode))}};
}

ProcessResult run_subject(const SubjectSetup& setup,
                          std::vector<std::pair<std::string, std::string>> env,
                          const std::filesystem::path& stdout_path,
                          const std::filesystem::path& stderr_path) {
  ProcessSpec spec;
  spec.argv = shell_argv(setup.command);
  spec.environment = std::move(env);
  spec.stdout_path = stdout_path;
  spec.stderr_path = stderr_path;
  spec.timeout = setup.timeout;
  return run_process(spec);
}

std::string describe(const ProcessResult& r) {
  if (r.timed_out) return "timed out";
  if (r.signal != 0) return "killed by signal " + std::to_string(r.signal);
  return "exit status " + std::to_string(r.exit_code);
}

}  // namespace

void reference_run(const SubjectSetup& setup, const std::filesystem::path& output) {
  const auto config_path = setup.workdir / "reference.cfg";
  write_file_atomic(config_path, write_config(PrecisionConfig{}));
  auto env = preload_environment(setup, Mode::execute);
  env.emplace_back(kEnvConfigFile, std::filesystem::absolute(config_path).string());
  const auto r = run_subject(setup, env, output, setup.workdir / "reference.err");
  if (!r.succeeded()) throw SetupError("reference run failed: " + describe(r));
}

std::vector<CallSiteRecord> profile_run(const SubjectSetup& setup,
                                        const std::filesystem::path& profile_path) {
  std::error_code ec;
  std::filesystem::remove(profile_path, ec);
  auto env = preload_environment(setup, Mode::profile);
  env.emplace_back(kEnvProfileFile, std::filesystem::absolute(profile_path).string());
  const auto r =
      run_subject(setup, env, setup.workdir / "profile.out", setup.workdir / "profile.err");
  if (!r.succeeded()) throw SetupError("profile run failed: " + describe(r));
  if (!std::filesystem::exists(profile_path)) {
    throw SetupError("profile run wrote no profile (is the subject dynamically linked?)");
  }
  return load_profile(profile_path);
}

SubjectRunner::SubjectRunner(SubjectSetup setup, std::filesystem::path reference_output)
    : setup_(std::move(setup)),
      reference_(std::move(reference_output)),
      reference_text_(read_file(reference_)) {}

TrialResult SubjectRunner::run(const PrecisionConfig& config) {
  ++counter_;
  const auto config_path = std::filesystem::absolute(setup_.workdir / "trial.cfg");
  const auto output = std::filesystem::absolute(setup_.workdir / "trial.out");
  write_file_atomic(config_path, write_config(config));
  auto env = preload_environment(setup_, Mode::execute);
  env.emplace_back(kEnvConfigFile, config_path.string());
  env.emplace_back(kEnvNewSitesFile,
                   std::filesystem::absolute(setup_.workdir / "new-sites.log").string());

  const auto r = run_subject(setup_, env, output, setup_.workdir / "trial.err");
  TrialResult result;
  result.wall = r.wall;
  if (!r.succeeded()) return result;
  if (setup_.checker) {
    ProcessSpec check;
    check.argv = shell_argv(*setup_.checker + " \"$1\" \"$2\"",
                            {output.string(), std::filesystem::absolute(reference_).string()});
    check.timeout = setup_.timeout;
    result.pass = run_process(check).succeeded();
  } else {
    result.pass = compare_numeric(read_file(output), reference_text_, setup_.tolerance).accepted;
  }
  return result;
}

std::filesystem::path locate_interposer(const std::optional<std::filesystem::path>& explicit_path) {
  std::filesystem::path path;
  if (explicit_path) {
    path = *explicit_path;
  } else if (const char* env = std::getenv("VPREC_LIBM_LIBRARY"); env != nullptr && *env) {
    path = env;
  } else {
#ifdef VPREC_DEFAULT_INTERPOSER
    path = VPREC_DEFAULT_INTERPOSER;
#endif
  }
  if (path.empty() || !std::filesystem::is_regular_file(path)) {
    throw SetupError("interposer library not found" +
                     (path.empty() ? std::string() : ": " + path.string()));
  }
  return std::filesystem::absolute(path);
}

}  // namespace vprec
