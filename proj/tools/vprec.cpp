#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vprec/config.hpp"
#include "vprec/explorer.hpp"
#include "vprec/hexfloat.hpp"
#include "vprec/profile.hpp"
#include "vprec/report.hpp"

namespace fs = std::filesystem;
using namespace vprec;

namespace {

struct ExploreArgs {
  std::string subject;
  fs::path workdir = "vprec-explore";
  double tol_rel = 1e-6;
  double tol_abs = 0.0;
  std::optional<std::string> checker;
  std::optional<fs::path> output_config;
  std::optional<fs::path> profile;
  std::optional<fs::path> trial_log;
  int range_margin = 1;
  bool explore_range = false;
  bool no_certificates = false;
  std::optional<std::size_t> max_sites;
  std::optional<fs::path> interposer;
  double timeout_s = 0.0;
};

int run_explore(const ExploreArgs& args) {
  SubjectSetup setup;
  try {
    fs::create_directories(args.workdir);
    setup.command = args.subject;
    setup.workdir = fs::absolute(args.workdir);
    setup.interposer = locate_interposer(args.interposer);
    setup.checker = args.checker;
    setup.tolerance = {args.tol_rel, args.tol_abs};
    setup.timeout = std::chrono::milliseconds(static_cast<long long>(args.timeout_s * 1000.0));
  } catch (const std::exception& e) {
    std::cerr << "vprec explore: " << e.what() << "\n";
    return 1;
  }

  const fs::path profile_path = args.profile.value_or(setup.workdir / "profile.txt");
  const fs::path config_path = args.output_config.value_or(setup.workdir / "optimized.cfg");
  const fs::path log_path = args.trial_log.value_or(setup.workdir / "trials.log");
  const fs::path reference = setup.workdir / "reference.out";

  std::vector<CallSiteRecord> records;
  try {
    reference_run(setup, reference);
    records = profile_run(setup, profile_path);
  } catch (const std::exception& e) {
    std::cerr << "vprec explore: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "vprec explore: " << records.size() << " call-sites profiled\n";
  write_file_atomic(setup.workdir / "initial.cfg", write_config(initial_config(records)));

  ExploreOptions options;
  options.range_margin = args.range_margin;
  options.explore_range = args.explore_range;
  options.certificates = !args.no_certificates;
  options.max_sites = args.max_sites;

  SubjectRunner runner(setup, reference);
  const ExplorationResult result = explore_sites(records, runner, options);

  write_file_atomic(config_path, write_config(result.config));
  write_file_atomic(log_path, format_trial_log(result.trial_log));
  write_file_atomic(setup.workdir / "exploration.json", exploration_json(result));
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";

  int total = 0;
  for (const auto& s : result.sites) total += s.mode == SiteMode::vprec ? s.precision : 52;
  std::cerr << "vprec explore: " << result.trial_log.size() << " trials, sum p = " << total
            << " of " << 52 * result.sites.size() << "; config written to " << config_path.string()
            << "\n";
  return result.validation_passed ? 0 : 2;
}

struct ReportArgs {
  fs::path profile;
  fs::path config;
  std::size_t top = 50;
  std::optional<fs::path> csv;
  std::optional<fs::path> svg_dir;
};

int run_report(const ReportArgs& args) {
  try {
    const auto records = load_profile(args.profile);
    const auto config = load_config(args.config);
    const Report report = build_report(records, config, args.top);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

    const std::string csv = write_csv(report);
    if (args.csv) {
      write_file_atomic(*args.csv, csv);
    } else {
      std::cout << csv;
    }
    if (args.svg_dir) {
      fs::create_directories(*args.svg_dir);
      const Charts charts = render_charts(report);
      write_file_atomic(*args.svg_dir / "calls.svg", charts.counts);
      write_file_atomic(*args.svg_dir / "dynamic_range.svg", charts.dynamic_range);
      write_file_atomic(*args.svg_dir / "precision.svg", charts.precision);
    }
    for (const auto& pair : suggest_sincos(records)) {
      std::cerr << "heuristic: sin " << format_hex64(pair.sin_id) << " and cos "
                << format_hex64(pair.cos_id)
                << " share call count and operand interval; consider fusing into sincos()\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "vprec report: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int run_init_config(const fs::path& profile, const std::optional<fs::path>& output) {
  try {
    const std::string text = write_config(initial_config(load_profile(profile)));
    if (output) {
      write_file_atomic(*output, text);
    } else {
      std::cout << text;
    }
  } catch (const std::exception& e) {
    std::cerr << "vprec init-config: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-call-site math library precision profiling and exploration"};
  app.require_subcommand(1);

  ExploreArgs ex;
  auto* explore = app.add_subcommand("explore", "search minimal output precision per call-site");
  explore->add_option("--subject", ex.subject, "subject command, run through /bin/sh -c")
      ->required();
  explore->add_option("--workdir", ex.workdir, "scratch directory");
  explore->add_option("--tol-rel", ex.tol_rel, "relative tolerance")
      ->check(CLI::NonNegativeNumber);
  explore->add_option("--tol-abs", ex.tol_abs, "absolute tolerance")
      ->check(CLI::NonNegativeNumber);
  explore->add_option("--checker", ex.checker,
                      "external check, invoked with candidate and reference output paths");
  explore->add_option("--output-config", ex.output_config, "optimized config path");
  explore->add_option("--profile", ex.profile, "profile path");
  explore->add_option("--trial-log", ex.trial_log, "trial log path");
  explore->add_option("--range-margin", ex.range_margin, "extra exponent bits")
      ->check(CLI::Range(0, 10));
  explore->add_flag("--explore-range", ex.explore_range, "binary search exponent bits too");
  explore->add_flag("--no-certificates", ex.no_certificates, "skip minimality re-checks");
  explore->add_option("--max-sites", ex.max_sites, "explore only the most frequent N sites");
  explore->add_option("--interposer", ex.interposer, "path to libvprec-libm.so");
  explore->add_option("--timeout", ex.timeout_s, "per-run timeout in seconds (0: none)")
      ->check(CLI::NonNegativeNumber);

  ReportArgs rep;
  auto* report = app.add_subcommand("report", "per-site CSV table and SVG charts");
  report->add_option("--profile", rep.profile, "profile file")->required();
  report->add_option("--config", rep.config, "optimized config")->required();
  report->add_option("--top", rep.top, "number of sites")->check(CLI::PositiveNumber);
  report->add_option("--csv", rep.csv, "CSV output (default: stdout)");
  report->add_option("--svg-dir", rep.svg_dir, "directory for SVG charts");

  fs::path init_profile;
  std::optional<fs::path> init_output;
  auto* init = app.add_subcommand("init-config", "binary64 config for every profiled site");
  init->add_option("--profile", init_profile, "profile file")->required();
  init->add_option("--output", init_output, "config path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (explore->parsed()) return run_explore(ex);
  if (report->parsed()) return run_report(rep);
  return run_init_config(init_profile, init_output);
}
