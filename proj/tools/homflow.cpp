// homflow: runs one configured experiment and writes CSV/JSON artifacts.
//
//   homflow <experiment> --config FILE [--out DIR] [--seed N] [--format csv|json|both]
//
// Exit codes: 0 all checks pass, 1 a check or the run failed, 2 bad config.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "homflow/experiment.hpp"

using namespace homflow;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Options {
  std::string config;
  std::string out = "out";
  long long seed = -1;
  std::string format = "both";
};

void print_summary(const VerdictReport& rep) {
  for (const auto& s : rep.slopes) {
    std::printf("%s slope %-10s %-24s %.4f  band [%g, %g]  (%zu points)\n", s.report.pass ? "PASS" : "FAIL",
                s.method.c_str(), s.column.c_str(), s.report.slope, s.report.lo, s.report.hi, s.report.window_h.size());
  }
  for (const auto& c : rep.checks) {
    std::printf("%s check %-40s measured %.6g  expected %g  tol %g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                c.measured, c.expected, c.tolerance);
  }
  for (const auto& n : rep.notes) std::printf("note: %s\n", n.c_str());
  std::printf("%s %s\n", rep.pass() ? "PASS" : "FAIL", rep.experiment.c_str());
}

int run(const std::string& kind, const Options& opt) {
  ExperimentConfig config;
  ReportFormat format = ReportFormat::Both;
  try {
    config = ExperimentConfig::load(opt.config);
    if (to_string(config.kind) != kind) {
      throw ConfigError("config describes experiment '" + to_string(config.kind) + "' but subcommand is '" + kind + "'");
    }
    if (opt.seed >= 0) {
      config.seed = static_cast<std::uint64_t>(opt.seed);
      config.echo.emplace_back("seed (command line)", std::to_string(opt.seed));
    }
    if (opt.format == "csv") format = ReportFormat::Csv;
    else if (opt.format == "json") format = ReportFormat::Json;
    config.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const VerdictReport rep = run_experiment(config);
    const std::string stem = config.output_prefix.empty() ? rep.experiment : config.output_prefix;
    for (const auto& path : emit_report(rep, opt.out, stem, format)) std::printf("wrote %s\n", path.c_str());
    print_summary(rep);
    return rep.pass() ? kExitPass : kExitFail;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"homflow experiment runner"};
  app.require_subcommand(1);
  Options opt;
  std::string chosen;
  for (const auto& name : experiment_kind_names()) {
    auto* sub = app.add_subcommand(name, "run a " + name + " experiment");
    sub->add_option("--config", opt.config, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--seed", opt.seed, "override the start-point seed")->check(CLI::NonNegativeNumber);
    sub->add_option("--format", opt.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }
  return run(chosen, opt);
}
