// areal: run experiments, sweeps and the verification suite.
//
//   areal run <config.json>
//   areal sweep <sweep.json>
//   areal verify-all [--budget N] [--threads N] [--output PATH]

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "areal/harness.hpp"

namespace {

areal::Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw areal::InvalidConfig("cannot open " + path);
  try {
    return areal::Json::parse(in);
  } catch (const areal::Json::parse_error& e) {
    throw areal::InvalidConfig(path + ": " + e.what());
  }
}

int cmd_run(const std::string& path) {
  const auto config = areal::experiment_from_json(load_json(path));
  const auto result = areal::run_experiment(config);
  if (!areal::write_outputs(config, result, std::cout)) {
    std::cerr << "areal: cannot write " << config.output_path.value_or("<stdout>") << '\n';
    return areal::kExitInvalidConfig;
  }
  std::cerr << "areal: " << result.report.at("status").get<std::string>() << '\n';
  return result.exit_code;
}

int cmd_sweep(const std::string& path) {
  const auto config = areal::sweep_from_json(load_json(path));
  const auto rows = areal::sweep(config);
  if (config.output_path) {
    std::ofstream out(*config.output_path);
    if (!out) {
      std::cerr << "areal: cannot write " << *config.output_path << '\n';
      return areal::kExitInvalidConfig;
    }
    areal::write_sweep_csv(out, rows);
  } else {
    areal::write_sweep_csv(std::cout, rows);
  }
  return areal::kExitPass;
}

int cmd_verify(std::uint64_t budget, unsigned threads, const std::string& output) {
  areal::VerifyOptions opts;
  opts.budget = budget;
  opts.threads = threads;
  const auto result = areal::verify_all(opts);
  const std::string text = result.report.dump(2) + "\n";
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output);
    if (!out) {
      std::cerr << "areal: cannot write " << output << '\n';
      return areal::kExitInvalidConfig;
    }
    out << text;
  }
  const auto& s = result.report.at("summary");
  std::cerr << "areal: verify-all " << result.report.at("status").get<std::string>() << " (" << s.at("passed")
            << " passed, " << s.at("failed") << " failed, " << s.at("skipped") << " skipped, "
            << s.at("budget_exceeded") << " over budget)\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact census and verification of area-equivalence classes of point configurations"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run = app.add_subcommand("run", "Run the checks of an experiment config");
  run->add_option("config", run_path, "Experiment config (JSON)")->required();

  std::string sweep_path;
  auto* sw = app.add_subcommand("sweep", "Emit class proportions over a parameter sweep as CSV");
  sw->add_option("config", sweep_path, "Sweep config (JSON)")->required();

  std::uint64_t budget = areal::kDefaultBudget;
  unsigned threads = 0;
  std::string output;
  auto* verify = app.add_subcommand("verify-all", "Run every check over the standard ring matrix");
  verify->add_option("--budget", budget, "Maximum visits per enumeration");
  verify->add_option("--threads", threads, "Worker threads (default: AREAL_THREADS, then all cores)");
  verify->add_option("--output", output, "Write the JSON report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : areal::kExitInvalidConfig;
  }

  try {
    if (*run) return cmd_run(run_path);
    if (*sw) return cmd_sweep(sweep_path);
    if (*verify) return cmd_verify(budget, threads, output);
  } catch (const areal::BudgetExceeded& e) {
    std::cerr << "areal: " << e.what() << '\n';
    return areal::kExitBudget;
  } catch (const areal::InvalidConfig& e) {
    std::cerr << "areal: invalid config: " << e.what() << '\n';
    return areal::kExitInvalidConfig;
  } catch (const areal::InvalidRingSpec& e) {
    std::cerr << "areal: invalid ring: " << e.what() << '\n';
    return areal::kExitInvalidConfig;
  } catch (const areal::Error& e) {
    std::cerr << "areal: " << e.what() << '\n';
    return areal::kExitInvalidConfig;
  }
  return areal::kExitInvalidConfig;
}
