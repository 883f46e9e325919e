#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "swingsim/scenario.hpp"

namespace {

using namespace swingsim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitSweepViolation = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
  std::string config;
  std::string out_dir = ".";
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool config_required) {
  auto* cfg = cmd->add_option("--config", opts.config, "scenario config file");
  if (config_required) cfg->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--format", opts.format, "output file format")
      ->check(CLI::IsMember({"csv", "json"}));
}

FileFormat format_of(const CommonOpts& opts) {
  return opts.format == "json" ? FileFormat::Json : FileFormat::Csv;
}

ScenarioSpec spec_from(const CommonOpts& opts, const std::string& preset) {
  if (!opts.config.empty()) {
    ScenarioSpec spec = load_scenario_file(opts.config);
    if (!preset.empty() && spec.name != preset) {
      if (spec.name != "custom")
        throw InvalidConfig("preset '" + preset +
                            "' conflicts with config scenario '" + spec.name +
                            "'");
      // Re-parse on top of the named preset.
      nlohmann::json doc;
      {
        std::ifstream in(opts.config);
        in >> doc;
      }
      doc["scenario"] = preset;
      spec = parse_scenario(doc);
    }
    return spec;
  }
  if (preset.empty())
    throw InvalidConfig("give a preset name or --config FILE");
  return scenario_preset(preset);
}

int execute(const ScenarioSpec& spec, const CommonOpts& opts) {
  const ScenarioResult result = run_scenario(spec);
  write_outputs(spec, result, opts.out_dir, format_of(opts), std::cout);
  if (result.sweep && !result.sweep->all_in_set_converged)
    return kExitSweepViolation;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"swing-equation simulation and region-of-attraction toolkit"};
  app.require_subcommand(1);

  std::string preset;
  CommonOpts run_opts, sweep_opts, level_opts, const_opts;

  auto* run = app.add_subcommand("run", "run a preset or configured scenario");
  run->add_option("preset", preset,
                  "preset name (example1, example2, example3, smib-compare, "
                  "smib-roa)");
  add_common(run, run_opts, false);

  auto* sweep =
      app.add_subcommand("sweep", "basin-of-attraction grid sweep");
  add_common(sweep, sweep_opts, true);

  auto* levelset =
      app.add_subcommand("levelset", "sample a level-set boundary");
  add_common(levelset, level_opts, true);

  auto* constants =
      app.add_subcommand("constants", "print scenario constants as JSON");
  constants->add_option("--config", const_opts.config, "scenario config file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return execute(spec_from(run_opts, preset), run_opts);
    }
    if (sweep->parsed()) {
      ScenarioSpec spec = spec_from(sweep_opts, "");
      spec.outputs = {OutputKind::VerdictGrid};
      return execute(spec, sweep_opts);
    }
    if (levelset->parsed()) {
      ScenarioSpec spec = spec_from(level_opts, "");
      spec.outputs = {OutputKind::LevelSet};
      return execute(spec, level_opts);
    }
    if (constants->parsed()) {
      const ScenarioSpec spec = spec_from(const_opts, "");
      std::cout << constants_report(spec.params).dump(2) << "\n";
      return kExitOk;
    }
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParams& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
