// srs: simultaneous reconstruction and segmentation experiments.
//
//   srs run   --config FILE [--phantom piecewise|smooth] [--n INT] [--noise FLOAT]
//             [--variant model-9|model-16] [--trials INT] [--seed INT] [--out DIR]
//   srs sweep --config FILE --sides 64,128,256
//
// Exit codes: 0 success, 1 configuration error, 2 some trials failed.

#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srs/experiment.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::string> phantom;
  std::optional<int> n;
  std::optional<double> noise;
  std::optional<std::string> variant;
  std::optional<int> trials;
  std::optional<long long> seed;
  std::optional<std::string> out;
  std::optional<std::string> pgm;
  std::optional<std::string> export_matrix;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key=value configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--phantom", o.phantom, "piecewise or smooth");
  cmd->add_option("--n", o.n, "grid side length");
  cmd->add_option("--noise", o.noise, "relative noise level");
  cmd->add_option("--variant", o.variant, "model-9 or model-16");
  cmd->add_option("--trials", o.trials, "number of noise realizations");
  cmd->add_option("--seed", o.seed, "seed of the first trial");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--pgm", o.pgm, "ascii (P2) or binary (P5)");
  cmd->add_option("--set", o.overrides, "extra key=value override (repeatable)");
}

// Preset of the chosen phantom, then the file, then command-line flags.
srs::ExperimentConfig build_config(const CommonOptions& o) {
  auto file = srs::read_config_file(o.config);
  std::string phantom = "piecewise";
  if (auto it = file.find("phantom"); it != file.end()) phantom = it->second;
  if (o.phantom) phantom = *o.phantom;
  if (phantom != "piecewise" && phantom != "smooth")
    throw srs::ParameterError("phantom must be piecewise or smooth");
  auto cfg = srs::ExperimentConfig::preset(phantom == "smooth" ? srs::PhantomKind::Smooth
                                                               : srs::PhantomKind::Piecewise);
  for (const auto& [k, v] : file) srs::apply_setting(cfg, k, v);
  srs::apply_setting(cfg, "phantom", phantom);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw srs::ParameterError("--set expects key=value");
    srs::apply_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.n) cfg.n = *o.n;
  if (o.noise) cfg.noise = *o.noise;
  if (o.variant) cfg.variant = srs::parse_variant(*o.variant);
  if (o.trials) cfg.trials = *o.trials;
  if (o.seed) srs::apply_setting(cfg, "seed", std::to_string(*o.seed));
  if (o.out) cfg.out_dir = *o.out;
  if (o.pgm) srs::apply_setting(cfg, "pgm", *o.pgm);
  if (o.export_matrix) cfg.export_matrix = *o.export_matrix;
  cfg.validate();
  return cfg;
}

void print_report(const srs::RunReport& r) {
  std::cout << "n=" << r.n << " detectors=" << r.detectors << " rays=" << r.rays
            << " pixels=" << r.pixels << '\n';
  for (const auto& t : r.trials)
    std::cout << "  seed " << t.seed << ": rec_err=" << t.rec_err << " seg_err=" << t.seg_err
              << " seconds=" << t.seconds << " iters=" << t.outer_iters << " " << t.status
              << '\n';
  std::cout << "  mean rec_err=" << r.mean_rec_err << " (sd " << r.std_rec_err
            << ") seg_err=" << r.mean_seg_err << " (sd " << r.std_seg_err
            << ") seconds=" << r.mean_seconds << '\n';
}

std::vector<int> parse_sides(const std::string& text) {
  std::vector<int> sides;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      sides.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw srs::ParameterError("bad --sides entry '" + item + "'");
    }
  }
  if (sides.empty()) throw srs::ParameterError("--sides is empty");
  return sides;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous reconstruction and segmentation for parallel-beam CT"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run = app.add_subcommand("run", "run repeated trials of one configuration");
  add_common(run, run_opts);
  run->add_option("--export-matrix", run_opts.export_matrix,
                  "write the system matrix as 'row col value' triplets");

  CommonOptions sweep_opts;
  std::string sides_text;
  auto* sweep = app.add_subcommand("sweep", "time the solver across grid sizes");
  add_common(sweep, sweep_opts);
  sweep->add_option("--sides", sides_text, "comma-separated grid sides")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run) {
      const auto cfg = build_config(run_opts);
      const auto report = srs::run_experiment(cfg);
      print_report(report);
      return report.failed_trials() == 0 ? 0 : 2;
    }
    const auto cfg = build_config(sweep_opts);
    const auto reports = srs::scale_sweep(cfg, parse_sides(sides_text));
    std::size_t failed = 0;
    for (const auto& r : reports) {
      print_report(r);
      failed += r.failed_trials();
    }
    return failed == 0 ? 0 : 2;
  } catch (const srs::ParameterError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const srs::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 1;
  }
}
