// eegaffect command-line driver: convert | synth | run | report.
// Exit codes: 0 success, 1 at least one grid cell failed, 2 usage/config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eegaffect/pipeline.hpp"

namespace fs = std::filesystem;
using namespace eegaffect;

namespace {

int do_convert(const std::string& input, const std::string& output, double fs_hz, const std::string& source) {
  const auto ds = read_csv_trials(input, fs_hz, source);
  write_dataset(ds, output);
  const auto& first = ds.trials().front().recording;
  std::cout << "wrote " << ds.size() << " trials, " << first.n_channels() << " channels, " << first.n_samples()
            << " samples to " << output << '\n';
  return kExitOk;
}

int do_synth(const std::string& recipe, std::size_t n_trials, std::uint64_t seed, const std::string& output) {
  SynthRecipe r;
  if (fs::exists(recipe)) {
    std::ifstream in(recipe);
    r = recipe_from_json(nlohmann::json::parse(in));
  } else {
    r = builtin_recipe(recipe);
  }
  const auto ds = synth_dataset(r, n_trials, seed);
  write_dataset(ds, output);
  std::cout << "wrote " << ds.size() << " synthetic trials to " << output << '\n';
  return kExitOk;
}

int do_run(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> jobs,
           std::optional<std::string> out) {
  auto cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (jobs) cfg.jobs = *jobs;
  if (out) cfg.output_dir = *out;
  cfg.validate();
  const auto summary = run_pipeline(cfg, std::cout);
  std::cout << "report: " << (fs::path(cfg.output_dir) / "report.json").string() << '\n';
  return summary.exit_code;
}

int do_report(const std::string& out) {
  const auto cells = rebuild_report(out);
  int code = kExitOk;
  for (const auto& c : cells)
    if (!c.result) code = kExitCellFailure;
  std::cout << "re-tabulated " << cells.size() << " cells into " << (fs::path(out) / "report.csv").string() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EEG valence/arousal feature extraction and evaluation toolkit"};
  app.require_subcommand(1);

  std::string conv_in;
  std::string conv_out;
  double conv_fs = 128.0;
  std::string conv_source = "csv import";
  auto* convert = app.add_subcommand("convert", "Convert per-trial CSV files into the canonical dataset format");
  convert->add_option("--input,-i", conv_in, "Directory with ratings.csv and s<subject>_t<trial>.csv files")->required();
  convert->add_option("--output,-o", conv_out, "Output dataset directory")->required();
  convert->add_option("--sample-rate", conv_fs, "Sampling rate in Hz")->capture_default_str();
  convert->add_option("--source", conv_source, "Free-text provenance stored in the manifest");

  std::string synth_recipe = "alpha-vs-beta";
  std::size_t synth_trials = 100;
  std::uint64_t synth_seed = 7;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
  synth->add_option("--recipe", synth_recipe, "Built-in recipe name or recipe JSON file")->capture_default_str();
  synth->add_option("--trials,-n", synth_trials, "Number of trials")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Master seed")->capture_default_str();
  synth->add_option("--out,-o", synth_out, "Output dataset directory")->required();

  std::string run_config;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::size_t> run_jobs;
  std::optional<std::string> run_out;
  auto* run = app.add_subcommand("run", "Run the feature x labeling x classifier grid");
  run->add_option("--config,-c", run_config, "Pipeline config (JSON)")->required();
  run->add_option("--seed", run_seed, "Override the master seed");
  run->add_option("--jobs,-j", run_jobs, "Override the worker count");
  run->add_option("--out,-o", run_out, "Override the output directory");

  std::string report_out;
  auto* report = app.add_subcommand("report", "Re-tabulate existing cell results");
  report->add_option("--out,-o", report_out, "Output directory of a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*convert) return do_convert(conv_in, conv_out, conv_fs, conv_source);
    if (*synth) return do_synth(synth_recipe, synth_trials, synth_seed, synth_out);
    if (*run) return do_run(run_config, run_seed, run_jobs, run_out);
    if (*report) return do_report(report_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
