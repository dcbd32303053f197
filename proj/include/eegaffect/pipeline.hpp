#pragma once

// End-to-end experiment grid: extract -> label -> cross-validate -> report,
// driven by one JSON config. Also the synthetic dataset recipes and the CSV
// converter used by the command-line tool.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegaffect/classifiers.hpp"
#include "eegaffect/dataset_io.hpp"
#include "eegaffect/error.hpp"
#include "eegaffect/evaluation.hpp"
#include "eegaffect/features.hpp"
#include "eegaffect/fir_filter.hpp"
#include "eegaffect/labeling.hpp"
#include "eegaffect/signal_model.hpp"
#include "eegaffect/util.hpp"

namespace eegaffect {

enum ExitCode : int { kExitOk = 0, kExitCellFailure = 1, kExitUsage = 2 };

struct FilterOverride {
  std::optional<double> transition_hz;
  std::optional<double> passband_ripple_db;
  std::optional<double> stopband_atten_db;
};

struct PipelineConfig {
  std::string dataset_path;
  std::string dataset_format = std::string(kCanonicalFormat);
  std::vector<std::string> channels = {"Fp1", "Fp2", "F3", "F4"};
  double baseline_s = 0.0;
  std::map<Band, FilterOverride> filter_overrides;
  std::size_t max_taps = 4001;
  std::vector<FeatureMethod> methods = {kAllMethods.begin(), kAllMethods.end()};
  std::vector<PartitionScheme> schemes = {kAllSchemes.begin(), kAllSchemes.end()};
  std::vector<AffectDimension> dimensions = {kAllDimensions.begin(), kAllDimensions.end()};
  std::vector<TrainConfig> classifiers = default_classifiers();
  std::size_t hoc_order = 6;
  std::size_t folds = 10;
  bool group_folds_by_subject = false;
  LabelingOptions labeling;
  std::size_t histogram_bins = 10;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string output_dir = "out";

  static std::vector<TrainConfig> default_classifiers() {
    TrainConfig svm;
    svm.kind = ClassifierKind::LinearSvm;
    TrainConfig rf;
    rf.kind = ClassifierKind::RandomForest;
    return {svm, rf};
  }

  FilterSpec filter_spec(Band b, double fs) const {
    auto spec = default_filter_spec(b, fs);
    if (const auto it = filter_overrides.find(b); it != filter_overrides.end()) {
      if (it->second.transition_hz) spec.transition_hz = *it->second.transition_hz;
      if (it->second.passband_ripple_db) spec.passband_ripple_db = *it->second.passband_ripple_db;
      if (it->second.stopband_atten_db) spec.stopband_atten_db = *it->second.stopband_atten_db;
    }
    return spec;
  }

  void validate() const {
    if (dataset_path.empty()) fail(ErrorCode::ConfigError, "dataset.path is required");
    try {
      parse_channels(channels);
    } catch (const Error& e) {
      fail(ErrorCode::ConfigError, std::string("channels: ") + e.what());
    }
    if (methods.empty() || schemes.empty() || dimensions.empty() || classifiers.empty())
      fail(ErrorCode::ConfigError, "grid axes must be non-empty");
    for (const auto& c : classifiers) c.validate();
    if (folds < 2) fail(ErrorCode::ConfigError, "folds.k must be >= 2");
    if (hoc_order < 1 || histogram_bins < 2 || jobs < 1) fail(ErrorCode::ConfigError, "invalid hoc/bins/jobs");
    if (baseline_s < 0.0) fail(ErrorCode::ConfigError, "baseline_s < 0");
  }
};

/// Fully resolved config; every defaulted value is written out.
inline nlohmann::ordered_json config_to_json(const PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["dataset"] = {{"path", c.dataset_path}, {"format", c.dataset_format}};
  j["channels"] = c.channels;
  j["baseline_s"] = c.baseline_s;
  nlohmann::ordered_json filters;
  filters["max_taps"] = c.max_taps;
  filters["mode"] = "zero_phase";
  filters["remez_grid_density"] = 16;
  filters["remez_max_iterations"] = 100;
  nlohmann::ordered_json bands;
  for (Band b : kBandOrder) {
    const auto s = c.filter_spec(b, 128.0);
    bands[std::string(to_string(b))] = {{"low_hz", s.band.low_hz},
                                        {"high_hz", s.band.high_hz},
                                        {"transition_hz", s.transition_hz},
                                        {"passband_ripple_db", s.passband_ripple_db},
                                        {"stopband_atten_db", s.stopband_atten_db}};
  }
  filters["bands"] = bands;
  j["filters"] = filters;
  auto names = [](const auto& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.emplace_back(to_string(x));
    return out;
  };
  j["methods"] = names(c.methods);
  j["schemes"] = names(c.schemes);
  j["dimensions"] = names(c.dimensions);
  auto cls = nlohmann::ordered_json::array();
  for (const auto& t : c.classifiers) cls.push_back(to_json(t));
  j["classifiers"] = cls;
  j["hoc_order"] = c.hoc_order;
  j["folds"] = {{"k", c.folds}, {"stratified", true}, {"group_by_subject", c.group_folds_by_subject}};
  j["labeling"] = {{"contiguous_boundaries", c.labeling.contiguous_boundaries},
                   {"gap_ratings", c.labeling.contiguous_boundaries ? "assigned" : "excluded"}};
  j["histogram_bins"] = c.histogram_bins;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["output_dir"] = c.output_dir;
  return j;
}

inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    if (j.contains("dataset")) {
      c.dataset_path = j["dataset"].value("path", c.dataset_path);
      c.dataset_format = j["dataset"].value("format", c.dataset_format);
    }
    c.channels = j.value("channels", c.channels);
    c.baseline_s = j.value("baseline_s", c.baseline_s);
    if (j.contains("filters")) {
      const auto& f = j["filters"];
      c.max_taps = f.value("max_taps", c.max_taps);
      if (f.contains("mode") && f["mode"] != "zero_phase") fail(ErrorCode::ConfigError, "only zero_phase filtering is supported in the pipeline");
      if (f.contains("bands")) {
        for (const auto& [name, spec] : f["bands"].items()) {
          const Band b = parse_band(name);
          const auto def = canonical_band(b);
          if (spec.value("low_hz", def.low_hz) != def.low_hz || spec.value("high_hz", def.high_hz) != def.high_hz)
            fail(ErrorCode::ConfigError, "band edges are fixed; only filter tolerances can be overridden");
          FilterOverride o;
          if (spec.contains("transition_hz")) o.transition_hz = spec["transition_hz"].get<double>();
          if (spec.contains("passband_ripple_db")) o.passband_ripple_db = spec["passband_ripple_db"].get<double>();
          if (spec.contains("stopband_atten_db")) o.stopband_atten_db = spec["stopband_atten_db"].get<double>();
          c.filter_overrides[b] = o;
        }
      }
    }
    if (j.contains("methods")) {
      c.methods.clear();
      for (const auto& m : j["methods"]) c.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("schemes")) {
      c.schemes.clear();
      for (const auto& s : j["schemes"]) c.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("dimensions")) {
      c.dimensions.clear();
      for (const auto& d : j["dimensions"]) c.dimensions.push_back(parse_dimension(d.get<std::string>()));
    }
    if (j.contains("classifiers")) {
      c.classifiers.clear();
      for (const auto& t : j["classifiers"]) {
        if (t.is_string()) {
          TrainConfig tc;
          tc.kind = parse_classifier(t.get<std::string>());
          c.classifiers.push_back(tc);
        } else {
          c.classifiers.push_back(train_config_from_json(t));
        }
      }
    }
    c.hoc_order = j.value("hoc_order", c.hoc_order);
    if (j.contains("folds")) {
      c.folds = j["folds"].value("k", c.folds);
      c.group_folds_by_subject = j["folds"].value("group_by_subject", c.group_folds_by_subject);
    }
    if (j.contains("labeling"))
      c.labeling.contiguous_boundaries = j["labeling"].value("contiguous_boundaries", false);
    c.histogram_bins = j.value("histogram_bins", c.histogram_bins);
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
    c.output_dir = j.value("output_dir", c.output_dir);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    fail(ErrorCode::ConfigError, e.what());
  }
  c.validate();
  return c;
}

inline PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigError, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

// ------------------------------------------------------------------ synth

struct SynthClass {
  std::string name;
  double valence = 5.0;
  double arousal = 5.0;
  std::vector<SynthComponent> components;
  double noise_sigma = 0.0;
};

struct SynthRecipe {
  double duration_s = 63.0;
  double sample_rate_hz = 128.0;
  std::vector<std::string> channels = {"Fp1", "Fp2", "F3", "F4"};
  std::size_t trials_per_subject = 40;
  std::vector<SynthClass> classes;
};

/// "alpha-vs-beta": Low trials carry a 10 Hz alpha rhythm, High trials a
/// 20 Hz beta rhythm, each at 0 dB SNR against white noise.
inline SynthRecipe builtin_recipe(const std::string& name) {
  if (name == "alpha-vs-beta") {
    SynthRecipe r;
    const double amp = 20.0;
    const double sigma = amp / std::sqrt(2.0);
    r.classes.push_back({"low", 2.0, 2.0, {{Band::Alpha, amp, 10.0}}, sigma});
    r.classes.push_back({"high", 8.0, 8.0, {{Band::Beta, amp, 20.0}}, sigma});
    return r;
  }
  fail(ErrorCode::ConfigError, "unknown recipe '" + name + "'");
}

inline SynthRecipe recipe_from_json(const nlohmann::json& j) {
  SynthRecipe r;
  try {
    r.duration_s = j.value("duration_s", r.duration_s);
    r.sample_rate_hz = j.value("sample_rate_hz", r.sample_rate_hz);
    r.channels = j.value("channels", r.channels);
    r.trials_per_subject = j.value("trials_per_subject", r.trials_per_subject);
    for (const auto& c : j.at("classes")) {
      SynthClass sc;
      sc.name = c.value("name", std::string());
      sc.valence = c.at("valence").get<double>();
      sc.arousal = c.at("arousal").get<double>();
      sc.noise_sigma = c.value("noise_sigma", 0.0);
      for (const auto& comp : c.value("components", nlohmann::json::array()))
        sc.components.push_back({parse_band(comp.at("band").get<std::string>()), comp.at("amplitude_uv").get<double>(),
                                 comp.at("frequency_hz").get<double>()});
      r.classes.push_back(std::move(sc));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidSpec, std::string("recipe: ") + e.what());
  }
  return r;
}

/// Trial i belongs to class i mod |classes|; subject/trial ids follow a
/// trials_per_subject layout. Trial noise is seeded from (seed, i).
inline Dataset synth_dataset(const SynthRecipe& recipe, std::size_t n_trials, std::uint64_t seed) {
  if (n_trials == 0) fail(ErrorCode::InvalidSpec, "n_trials must be > 0");
  if (recipe.classes.empty()) fail(ErrorCode::InvalidSpec, "recipe has no classes");
  if (recipe.trials_per_subject == 0) fail(ErrorCode::InvalidSpec, "trials_per_subject must be > 0");
  std::vector<LabeledTrial> trials;
  for (std::size_t i = 0; i < n_trials; ++i) {
    const auto& cls = recipe.classes[i % recipe.classes.size()];
    SynthSpec spec;
    spec.duration_s = recipe.duration_s;
    spec.sample_rate_hz = recipe.sample_rate_hz;
    spec.components = cls.components;
    spec.noise_sigma = cls.noise_sigma;
    spec.seed = derive_seed(seed, i);
    spec.channels = parse_channels(recipe.channels);
    spec.subject_id = static_cast<int>(1 + i / recipe.trials_per_subject);
    spec.trial_id = static_cast<int>(1 + i % recipe.trials_per_subject);
    Ratings r{cls.valence, cls.arousal, std::nullopt, std::nullopt};
    trials.push_back({synth_trial(spec), r});
  }
  return Dataset(std::move(trials), Manifest{"synthetic", kFormatVersion});
}

// -------------------------------------------------------------------- run

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot write " + p.string());
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline bool uses_bands(const PipelineConfig& c) {
  for (auto m : c.methods)
    if (m == FeatureMethod::StatsBand || m == FeatureMethod::Spd) return true;
  return false;
}

// Reuses <out>/filter_bank.json when its specs match; designs otherwise.
inline FilterBank obtain_filter_bank(const PipelineConfig& c, double fs, const std::filesystem::path& out) {
  const auto path = out / "filter_bank.json";
  std::vector<FilterSpec> wanted;
  for (Band b : kBandOrder) wanted.push_back(c.filter_spec(b, fs));
  if (std::filesystem::exists(path)) {
    try {
      auto cached = filter_bank_from_json(read_text(path));
      bool match = cached.size() == wanted.size();
      for (std::size_t i = 0; match && i < wanted.size(); ++i) match = cached[i].design_spec == wanted[i];
      if (match) return cached;
    } catch (const Error&) {
      // stale or corrupt cache: redesign below
    }
  }
  DesignOptions opt;
  opt.max_taps = c.max_taps;
  FilterBank bank(wanted.size());
  parallel_for(wanted.size(), c.jobs, [&](std::size_t i) { bank[i] = design_bandpass(wanted[i], opt); });
  write_text(path, filter_bank_to_json(bank));
  return bank;
}

inline std::string cell_key(FeatureMethod m, PartitionScheme s, AffectDimension d, ClassifierKind k) {
  return std::string(to_string(m)) + "__" + std::string(to_string(s)) + "__" + std::string(to_string(d)) + "__" +
         std::string(to_string(k));
}

}  // namespace detail

struct CellOutcome {
  std::string key;
  FeatureMethod method;
  PartitionScheme scheme;
  AffectDimension dimension;
  ClassifierKind classifier;
  std::optional<CvResult> result;
  std::string error;
};

inline nlohmann::ordered_json cell_to_json(const CellOutcome& c) {
  nlohmann::ordered_json j;
  if (c.result) {
    j = cv_to_json(*c.result);
    j["status"] = "ok";
  } else {
    j["key"] = c.key;
    j["method"] = to_string(c.method);
    j["scheme"] = to_string(c.scheme);
    j["dimension"] = to_string(c.dimension);
    j["classifier"] = to_string(c.classifier);
    j["status"] = "failed";
    j["error"] = c.error;
  }
  return j;
}

inline CellOutcome cell_from_json(const nlohmann::json& j) {
  CellOutcome c;
  try {
    c.key = j.at("key").get<std::string>();
    c.method = parse_method(j.at("method").get<std::string>());
    c.scheme = parse_scheme(j.at("scheme").get<std::string>());
    c.dimension = parse_dimension(j.at("dimension").get<std::string>());
    c.classifier = parse_classifier(j.at("classifier").get<std::string>());
    if (j.at("status") == "ok") c.result = cv_from_json(j);
    else c.error = j.value("error", std::string());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("cell: ") + e.what());
  }
  return c;
}

/// Writes <out>/report.json and <out>/report.csv from cell outcomes.
inline void write_report(const std::filesystem::path& out, const nlohmann::ordered_json& config,
                         std::vector<CellOutcome> cells) {
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  std::vector<CvResult> ok;
  for (const auto& c : cells)
    if (c.result) ok.push_back(*c.result);
  const auto tab = tabulate(ok);

  nlohmann::ordered_json report;
  report["config"] = config;
  auto tables = nlohmann::ordered_json::array();
  for (const auto& t : tab.tables) {
    nlohmann::ordered_json tj;
    tj["classifier"] = to_string(t.classifier);
    tj["columns"] = t.columns;
    auto rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < t.methods.size(); ++i) {
      nlohmann::ordered_json row;
      row["method"] = to_string(t.methods[i]);
      auto vals = nlohmann::ordered_json::array();
      for (const auto& v : t.cells[i]) vals.push_back(v ? nlohmann::ordered_json(percent(*v)) : nlohmann::ordered_json(nullptr));
      row["accuracy_percent"] = vals;
      rows.push_back(row);
    }
    tj["rows"] = rows;
    tables.push_back(tj);
  }
  report["tables"] = tables;
  auto cj = nlohmann::ordered_json::array();
  std::size_t failed = 0;
  for (const auto& c : cells) {
    cj.push_back(cell_to_json(c));
    failed += c.result ? 0 : 1;
  }
  report["cells"] = cj;
  report["summary"] = {{"cells", cells.size()}, {"failed", failed}};
  report["warnings"] = tab.warnings;
  detail::write_text(out / "report.json", report.dump(2) + "\n");
  detail::write_text(out / "report.csv", tabulation_csv(tab));
}

struct RunSummary {
  std::vector<CellOutcome> cells;
  int exit_code = kExitOk;
};

/// Runs the whole (method x scheme x dimension x classifier) grid.
inline RunSummary run_pipeline(const PipelineConfig& cfg, std::ostream& log) {
  cfg.validate();
  namespace fs = std::filesystem;
  if (!fs::exists(cfg.dataset_path)) fail(ErrorCode::ConfigError, "dataset path does not exist: " + cfg.dataset_path);
  const fs::path out = cfg.output_dir;
  fs::create_directories(out);

  const auto resolved = config_to_json(cfg);
  detail::write_text(out / "config.resolved.json", resolved.dump(2) + "\n");

  const Dataset ds = load_dataset(cfg.dataset_path, cfg.dataset_format);
  if (ds.size() == 0) fail(ErrorCode::ConfigError, "dataset has no trials");
  const auto channels = parse_channels(cfg.channels);
  std::vector<TrialRecording> trials;
  std::map<TrialKey, Ratings> ratings;
  for (const auto& t : ds.trials()) {
    trials.push_back(drop_leading(select_channels(t.recording, channels), cfg.baseline_s));
    ratings[t.key()] = t.ratings;
  }
  log << "loaded " << trials.size() << " trials, " << channels.size() << " channels, " << trials.front().n_samples()
      << " samples\n";

  FilterBank bank;
  if (detail::uses_bands(cfg)) bank = detail::obtain_filter_bank(cfg, trials.front().sample_rate_hz(), out);

  // Features per method; a method whose extraction fails marks its cells failed.
  std::map<FeatureMethod, std::vector<KeyedFeatures>> features;
  std::map<FeatureMethod, std::string> feature_errors;
  {
    std::vector<std::vector<std::optional<FeatureVector>>> per_trial(trials.size());
    std::vector<std::vector<std::string>> errors(trials.size());
    parallel_for(trials.size(), cfg.jobs, [&](std::size_t i) {
      std::optional<BandSignals> bands;
      if (!bank.empty()) bands = extract_bands(trials[i], bank);
      for (auto m : cfg.methods) {
        try {
          per_trial[i].push_back(extract_features(m, trials[i], bands ? &*bands : nullptr, cfg.hoc_order));
          errors[i].emplace_back();
        } catch (const Error& e) {
          per_trial[i].emplace_back();
          errors[i].push_back("subject " + std::to_string(trials[i].subject_id()) + " trial " +
                              std::to_string(trials[i].trial_id()) + ": " + e.what());
        }
      }
    });
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
      const auto m = cfg.methods[mi];
      for (std::size_t i = 0; i < trials.size(); ++i) {
        if (!per_trial[i][mi]) {
          if (!feature_errors.count(m)) feature_errors[m] = errors[i][mi];
          continue;
        }
        features[m].push_back({{trials[i].subject_id(), trials[i].trial_id()}, std::move(*per_trial[i][mi])});
      }
      if (!feature_errors.count(m)) {
        std::ostringstream os;
        write_features_csv(os, features[m]);
        detail::write_text(out / "features" / (std::string(to_string(m)) + ".csv"), os.str());
      }
    }
  }

  std::vector<CellOutcome> cells;
  for (auto m : cfg.methods)
    for (auto s : cfg.schemes)
      for (auto d : cfg.dimensions)
        for (const auto& tc : cfg.classifiers)
          cells.push_back({detail::cell_key(m, s, d, tc.kind), m, s, d, tc.kind, std::nullopt, {}});

  parallel_for(cells.size(), cfg.jobs, [&](std::size_t ci) {
    auto& cell = cells[ci];
    if (const auto it = feature_errors.find(cell.method); it != feature_errors.end()) {
      cell.error = it->second;
      return;
    }
    try {
      const auto data = build_dataset(features.at(cell.method), ratings, cell.dimension, cell.scheme, cfg.labeling);
      TrainConfig tc;
      for (const auto& c : cfg.classifiers)
        if (c.kind == cell.classifier) tc = c;
      tc.seed = derive_seed(cfg.seed, hash_key(cell.key));
      const auto fold_seed = derive_seed(cfg.seed, hash_key("folds/" + column_key(cell.scheme, cell.dimension)));
      const auto plan = plan_folds(data.y, data.keys, cfg.folds, fold_seed, {cfg.group_folds_by_subject});
      auto res = cross_validate(data, tc, plan);
      res.labeling = cfg.labeling;
      const fs::path dir = out / "cells" / cell.key;
      if (data.class_counts().size() == 2) {
        std::vector<double> scores;
        std::vector<Label> labels;
        for (const auto& o : res.oof) {
          scores.push_back(o.score);
          labels.push_back(o.label);
        }
        detail::write_text(dir / "roc.csv", roc_csv(roc_curve(scores, labels)));
        std::vector<HistogramPair> hs;
        for (std::size_t f = 0; f < data.cols(); ++f) {
          try {
            hs.push_back(feature_histograms(data, f, cfg.histogram_bins));
          } catch (const Error& e) {
            if (e.code() != ErrorCode::ConstantFeature) throw;
            res.warnings.push_back(std::string("histogram skipped: ") + e.what());
          }
        }
        detail::write_text(dir / "histograms.csv", histograms_csv(hs));
      }
      cell.result = std::move(res);
    } catch (const Error& e) {
      cell.error = e.what();
    }
  });

  RunSummary summary;
  for (const auto& cell : cells) {
    detail::write_text(out / "cells" / cell.key / "result.json", cell_to_json(cell).dump(2) + "\n");
    if (!cell.result) summary.exit_code = kExitCellFailure;
    log << cell.key << ": " << (cell.result ? percent(cell.result->mean_accuracy) + "%" : "FAILED (" + cell.error + ")")
        << '\n';
  }
  write_report(out, resolved, cells);
  summary.cells = std::move(cells);
  return summary;
}

/// Re-tabulates <out>/cells/*/result.json into <out>/report.{json,csv}.
inline std::vector<CellOutcome> rebuild_report(const std::filesystem::path& out) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(out / "cells")) fail(ErrorCode::ConfigError, "no cells directory under " + out.string());
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(out / "cells"))
    if (fs::exists(e.path() / "result.json")) dirs.push_back(e.path());
  std::sort(dirs.begin(), dirs.end());
  std::vector<CellOutcome> cells;
  for (const auto& d : dirs) cells.push_back(cell_from_json(nlohmann::json::parse(detail::read_text(d / "result.json"))));
  nlohmann::ordered_json config;
  if (fs::exists(out / "config.resolved.json"))
    config = nlohmann::ordered_json::parse(detail::read_text(out / "config.resolved.json"));
  write_report(out, config, cells);
  return cells;
}

}  // namespace eegaffect
