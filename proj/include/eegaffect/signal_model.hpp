#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eegaffect/bands.hpp"
#include "eegaffect/error.hpp"
#include "eegaffect/util.hpp"

namespace eegaffect {

// 10-20 labels accepted by ChannelId. Covers the 32 DEAP EEG channels plus
// the older T3/T4/T5/T6 aliases and a few midline/reference sites.
inline constexpr std::array<std::string_view, 41> kTenTwentyLabels = {
    "Fp1", "AF3", "F3",  "F7",  "FC5", "FC1", "C3",  "T7",  "CP5", "CP1", "P3",
    "P7",  "PO3", "O1",  "Oz",  "Pz",  "Fp2", "AF4", "Fz",  "F4",  "F8",  "FC6",
    "FC2", "Cz",  "C4",  "T8",  "CP6", "CP2", "P4",  "P8",  "PO4", "O2",  "Fpz",
    "T3",  "T4",  "T5",  "T6",  "A1",  "A2",  "F9",  "F10"};

class ChannelId {
 public:
  explicit ChannelId(std::string_view name) : name_(name) {
    if (std::find(kTenTwentyLabels.begin(), kTenTwentyLabels.end(), name) == kTenTwentyLabels.end())
      fail(ErrorCode::UnknownChannel, "'" + std::string(name) + "' is not a 10-20 label");
  }

  const std::string& name() const noexcept { return name_; }

  bool operator==(const ChannelId&) const = default;
  auto operator<=>(const ChannelId&) const = default;

 private:
  std::string name_;
};

inline std::vector<ChannelId> default_channels() {
  return {ChannelId("Fp1"), ChannelId("Fp2"), ChannelId("F3"), ChannelId("F4")};
}

inline std::vector<ChannelId> parse_channels(const std::vector<std::string>& names) {
  std::vector<ChannelId> out;
  out.reserve(names.size());
  for (const auto& n : names) out.emplace_back(n);
  return out;
}

using Signal = std::vector<double>;

struct ChannelData {
  ChannelId id;
  Signal samples;

  bool operator==(const ChannelData&) const = default;
};

/// One subject/trial multi-channel EEG segment in microvolts. Validated on
/// construction and immutable afterwards.
class TrialRecording {
 public:
  TrialRecording(int subject_id, int trial_id, double sample_rate_hz, std::vector<ChannelData> channels)
      : subject_id_(subject_id), trial_id_(trial_id), sample_rate_hz_(sample_rate_hz), channels_(std::move(channels)) {
    const std::string where = "subject " + std::to_string(subject_id) + " trial " + std::to_string(trial_id);
    if (subject_id < 1 || trial_id < 1) fail(ErrorCode::InvalidSpec, "ids must be >= 1 (" + where + ")");
    if (!(sample_rate_hz > 2.0 * kHighestBandEdgeHz) || !std::isfinite(sample_rate_hz))
      fail(ErrorCode::InvalidSpec, "sample rate must exceed 60 Hz (" + where + ")");
    if (channels_.empty()) fail(ErrorCode::DimensionMismatch, "no channels (" + where + ")");
    const std::size_t n = channels_.front().samples.size();
    if (n < 2) fail(ErrorCode::DimensionMismatch, "need at least 2 samples (" + where + ")");
    for (std::size_t i = 0; i < channels_.size(); ++i) {
      const auto& ch = channels_[i];
      if (ch.samples.size() != n)
        fail(ErrorCode::DimensionMismatch, ch.id.name() + " has " + std::to_string(ch.samples.size()) +
                                               " samples, expected " + std::to_string(n) + " (" + where + ")");
      for (std::size_t j = 0; j < i; ++j)
        if (channels_[j].id == ch.id) fail(ErrorCode::DuplicateChannel, ch.id.name() + " (" + where + ")");
      if (!std::all_of(ch.samples.begin(), ch.samples.end(), [](double v) { return std::isfinite(v); }))
        fail(ErrorCode::NonFiniteSample, ch.id.name() + " (" + where + ")");
    }
  }

  int subject_id() const noexcept { return subject_id_; }
  int trial_id() const noexcept { return trial_id_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t n_samples() const noexcept { return channels_.front().samples.size(); }
  std::size_t n_channels() const noexcept { return channels_.size(); }
  const std::vector<ChannelData>& channels() const noexcept { return channels_; }

  const ChannelData* find(const ChannelId& id) const noexcept {
    for (const auto& ch : channels_)
      if (ch.id == id) return &ch;
    return nullptr;
  }

  const Signal& channel(const ChannelId& id) const {
    const auto* ch = find(id);
    if (ch == nullptr) fail(ErrorCode::ChannelNotFound, id.name());
    return ch->samples;
  }

  bool operator==(const TrialRecording&) const = default;

 private:
  int subject_id_;
  int trial_id_;
  double sample_rate_hz_;
  std::vector<ChannelData> channels_;
};

struct Ratings {
  double valence = 5.0;
  double arousal = 5.0;
  std::optional<double> dominance;
  std::optional<double> liking;

  void validate() const {
    auto check = [](double r, const char* name) {
      if (!(r >= 1.0 && r <= 9.0))
        fail(ErrorCode::RatingOutOfRange, std::string(name) + "=" + std::to_string(r) + " outside [1, 9]");
    };
    check(valence, "valence");
    check(arousal, "arousal");
    if (dominance) check(*dominance, "dominance");
    if (liking) check(*liking, "liking");
  }

  bool operator==(const Ratings&) const = default;
};

struct TrialKey {
  int subject_id = 0;
  int trial_id = 0;

  bool operator==(const TrialKey&) const = default;
  auto operator<=>(const TrialKey&) const = default;
};

struct LabeledTrial {
  TrialRecording recording;
  Ratings ratings;

  TrialKey key() const { return {recording.subject_id(), recording.trial_id()}; }
  bool operator==(const LabeledTrial&) const = default;
};

struct Manifest {
  std::string source;
  int format_version = 1;

  bool operator==(const Manifest&) const = default;
};

/// Trials sorted by (subject_id, trial_id) with unique keys.
class Dataset {
 public:
  Dataset(std::vector<LabeledTrial> trials, Manifest manifest)
      : trials_(std::move(trials)), manifest_(std::move(manifest)) {
    std::sort(trials_.begin(), trials_.end(),
              [](const LabeledTrial& a, const LabeledTrial& b) { return a.key() < b.key(); });
    for (std::size_t i = 0; i < trials_.size(); ++i) {
      trials_[i].ratings.validate();
      if (i > 0 && trials_[i].key() == trials_[i - 1].key())
        fail(ErrorCode::DuplicateTrial, "subject " + std::to_string(trials_[i].key().subject_id) + " trial " +
                                            std::to_string(trials_[i].key().trial_id));
    }
  }

  const std::vector<LabeledTrial>& trials() const noexcept { return trials_; }
  const Manifest& manifest() const noexcept { return manifest_; }
  std::size_t size() const noexcept { return trials_.size(); }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<LabeledTrial> trials_;
  Manifest manifest_;
};

/// Returns a trial holding exactly `wanted`, in that order, data copied unchanged.
inline TrialRecording select_channels(const TrialRecording& trial, std::span<const ChannelId> wanted) {
  std::vector<ChannelData> out;
  out.reserve(wanted.size());
  for (const auto& id : wanted) {
    const auto* ch = trial.find(id);
    if (ch == nullptr) fail(ErrorCode::ChannelNotFound, id.name());
    out.push_back(*ch);
  }
  return TrialRecording(trial.subject_id(), trial.trial_id(), trial.sample_rate_hz(), std::move(out));
}

/// Drops the first `seconds * fs` samples of every channel (pre-trial baseline).
inline TrialRecording drop_leading(const TrialRecording& trial, double seconds) {
  if (seconds <= 0.0) return trial;
  const auto skip = static_cast<std::size_t>(std::llround(seconds * trial.sample_rate_hz()));
  if (skip + 2 > trial.n_samples()) fail(ErrorCode::SignalTooShort, "baseline longer than trial");
  std::vector<ChannelData> out;
  for (const auto& ch : trial.channels())
    out.push_back({ch.id, Signal(ch.samples.begin() + static_cast<std::ptrdiff_t>(skip), ch.samples.end())});
  return TrialRecording(trial.subject_id(), trial.trial_id(), trial.sample_rate_hz(), std::move(out));
}

inline double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline Signal center(std::span<const double> signal) {
  if (signal.empty()) fail(ErrorCode::EmptySignal);
  const double m = mean(signal);
  Signal out(signal.size());
  std::transform(signal.begin(), signal.end(), out.begin(), [m](double v) { return v - m; });
  return out;
}

struct SynthComponent {
  Band band;
  double amplitude_uv;
  double frequency_hz;
};

struct SynthSpec {
  double duration_s = 63.0;
  double sample_rate_hz = 128.0;
  std::vector<SynthComponent> components;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<ChannelId> channels = default_channels();
  int subject_id = 1;
  int trial_id = 1;

  void validate() const {
    if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) fail(ErrorCode::InvalidSpec, "duration and rate must be > 0");
    if (!(noise_sigma >= 0.0)) fail(ErrorCode::InvalidSpec, "noise_sigma < 0");
    for (const auto& c : components) {
      const auto def = canonical_band(c.band);
      if (!(c.frequency_hz > def.low_hz && c.frequency_hz < def.high_hz))
        fail(ErrorCode::InvalidSpec, std::to_string(c.frequency_hz) + " Hz not strictly inside " +
                                         std::string(to_string(c.band)));
    }
  }
};

/// Sum of sinusoids plus Gaussian noise per channel. Component phases are a
/// deterministic function of (seed, channel, component); noise streams are
/// seeded per channel, so the result is bit-reproducible for a given spec.
inline TrialRecording synth_trial(const SynthSpec& spec) {
  spec.validate();
  const auto n = static_cast<std::size_t>(std::llround(spec.duration_s * spec.sample_rate_hz));
  std::vector<ChannelData> channels;
  channels.reserve(spec.channels.size());
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    Signal x(n, 0.0);
    for (std::size_t k = 0; k < spec.components.size(); ++k) {
      const auto& comp = spec.components[k];
      const std::uint64_t h = derive_seed(derive_seed(spec.seed, c), k);
      const double phase = 2.0 * std::numbers::pi * static_cast<double>(h >> 11) * 0x1.0p-53;
      const double w = 2.0 * std::numbers::pi * comp.frequency_hz / spec.sample_rate_hz;
      for (std::size_t t = 0; t < n; ++t) x[t] += comp.amplitude_uv * std::sin(w * static_cast<double>(t) + phase);
    }
    if (spec.noise_sigma > 0.0) {
      std::mt19937_64 rng(derive_seed(spec.seed ^ 0xa5a5a5a5a5a5a5a5ULL, c));
      std::normal_distribution<double> noise(0.0, spec.noise_sigma);
      for (auto& v : x) v += noise(rng);
    }
    channels.push_back({spec.channels[c], std::move(x)});
  }
  return TrialRecording(spec.subject_id, spec.trial_id, spec.sample_rate_hz, std::move(channels));
}

}  // namespace eegaffect
