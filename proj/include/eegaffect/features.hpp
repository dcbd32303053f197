#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eegaffect/bands.hpp"
#include "eegaffect/dataset_io.hpp"
#include "eegaffect/error.hpp"
#include "eegaffect/fir_filter.hpp"
#include "eegaffect/signal_model.hpp"

namespace eegaffect {

enum class FeatureMethod { StatsTime, StatsBand, Spd, Hoc };

inline constexpr std::array<FeatureMethod, 4> kAllMethods = {FeatureMethod::StatsTime, FeatureMethod::StatsBand,
                                                             FeatureMethod::Spd, FeatureMethod::Hoc};

inline std::string_view to_string(FeatureMethod m) {
  switch (m) {
    case FeatureMethod::StatsTime: return "stats_time";
    case FeatureMethod::StatsBand: return "stats_band";
    case FeatureMethod::Spd: return "spd";
    case FeatureMethod::Hoc: return "hoc";
  }
  return "?";
}

inline FeatureMethod parse_method(std::string_view s) {
  for (auto m : kAllMethods)
    if (to_string(m) == s) return m;
  fail(ErrorCode::ConfigError, "unknown feature method '" + std::string(s) + "'");
}

/// One column of a feature vector: `<channel>.<domain>.<name>`, where domain
/// is a band name, "time" or "hoc".
struct FeatureDescriptor {
  std::string channel;
  std::string domain;
  std::string name;

  std::string to_string() const { return channel + "." + domain + "." + name; }

  static FeatureDescriptor parse(std::string_view s) {
    const auto a = s.find('.');
    const auto b = a == std::string_view::npos ? a : s.find('.', a + 1);
    if (b == std::string_view::npos) fail(ErrorCode::ParseError, "bad feature descriptor '" + std::string(s) + "'");
    return {std::string(s.substr(0, a)), std::string(s.substr(a + 1, b - a - 1)), std::string(s.substr(b + 1))};
  }

  bool operator==(const FeatureDescriptor&) const = default;
};

using FeatureLayout = std::vector<FeatureDescriptor>;

struct FeatureVector {
  FeatureMethod method;
  std::vector<double> values;
  FeatureLayout layout;

  bool operator==(const FeatureVector&) const = default;
};

inline constexpr std::array<std::string_view, 6> kStatNames = {"mu", "sigma", "afd", "afd_norm", "asd", "asd_norm"};

struct StatFeatures {
  double mu = 0.0;
  double sigma = 0.0;
  double afd = 0.0;
  double afd_norm = 0.0;
  double asd = 0.0;
  double asd_norm = 0.0;

  std::array<double, 6> as_array() const { return {mu, sigma, afd, afd_norm, asd, asd_norm}; }
};

/// Mean, population standard deviation, mean absolute first difference
/// x[t+1]-x[t], mean absolute second difference x[t+2]-x[t], and the two
/// differences divided by sigma.
inline StatFeatures stat_features(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 3) fail(ErrorCode::SignalTooShort, "statistics need at least 3 samples");
  StatFeatures s;
  s.mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - s.mu) * (v - s.mu);
  s.sigma = std::sqrt(ss / static_cast<double>(n));
  if (!(s.sigma > 0.0)) fail(ErrorCode::DegenerateSignal, "zero standard deviation");
  double d1 = 0.0;
  for (std::size_t t = 0; t + 1 < n; ++t) d1 += std::abs(x[t + 1] - x[t]);
  double d2 = 0.0;
  for (std::size_t t = 0; t + 2 < n; ++t) d2 += std::abs(x[t + 2] - x[t]);
  s.afd = d1 / static_cast<double>(n - 1);
  s.asd = d2 / static_cast<double>(n - 2);
  s.afd_norm = s.afd / s.sigma;
  s.asd_norm = s.asd / s.sigma;
  return s;
}

namespace detail {

template <typename Fn>
auto tagged(const std::string& tag, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), tag + ": " + e.what());
  }
}

inline std::vector<ChannelId> trial_channel_order(const TrialRecording& trial) {
  std::vector<ChannelId> ids;
  for (const auto& ch : trial.channels()) ids.push_back(ch.id);
  return ids;
}

}  // namespace detail

/// 6 statistics per channel of the raw signal, channels in trial order.
inline FeatureVector time_stat_vector(const TrialRecording& trial) {
  FeatureVector fv{FeatureMethod::StatsTime, {}, {}};
  for (const auto& ch : trial.channels()) {
    const auto s = detail::tagged(ch.id.name(), [&] { return stat_features(ch.samples); });
    const auto vals = s.as_array();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      fv.values.push_back(vals[i]);
      fv.layout.push_back({ch.id.name(), "time", std::string(kStatNames[i])});
    }
  }
  return fv;
}

inline const BandSignal& find_band(const BandSignals& bands, const ChannelId& ch, Band b) {
  const auto it = bands.find({ch, b});
  if (it == bands.end())
    fail(ErrorCode::MissingBandSignal, ch.name() + "." + std::string(to_string(b)));
  return it->second;
}

/// 6 statistics per (channel, band); channel-major, bands in `band_order`.
inline FeatureVector band_stat_vector(const BandSignals& bands, std::span<const ChannelId> channels,
                                      std::span<const Band> band_order = kBandOrder) {
  FeatureVector fv{FeatureMethod::StatsBand, {}, {}};
  for (const auto& ch : channels) {
    for (Band b : band_order) {
      const auto& sig = find_band(bands, ch, b);
      const std::string tag = ch.name() + "." + std::string(to_string(b));
      const auto s = detail::tagged(tag, [&] { return stat_features(sig.samples); });
      const auto vals = s.as_array();
      for (std::size_t i = 0; i < vals.size(); ++i) {
        fv.values.push_back(vals[i]);
        fv.layout.push_back({ch.name(), std::string(to_string(b)), std::string(kStatNames[i])});
      }
    }
  }
  return fv;
}

/// log10 of the mean squared band signal, per (channel, band).
inline FeatureVector spd_vector(const BandSignals& bands, std::span<const ChannelId> channels,
                                std::span<const Band> band_order = kBandOrder) {
  FeatureVector fv{FeatureMethod::Spd, {}, {}};
  for (const auto& ch : channels) {
    for (Band b : band_order) {
      const auto& s = find_band(bands, ch, b).samples;
      double power = 0.0;
      for (double v : s) power += v * v;
      power /= static_cast<double>(s.size());
      if (!(power > 0.0)) fail(ErrorCode::ZeroPowerBand, ch.name() + "." + std::string(to_string(b)));
      fv.values.push_back(std::log10(power));
      fv.layout.push_back({ch.name(), std::string(to_string(b)), "spd"});
    }
  }
  return fv;
}

/// Applies the first-difference operator k-1 times (k = 1 is the identity).
inline Signal difference_series(std::span<const double> x, std::size_t k) {
  if (k < 1) fail(ErrorCode::InvalidSpec, "difference order must be >= 1");
  if (x.size() < k) fail(ErrorCode::SignalTooShort, "series shorter than difference order");
  Signal out(x.begin(), x.end());
  for (std::size_t pass = 1; pass < k; ++pass) {
    for (std::size_t t = 0; t + 1 < out.size(); ++t) out[t] = out[t + 1] - out[t];
    out.pop_back();
  }
  return out;
}

/// Symbol changes of the clipped series (v >= 0 -> 1, else 0).
inline std::size_t count_zero_crossings(std::span<const double> x) {
  if (x.size() < 2) fail(ErrorCode::SignalTooShort, "zero crossings need at least 2 samples");
  std::size_t count = 0;
  bool prev = x[0] >= 0.0;
  for (std::size_t t = 1; t < x.size(); ++t) {
    const bool cur = x[t] >= 0.0;
    count += cur != prev;
    prev = cur;
  }
  return count;
}

struct HocSequence {
  std::vector<std::size_t> d;  // d[k-1] = D_k

  bool operator==(const HocSequence&) const = default;
};

/// Centers once, then D_k = crossings of the (k-1)-times differenced series.
inline HocSequence hoc_sequence(std::span<const double> x, std::size_t max_order = 6) {
  if (max_order < 1) fail(ErrorCode::InvalidSpec, "HOC order must be >= 1");
  if (x.size() < max_order + 1)
    fail(ErrorCode::SignalTooShort, "HOC of order " + std::to_string(max_order) + " needs " +
                                        std::to_string(max_order + 1) + " samples");
  Signal z = center(x);
  HocSequence h;
  h.d.reserve(max_order);
  for (std::size_t k = 1; k <= max_order; ++k) {
    if (k > 1) {
      for (std::size_t t = 0; t + 1 < z.size(); ++t) z[t] = z[t + 1] - z[t];
      z.pop_back();
    }
    h.d.push_back(count_zero_crossings(z));
  }
  return h;
}

inline FeatureVector hoc_vector(const TrialRecording& trial, std::size_t max_order = 6) {
  FeatureVector fv{FeatureMethod::Hoc, {}, {}};
  for (const auto& ch : trial.channels()) {
    const auto h = detail::tagged(ch.id.name(), [&] { return hoc_sequence(ch.samples, max_order); });
    for (std::size_t k = 0; k < h.d.size(); ++k) {
      fv.values.push_back(static_cast<double>(h.d[k]));
      fv.layout.push_back({ch.id.name(), "hoc", "D" + std::to_string(k + 1)});
    }
  }
  return fv;
}

/// Dispatches one method on a channel-selected trial. `bands` may be null
/// for the time-domain methods.
inline FeatureVector extract_features(FeatureMethod method, const TrialRecording& trial, const BandSignals* bands,
                                      std::size_t hoc_order = 6) {
  switch (method) {
    case FeatureMethod::StatsTime: return time_stat_vector(trial);
    case FeatureMethod::Hoc: return hoc_vector(trial, hoc_order);
    case FeatureMethod::StatsBand:
    case FeatureMethod::Spd: {
      if (bands == nullptr) fail(ErrorCode::MissingBandSignal, "band signals required");
      const auto ids = detail::trial_channel_order(trial);
      return method == FeatureMethod::Spd ? spd_vector(*bands, ids) : band_stat_vector(*bands, ids);
    }
  }
  fail(ErrorCode::InvalidSpec, "unknown method");
}

inline FeatureMethod infer_method(const FeatureLayout& layout) {
  if (layout.empty()) fail(ErrorCode::ParseError, "empty layout");
  const auto& d = layout.front();
  if (d.domain == "time") return FeatureMethod::StatsTime;
  if (d.domain == "hoc") return FeatureMethod::Hoc;
  if (d.name == "spd") return FeatureMethod::Spd;
  return FeatureMethod::StatsBand;
}

struct KeyedFeatures {
  TrialKey key;
  FeatureVector features;
};

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV: `subject_id,trial_id,<descriptor>...`, one row per trial.
inline void write_features_csv(std::ostream& os, std::span<const KeyedFeatures> rows) {
  if (rows.empty()) return;
  const auto& layout = rows.front().features.layout;
  os << "subject_id,trial_id";
  for (const auto& d : layout) os << ',' << d.to_string();
  os << '\n';
  for (const auto& r : rows) {
    if (r.features.layout != layout) fail(ErrorCode::LayoutMismatch, "rows disagree on layout");
    os << r.key.subject_id << ',' << r.key.trial_id;
    for (double v : r.features.values) os << ',' << format_real(v);
    os << '\n';
  }
}

inline std::vector<KeyedFeatures> read_features_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) return {};
  const auto header = detail::split_csv_line(line);
  if (header.size() < 3 || header[0] != "subject_id" || header[1] != "trial_id")
    fail(ErrorCode::ParseError, "feature CSV header must start with subject_id,trial_id");
  FeatureLayout layout;
  for (std::size_t i = 2; i < header.size(); ++i) layout.push_back(FeatureDescriptor::parse(header[i]));
  const auto method = infer_method(layout);
  std::vector<KeyedFeatures> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    const std::string where = "features:" + std::to_string(lineno);
    if (cells.size() != header.size()) fail(ErrorCode::ParseError, where + ": wrong column count");
    KeyedFeatures kf{{static_cast<int>(detail::parse_real(cells[0], where)),
                      static_cast<int>(detail::parse_real(cells[1], where))},
                     {method, {}, layout}};
    for (std::size_t i = 2; i < cells.size(); ++i) kf.features.values.push_back(detail::parse_real(cells[i], where));
    out.push_back(std::move(kf));
  }
  return out;
}

}  // namespace eegaffect
