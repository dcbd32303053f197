#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegaffect/bands.hpp"
#include "eegaffect/error.hpp"
#include "eegaffect/remez.hpp"
#include "eegaffect/signal_model.hpp"
#include "eegaffect/util.hpp"

namespace eegaffect {

struct FilterSpec {
  BandDefinition band;
  double transition_hz = 1.0;
  double passband_ripple_db = 1.0;
  double stopband_atten_db = 40.0;
  double sample_rate_hz = 128.0;

  double nyquist() const { return sample_rate_hz / 2.0; }

  void validate() const {
    if (!(transition_hz > 0.0 && passband_ripple_db > 0.0 && stopband_atten_db > 0.0 && sample_rate_hz > 0.0))
      fail(ErrorCode::InvalidSpec, "filter parameters must be positive");
    const double lo = band.low_hz - transition_hz;
    const double hi = band.high_hz + transition_hz;
    if (!(band.low_hz < band.high_hz && lo > 0.0 && hi < nyquist()))
      fail(ErrorCode::InvalidSpec, std::string(to_string(band.band)) + ": band edges +/- transition leave (0, fs/2)");
  }

  // Peak deviations implied by the dB targets (peak-to-peak passband ripple).
  double passband_deviation() const {
    const double g = std::pow(10.0, passband_ripple_db / 20.0);
    return (g - 1.0) / (g + 1.0);
  }
  double stopband_deviation() const { return std::pow(10.0, -stopband_atten_db / 20.0); }

  bool operator==(const FilterSpec&) const = default;
};

/// Default spec for a canonical band: 1 dB ripple, 40 dB attenuation,
/// transition width min(1 Hz, half the low edge).
inline FilterSpec default_filter_spec(Band b, double sample_rate_hz = 128.0) {
  const auto def = canonical_band(b);
  return FilterSpec{def, std::min(1.0, 0.5 * def.low_hz), 1.0, 40.0, sample_rate_hz};
}

struct FirCoefficients {
  std::vector<double> taps;
  FilterSpec design_spec;
  double passband_deviation = 0.0;  // achieved max |H - 1| in the passband
  double stopband_deviation = 0.0;  // achieved max |H| in the stopbands
  std::vector<double> extremal_freqs_hz;
  std::vector<double> extremal_errors;
  int remez_iterations = 0;

  std::size_t length() const { return taps.size(); }
};

struct DesignOptions {
  std::size_t max_taps = 4001;
  int grid_density = 16;
  int max_iterations = 100;
  std::size_t verify_points = 8192;
};

/// |sum_n taps[n] exp(-j 2 pi f n / fs)| for each f in [0, fs/2].
inline std::vector<double> freq_response(std::span<const double> taps, double sample_rate_hz,
                                         std::span<const double> freqs_hz) {
  std::vector<double> out;
  out.reserve(freqs_hz.size());
  for (double f : freqs_hz) {
    if (!(f >= 0.0 && f <= sample_rate_hz / 2.0))
      fail(ErrorCode::FrequencyOutOfRange, std::to_string(f) + " Hz");
    const double w = 2.0 * std::numbers::pi * f / sample_rate_hz;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t n = 0; n < taps.size(); ++n) {
      re += taps[n] * std::cos(w * static_cast<double>(n));
      im -= taps[n] * std::sin(w * static_cast<double>(n));
    }
    out.push_back(std::hypot(re, im));
  }
  return out;
}

inline std::vector<double> freq_response(const FirCoefficients& c, std::span<const double> freqs_hz) {
  return freq_response(c.taps, c.design_spec.sample_rate_hz, freqs_hz);
}

inline std::vector<double> uniform_grid(double fs, std::size_t points) {
  std::vector<double> f(points);
  for (std::size_t i = 0; i < points; ++i)
    f[i] = (fs / 2.0) * static_cast<double>(i) / static_cast<double>(points - 1);
  return f;
}

struct ResponseCheck {
  double passband_ripple_db = 0.0;   // 20 log10(max/min) over the passband
  double passband_deviation = 0.0;   // max |H - 1|
  double stopband_max = 0.0;         // max |H| over both stopbands
  bool meets_spec = false;
};

/// Evaluates the magnitude response on `freqs` and compares it with the spec.
inline ResponseCheck check_response(std::span<const double> taps, const FilterSpec& spec,
                                    std::span<const double> freqs) {
  const auto mag = freq_response(taps, spec.sample_rate_hz, freqs);
  double pmax = 0.0;
  double pmin = INFINITY;
  ResponseCheck rc;
  const double stop_lo = spec.band.low_hz - spec.transition_hz;
  const double stop_hi = spec.band.high_hz + spec.transition_hz;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const double f = freqs[i];
    if (f >= spec.band.low_hz && f <= spec.band.high_hz) {
      pmax = std::max(pmax, mag[i]);
      pmin = std::min(pmin, mag[i]);
      rc.passband_deviation = std::max(rc.passband_deviation, std::abs(mag[i] - 1.0));
    } else if (f <= stop_lo || f >= stop_hi) {
      rc.stopband_max = std::max(rc.stopband_max, mag[i]);
    }
  }
  rc.passband_ripple_db = pmin > 0.0 ? 20.0 * std::log10(pmax / pmin) : INFINITY;
  rc.meets_spec = rc.passband_ripple_db <= spec.passband_ripple_db &&
                  rc.stopband_max <= spec.stopband_deviation();
  return rc;
}

/// Herrmann/Kaiser length estimate for one transition, rounded up to odd.
inline std::size_t estimate_length(const FilterSpec& spec) {
  const double dp = std::log10(spec.passband_deviation());
  const double ds = std::log10(spec.stopband_deviation());
  const double dinf = (0.005309 * dp * dp + 0.07114 * dp - 0.4761) * ds - (0.00266 * dp * dp + 0.5941 * dp + 0.4278);
  const double fk = 11.01217 + 0.51244 * (dp - ds);
  const double df = spec.transition_hz / spec.sample_rate_hz;
  auto n = static_cast<std::size_t>(std::ceil(dinf / df - fk * df + 1.0));
  if (n < 3) n = 3;
  return n % 2 == 0 ? n + 1 : n;
}

/// Equiripple band-pass design. Starts from the length estimate and grows
/// by two taps until the response meets the spec on the verification grids.
inline FirCoefficients design_bandpass(const FilterSpec& spec, const DesignOptions& opt = {}) {
  spec.validate();
  const double fs = spec.sample_rate_hz;
  const double dp = spec.passband_deviation();
  const double ds = spec.stopband_deviation();
  const remez::Band bands[] = {
      {0.0, (spec.band.low_hz - spec.transition_hz) / fs, 0.0, dp / ds},
      {spec.band.low_hz / fs, spec.band.high_hz / fs, 1.0, 1.0},
      {(spec.band.high_hz + spec.transition_hz) / fs, 0.5, 0.0, dp / ds},
  };
  std::size_t len = estimate_length(spec);
  if (len > opt.max_taps)
    fail(ErrorCode::InfeasibleSpec, "estimated length " + std::to_string(len) + " exceeds cap " + std::to_string(opt.max_taps));

  const auto grid8k = uniform_grid(fs, opt.verify_points);
  bool saw_nonconvergence = false;
  for (; len <= opt.max_taps; len += 2) {
    remez::Result r;
    try {
      r = remez::design(len, bands, {opt.grid_density, opt.max_iterations, 1e-4});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConvergenceFailure) throw;
      saw_nonconvergence = true;
      continue;
    }
    if (!r.converged) {
      saw_nonconvergence = true;
      continue;
    }
    const auto dense = uniform_grid(fs, std::max<std::size_t>(opt.verify_points, 16 * len));
    const auto c1 = check_response(r.taps, spec, grid8k);
    if (!c1.meets_spec) continue;
    const auto c2 = check_response(r.taps, spec, dense);
    if (!c2.meets_spec) continue;

    FirCoefficients out;
    out.taps = std::move(r.taps);
    out.design_spec = spec;
    out.passband_deviation = std::max(c1.passband_deviation, c2.passband_deviation);
    out.stopband_deviation = std::max(c1.stopband_max, c2.stopband_max);
    for (double f : r.extremal_freqs) out.extremal_freqs_hz.push_back(f * fs);
    out.extremal_errors = std::move(r.extremal_errors);
    out.remez_iterations = r.iterations;
    return out;
  }
  if (saw_nonconvergence)
    fail(ErrorCode::ConvergenceFailure, std::string(to_string(spec.band.band)) + ": exchange stalled before the cap");
  fail(ErrorCode::InfeasibleSpec, std::string(to_string(spec.band.band)) + ": spec not met within " +
                                      std::to_string(opt.max_taps) + " taps");
}

using FilterBank = std::vector<FirCoefficients>;

inline FilterBank design_default_bank(double sample_rate_hz = 128.0, const DesignOptions& opt = {}) {
  FilterBank bank(kBandOrder.size());
  parallel_for(kBandOrder.size(), kBandOrder.size(), [&](std::size_t i) {
    bank[i] = design_bandpass(default_filter_spec(kBandOrder[i], sample_rate_hz), opt);
  });
  return bank;
}

enum class FilterMode { ZeroPhase, Causal };

namespace detail {

// y[n] = sum_k taps[k] x[n-k] with zero initial state. Taps are symmetric,
// so this is y[n] = sum_k taps[k] p[n+k] over the zero-prefixed input p;
// accumulating one tap at a time over all n keeps the inner loop a
// vectorizable axpy.
inline Signal convolve_causal(std::span<const double> taps, std::span<const double> x) {
  const std::size_t len = taps.size();
  const std::size_t n = x.size();
  Signal padded(len - 1 + n, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + static_cast<std::ptrdiff_t>(len - 1));
  Signal y(n, 0.0);
  double* out = y.data();
  for (std::size_t k = 0; k < len; ++k) {
    const double h = taps[k];
    const double* w = padded.data() + k;
    for (std::size_t i = 0; i < n; ++i) out[i] += h * w[i];
  }
  return y;
}

}  // namespace detail

/// Number of leading output samples affected by the start-up transient.
inline std::size_t transient_length(const FirCoefficients& c, FilterMode mode) {
  return mode == FilterMode::Causal ? c.length() - 1 : 0;
}

/// ZeroPhase: forward-backward filtering over an odd (point) reflection of
/// L samples at each end; no delay, magnitude response squared.
/// Causal: plain convolution, delayed by (L-1)/2 with a transient of
/// transient_length() samples at the start.
inline Signal filter_signal(const FirCoefficients& c, std::span<const double> signal,
                            FilterMode mode = FilterMode::ZeroPhase) {
  const std::size_t len = c.length();
  const std::size_t n = signal.size();
  if (n <= len)
    fail(ErrorCode::SignalTooShort, std::to_string(n) + " samples for a " + std::to_string(len) + "-tap filter");
  if (mode == FilterMode::Causal) return detail::convolve_causal(c.taps, signal);

  Signal ext(n + 2 * len);
  for (std::size_t i = 0; i < len; ++i) {
    ext[i] = 2.0 * signal[0] - signal[len - i];
    ext[len + n + i] = 2.0 * signal[n - 1] - signal[n - 2 - i];
  }
  std::copy(signal.begin(), signal.end(), ext.begin() + static_cast<std::ptrdiff_t>(len));
  auto fwd = detail::convolve_causal(c.taps, ext);
  std::reverse(fwd.begin(), fwd.end());
  auto bwd = detail::convolve_causal(c.taps, fwd);
  std::reverse(bwd.begin(), bwd.end());
  return Signal(bwd.begin() + static_cast<std::ptrdiff_t>(len), bwd.begin() + static_cast<std::ptrdiff_t>(len + n));
}

struct BandKey {
  ChannelId channel;
  Band band;

  bool operator==(const BandKey&) const = default;
  auto operator<=>(const BandKey&) const = default;
};

struct BandSignal {
  ChannelId channel;
  BandDefinition band;
  Signal samples;
};

using BandSignals = std::map<BandKey, BandSignal>;

/// Filters every channel of `trial` through every filter of `bank`.
inline BandSignals extract_bands(const TrialRecording& trial, const FilterBank& bank, std::size_t workers = 1) {
  for (const auto& f : bank)
    if (f.design_spec.sample_rate_hz != trial.sample_rate_hz())
      fail(ErrorCode::SampleRateMismatch, "trial at " + std::to_string(trial.sample_rate_hz()) + " Hz, filter at " +
                                              std::to_string(f.design_spec.sample_rate_hz) + " Hz");
  const std::size_t nb = bank.size();
  const std::size_t jobs = trial.n_channels() * nb;
  std::vector<Signal> out(jobs);
  parallel_for(jobs, workers, [&](std::size_t i) {
    out[i] = filter_signal(bank[i % nb], trial.channels()[i / nb].samples, FilterMode::ZeroPhase);
  });
  BandSignals result;
  for (std::size_t i = 0; i < jobs; ++i) {
    const auto& ch = trial.channels()[i / nb].id;
    const auto& def = bank[i % nb].design_spec.band;
    result.emplace(BandKey{ch, def.band}, BandSignal{ch, def, std::move(out[i])});
  }
  return result;
}

// Filter bank JSON: spec fields plus taps printed with 17 significant digits.
inline std::string filter_bank_to_json(const FilterBank& bank) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "{\n  \"filters\": [";
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const auto& f = bank[i];
    const auto& s = f.design_spec;
    os << (i ? ",\n" : "\n") << "    {\n";
    os << "      \"band\": \"" << to_string(s.band.band) << "\",\n";
    os << "      \"low_hz\": " << num(s.band.low_hz) << ",\n";
    os << "      \"high_hz\": " << num(s.band.high_hz) << ",\n";
    os << "      \"transition_hz\": " << num(s.transition_hz) << ",\n";
    os << "      \"passband_ripple_db\": " << num(s.passband_ripple_db) << ",\n";
    os << "      \"stopband_atten_db\": " << num(s.stopband_atten_db) << ",\n";
    os << "      \"sample_rate_hz\": " << num(s.sample_rate_hz) << ",\n";
    os << "      \"achieved_passband_deviation\": " << num(f.passband_deviation) << ",\n";
    os << "      \"achieved_stopband_deviation\": " << num(f.stopband_deviation) << ",\n";
    os << "      \"num_taps\": " << f.taps.size() << ",\n";
    os << "      \"taps\": [";
    for (std::size_t k = 0; k < f.taps.size(); ++k) os << (k ? ", " : "") << num(f.taps[k]);
    os << "]\n    }";
  }
  os << "\n  ]\n}\n";
  return os.str();
}

inline FilterBank filter_bank_from_json(const std::string& text) {
  FilterBank bank;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& f : j.at("filters")) {
      FirCoefficients c;
      c.design_spec.band = {parse_band(f.at("band").get<std::string>()), f.at("low_hz").get<double>(),
                            f.at("high_hz").get<double>()};
      c.design_spec.transition_hz = f.at("transition_hz").get<double>();
      c.design_spec.passband_ripple_db = f.at("passband_ripple_db").get<double>();
      c.design_spec.stopband_atten_db = f.at("stopband_atten_db").get<double>();
      c.design_spec.sample_rate_hz = f.at("sample_rate_hz").get<double>();
      c.passband_deviation = f.value("achieved_passband_deviation", 0.0);
      c.stopband_deviation = f.value("achieved_stopband_deviation", 0.0);
      c.taps = f.at("taps").get<std::vector<double>>();
      if (c.taps.empty() || c.taps.size() % 2 == 0) fail(ErrorCode::ParseError, "filter taps must have odd length");
      bank.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("filter bank: ") + e.what());
  }
  return bank;
}

}  // namespace eegaffect
