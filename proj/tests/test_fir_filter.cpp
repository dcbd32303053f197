#include <gtest/gtest.h>

#include "eegaffect/features.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace eegaffect;
using fixtures::bank_filter;

namespace {

Signal unit_sine(double f, double seconds, double fs = 128.0) {
  Signal x(static_cast<std::size_t>(seconds * fs));
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(t) / fs);
  return x;
}

double mean_square(const Signal& s) {
  double p = 0.0;
  for (double v : s) p += v * v;
  return p / static_cast<double>(s.size());
}

}  // namespace

TEST(FreqResponse, TrivialFilters) {
  const std::vector<double> one = {1.0};
  const auto grid = uniform_grid(128.0, 65);
  for (double m : freq_response(one, 128.0, grid)) EXPECT_DOUBLE_EQ(m, 1.0);

  const std::vector<double> avg = {0.5, 0.5};
  const std::vector<double> ends = {0.0, 64.0};
  const auto r = freq_response(avg, 128.0, ends);
  EXPECT_DOUBLE_EQ(r[0], 1.0);
  EXPECT_NEAR(r[1], 0.0, 1e-15);

  const std::vector<double> bad = {65.0};
  EXPECT_THROW(freq_response(avg, 128.0, bad), Error);
}

TEST(FilterSpec, DefaultsAndValidation) {
  const auto delta = default_filter_spec(Band::Delta);
  EXPECT_DOUBLE_EQ(delta.transition_hz, 0.25);
  EXPECT_DOUBLE_EQ(default_filter_spec(Band::Alpha).transition_hz, 1.0);
  auto wide = delta;
  wide.transition_hz = 0.5;  // lower stopband edge would sit at 0 Hz
  try {
    wide.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
  }
}

TEST(DesignBandpass, DefaultBankMeetsSpecOnDenseGrids) {
  for (const auto& f : fixtures::default_bank()) {
    SCOPED_TRACE(std::string(to_string(f.design_spec.band.band)));
    EXPECT_EQ(f.length() % 2, 1u);
    EXPECT_LE(f.length(), 4001u);
    for (std::size_t points : {std::size_t{8192}, 16 * f.length()}) {
      const auto rc = check_response(f.taps, f.design_spec, uniform_grid(128.0, points));
      EXPECT_LE(rc.passband_ripple_db, 1.0);
      EXPECT_LE(rc.stopband_max, std::pow(10.0, -40.0 / 20.0));
    }
    for (std::size_t i = 0; i < f.length(); ++i) ASSERT_EQ(f.taps[i], f.taps[f.length() - 1 - i]);
  }
}

TEST(DesignBandpass, PassbandIsEquiripple) {
  for (const auto& f : fixtures::default_bank()) {
    SCOPED_TRACE(std::string(to_string(f.design_spec.band.band)));
    std::vector<double> errs;
    for (std::size_t i = 0; i < f.extremal_freqs_hz.size(); ++i) {
      const double hz = f.extremal_freqs_hz[i];
      if (hz >= f.design_spec.band.low_hz && hz <= f.design_spec.band.high_hz) errs.push_back(f.extremal_errors[i]);
    }
    ASSERT_GE(errs.size(), 2u);
    double lo = INFINITY, hi = 0.0;
    for (std::size_t i = 0; i < errs.size(); ++i) {
      if (i > 0) {
        EXPECT_LT(errs[i] * errs[i - 1], 0.0) << "sign must alternate at extremal " << i;
      }
      lo = std::min(lo, std::abs(errs[i]));
      hi = std::max(hi, std::abs(errs[i]));
    }
    EXPECT_LE(hi / lo, 1.01);
  }
}

TEST(DesignBandpass, AlphaGainAtTenHz) {
  const std::vector<double> f10 = {10.0};
  EXPECT_GE(freq_response(bank_filter(Band::Alpha), f10)[0], std::pow(10.0, -1.0 / 20.0));
}

TEST(DesignBandpass, InfeasibleUnderTightCap) {
  DesignOptions opt;
  opt.max_taps = 51;
  try {
    design_bandpass(default_filter_spec(Band::Delta), opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleSpec);
  }
}

TEST(FilterSignal, TenHzThroughAlphaAndBeta) {
  const auto x = unit_sine(10.0, 60.0);
  const auto a = filter_signal(bank_filter(Band::Alpha), x);
  const auto b = filter_signal(bank_filter(Band::Beta), x);
  ASSERT_EQ(a.size(), x.size());
  // Fit over the middle 50 s.
  const double amp_a = oracle::sine_amplitude(a, 10.0, 128.0, 640, 7040);
  const double amp_b = oracle::sine_amplitude(b, 10.0, 128.0, 640, 7040);
  const double dp = bank_filter(Band::Alpha).passband_deviation;
  EXPECT_GE(amp_a, 0.89);
  EXPECT_LE(amp_a, (1.0 + dp) * (1.0 + dp));
  EXPECT_LE(amp_b, 0.01);
}

TEST(FilterSignal, ZeroInZeroOut) {
  const Signal z(4000, 0.0);
  for (auto mode : {FilterMode::ZeroPhase, FilterMode::Causal})
    for (double v : filter_signal(bank_filter(Band::Theta), z, mode)) ASSERT_EQ(v, 0.0);
}

TEST(FilterSignal, Linearity) {
  const auto x = oracle::gaussian(3000, 1);
  const auto y = oracle::gaussian(3000, 2);
  const double a = 2.5, b = -0.75;
  Signal mix(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * y[i];
  for (auto mode : {FilterMode::ZeroPhase, FilterMode::Causal}) {
    const auto& f = bank_filter(Band::Alpha);
    const auto fm = filter_signal(f, mix, mode);
    const auto fx = filter_signal(f, x, mode);
    const auto fy = filter_signal(f, y, mode);
    double scale = 0.0;
    for (double v : fm) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(fm[i], a * fx[i] + b * fy[i], 1e-9 * scale);
  }
}

TEST(FilterSignal, CausalMatchesDirectConvolution) {
  const auto& f = bank_filter(Band::Beta);
  const auto x = oracle::gaussian(600, 3);
  const auto y = filter_signal(f, x, FilterMode::Causal);
  for (std::size_t n : {std::size_t{0}, std::size_t{10}, f.length() - 1, std::size_t{599}}) {
    long double s = 0;
    for (std::size_t k = 0; k <= n && k < f.length(); ++k) s += f.taps[k] * x[n - k];
    EXPECT_NEAR(y[n], static_cast<double>(s), 1e-12);
  }
  EXPECT_EQ(transient_length(f, FilterMode::Causal), f.length() - 1);
  EXPECT_EQ(transient_length(f, FilterMode::ZeroPhase), 0u);
}

TEST(FilterSignal, ZeroPhaseHasNoLag) {
  const auto& f = bank_filter(Band::Alpha);
  const auto input = filter_signal(f, oracle::gaussian(6000, 4));
  const auto output = filter_signal(f, input);
  int best_lag = 0;
  double best = -INFINITY;
  for (int lag = -40; lag <= 40; ++lag) {
    double c = 0.0;
    for (std::size_t t = 500; t + 500 < input.size(); ++t) c += input[t] * output[static_cast<std::size_t>(static_cast<int>(t) + lag)];
    if (c > best) {
      best = c;
      best_lag = lag;
    }
  }
  EXPECT_EQ(best_lag, 0);
}

TEST(FilterSignal, BandPowersDoNotExceedInputPower) {
  const auto x = oracle::gaussian(8064, 5);
  double total = 0.0;
  for (const auto& f : fixtures::default_bank()) total += mean_square(filter_signal(f, x));
  EXPECT_LE(total, mean_square(x));
}

TEST(FilterSignal, TooShort) {
  const auto& f = bank_filter(Band::Alpha);
  const Signal x(f.length(), 1.0);
  try {
    filter_signal(f, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SignalTooShort);
  }
}

TEST(ExtractBands, ShapesAndErrors) {
  const auto zero = fixtures::constant_trial(2000, 0.0);
  const auto bands = extract_bands(zero, fixtures::default_bank());
  ASSERT_EQ(bands.size(), 16u);
  for (const auto& [key, sig] : bands) {
    ASSERT_EQ(sig.samples.size(), 2000u);
    for (double v : sig.samples) ASSERT_EQ(v, 0.0);
  }

  std::vector<ChannelData> chs = {{ChannelId("Fp1"), Signal(4000, 0.0)}};
  const TrialRecording fast(1, 1, 256.0, chs);
  try {
    extract_bands(fast, fixtures::default_bank());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SampleRateMismatch);
  }
}

TEST(ExtractBands, TenHzLandsInAlpha) {
  SynthSpec spec;
  spec.components = {{Band::Alpha, 20.0, 10.0}};
  spec.seed = 7;
  const auto trial = synth_trial(spec);
  const auto bands = extract_bands(trial, fixtures::default_bank(), 4);
  for (const auto& ch : trial.channels()) {
    const double alpha = mean_square(find_band(bands, ch.id, Band::Alpha).samples);
    for (Band b : {Band::Beta, Band::Delta, Band::Theta})
      EXPECT_GE(alpha, 100.0 * mean_square(find_band(bands, ch.id, b).samples));
  }
}

TEST(FilterBankJson, RoundTripsTapsExactly) {
  const auto& bank = fixtures::default_bank();
  const auto back = filter_bank_from_json(filter_bank_to_json(bank));
  ASSERT_EQ(back.size(), bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    EXPECT_EQ(back[i].taps, bank[i].taps);
    EXPECT_EQ(back[i].design_spec, bank[i].design_spec);
  }
  EXPECT_THROW(filter_bank_from_json("{\"filters\": [{\"band\": \"alpha\"}]}"), Error);
}
