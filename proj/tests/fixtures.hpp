#pragma once

#include <random>
#include <vector>

#include "eegaffect/fir_filter.hpp"
#include "eegaffect/classifiers.hpp"
#include "eegaffect/signal_model.hpp"

namespace fixtures {

using namespace eegaffect;

// The default bank takes a few seconds to design; share it per process.
inline const FilterBank& default_bank() {
  static const FilterBank bank = design_default_bank(128.0);
  return bank;
}

inline const FirCoefficients& bank_filter(Band b) {
  for (const auto& f : default_bank())
    if (f.design_spec.band.band == b) return f;
  fail(ErrorCode::MissingBandSignal, std::string(to_string(b)));
}

// Multi-channel trial whose samples are exactly representable as float32.
inline TrialRecording float_trial(int subject, int trial, std::size_t n, std::uint64_t seed,
                                  std::vector<std::string> names = {"Fp1", "Fp2", "F3", "F4"}) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, 10.0f);
  std::vector<ChannelData> chs;
  for (const auto& name : names) {
    Signal s(n);
    for (auto& v : s) v = static_cast<double>(g(rng));
    chs.push_back({ChannelId(name), std::move(s)});
  }
  return TrialRecording(subject, trial, 128.0, std::move(chs));
}

inline TrialRecording constant_trial(std::size_t n, double value, std::size_t channels = 4) {
  std::vector<ChannelData> chs;
  const auto ids = default_channels();
  for (std::size_t c = 0; c < channels; ++c) chs.push_back({ids[c], Signal(n, value)});
  return TrialRecording(1, 1, 128.0, std::move(chs));
}

// Two-class 2-D Gaussian blobs; y = High for the blob at +center.
inline LabeledDataset blobs(std::size_t n, double center, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  LabeledDataset d;
  d.layout = {{"Fp1", "time", "a"}, {"Fp1", "time", "b"}};
  for (std::size_t i = 0; i < n; ++i) {
    const bool high = i % 2 == 1;
    const double c = high ? center : -center;
    d.x.push_back({c + g(rng), c + g(rng)});
    d.y.push_back(high ? Label::High : Label::Low);
    d.keys.push_back({static_cast<int>(1 + i / 40), static_cast<int>(1 + i % 40)});
  }
  return d;
}

// XOR quadrants, closed under x -> -x (the label sign(x0 * x1) is preserved).
inline LabeledDataset symmetric_xor(std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.2, 1.0);
  LabeledDataset d;
  d.layout = {{"Fp1", "time", "a"}, {"Fp1", "time", "b"}};
  for (std::size_t i = 0; i < pairs; ++i) {
    const double sx = (i % 2) ? 1.0 : -1.0;
    const double sy = (i / 2 % 2) ? 1.0 : -1.0;
    const double a = sx * u(rng);
    const double b = sy * u(rng);
    const Label l = a * b > 0 ? Label::High : Label::Low;
    for (double s : {1.0, -1.0}) {
      d.x.push_back({s * a, s * b});
      d.y.push_back(l);
      const auto k = d.y.size();
      d.keys.push_back({static_cast<int>(1 + k / 40), static_cast<int>(1 + k % 40)});
    }
  }
  return d;
}

inline double training_accuracy(const Model& m, const LabeledDataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) ok += predict(m, d.x[i]) == d.y[i];
  return static_cast<double>(ok) / static_cast<double>(d.rows());
}

}  // namespace fixtures
