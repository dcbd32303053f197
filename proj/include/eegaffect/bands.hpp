#pragma once

#include <array>
#include <string>
#include <string_view>

#include "eegaffect/error.hpp"

namespace eegaffect {

enum class Band { Alpha, Beta, Delta, Theta };

/// Canonical ordering used by every feature layout: alpha, beta, delta, theta.
inline constexpr std::array<Band, 4> kBandOrder = {Band::Alpha, Band::Beta, Band::Delta, Band::Theta};

inline std::string_view to_string(Band b) {
  switch (b) {
    case Band::Alpha: return "alpha";
    case Band::Beta: return "beta";
    case Band::Delta: return "delta";
    case Band::Theta: return "theta";
  }
  return "?";
}

inline Band parse_band(std::string_view name) {
  for (Band b : kBandOrder)
    if (to_string(b) == name) return b;
  fail(ErrorCode::ParseError, "unknown band '" + std::string(name) + "'");
}

struct BandDefinition {
  Band band;
  double low_hz;
  double high_hz;

  bool operator==(const BandDefinition&) const = default;
};

inline constexpr BandDefinition canonical_band(Band b) {
  switch (b) {
    case Band::Delta: return {Band::Delta, 0.5, 4.0};
    case Band::Theta: return {Band::Theta, 4.0, 8.0};
    case Band::Alpha: return {Band::Alpha, 8.0, 12.0};
    case Band::Beta: return {Band::Beta, 12.0, 30.0};
  }
  return {b, 0.0, 0.0};
}

inline constexpr double kHighestBandEdgeHz = 30.0;

}  // namespace eegaffect
