#pragma once

// Parks-McClellan equiripple design for odd-length symmetric (type I) FIR
// filters. Works in normalized frequency f in [0, 0.5] cycles/sample and
// interpolates the amplitude response in x = cos(2 pi f) with the second
// (true) barycentric Lagrange formula.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "eegaffect/error.hpp"

namespace eegaffect::remez {

struct Band {
  double lo;  // cycles/sample
  double hi;
  double desired;
  double weight;
};

struct Options {
  int grid_density = 16;
  int max_iterations = 100;
  double tolerance = 1e-4;  // relative spread of |E| over the extremal set
};

struct Result {
  std::vector<double> taps;
  double delta = 0.0;                   // weighted equiripple deviation
  std::vector<double> extremal_freqs;   // cycles/sample
  std::vector<double> extremal_errors;  // weighted error E(f) at each extremal
  int iterations = 0;
  bool converged = false;
};

namespace detail {

struct Grid {
  std::vector<double> f;
  std::vector<double> x;
  std::vector<double> desired;
  std::vector<double> weight;
  std::vector<std::size_t> band_start;  // first grid index of each band
};

inline Grid make_grid(std::span<const Band> bands, std::size_t n_basis, int density) {
  Grid g;
  const double step = 0.5 / (static_cast<double>(density) * static_cast<double>(n_basis));
  for (const auto& b : bands) {
    g.band_start.push_back(g.f.size());
    const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((b.hi - b.lo) / step)) + 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double f = b.lo + (b.hi - b.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      g.f.push_back(f);
      g.x.push_back(std::cos(2.0 * std::numbers::pi * f));
      g.desired.push_back(b.desired);
      g.weight.push_back(b.weight);
    }
  }
  return g;
}

// Barycentric weights 1 / prod_{j != i} (x_i - x_j), computed in log space
// and rescaled by a common factor (the interpolant is invariant to it).
inline std::vector<double> barycentric_weights(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> logmag(n, 0.0);
  std::vector<int> sign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = x[i] - x[j];
      logmag[i] += std::log(std::abs(d));
      if (d < 0) sign[i] = -sign[i];
    }
  }
  const double shift = *std::min_element(logmag.begin(), logmag.end());
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = sign[i] * std::exp(shift - logmag[i]);
  return w;
}

class Interpolant {
 public:
  Interpolant(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)), w_(barycentric_weights(x_)) {}

  double operator()(double xv) const {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double d = xv - x_[i];
      if (d == 0.0) return y_[i];
      const double t = w_[i] / d;
      num += t * y_[i];
      den += t;
    }
    return num / den;
  }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> w_;
};

// Local extrema of the error with alternating sign, trimmed to `r` points.
// Returns an empty vector if fewer than r alternating extrema exist.
inline std::vector<std::size_t> select_extremals(const Grid& g, std::span<const double> err, std::size_t r) {
  std::vector<std::size_t> cand;
  const std::size_t n = err.size();
  std::size_t band = 0;
  for (std::size_t j = 0; j < n; ++j) {
    while (band + 1 < g.band_start.size() && j >= g.band_start[band + 1]) ++band;
    const std::size_t lo = g.band_start[band];
    const std::size_t hi = band + 1 < g.band_start.size() ? g.band_start[band + 1] - 1 : n - 1;
    const double e = err[j];
    const bool left_ok = j == lo || (e > 0 ? e >= err[j - 1] : e <= err[j - 1]);
    const bool right_ok = j == hi || (e > 0 ? e > err[j + 1] : e < err[j + 1]);
    if (e != 0.0 && left_ok && right_ok) cand.push_back(j);
  }

  // Collapse runs of equal sign onto their largest member.
  std::vector<std::size_t> alt;
  for (std::size_t j : cand) {
    if (!alt.empty() && (err[alt.back()] > 0) == (err[j] > 0)) {
      if (std::abs(err[j]) > std::abs(err[alt.back()])) alt.back() = j;
    } else {
      alt.push_back(j);
    }
  }

  while (alt.size() > r) {
    if (alt.size() - r == 1) {
      if (std::abs(err[alt.front()]) < std::abs(err[alt.back()])) alt.erase(alt.begin());
      else alt.pop_back();
      continue;
    }
    std::size_t k = 0;
    for (std::size_t i = 1; i < alt.size(); ++i)
      if (std::abs(err[alt[i]]) < std::abs(err[alt[k]])) k = i;
    if (k == 0 || k + 1 == alt.size()) {
      alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      const std::size_t drop = std::abs(err[alt[k - 1]]) < std::abs(err[alt[k + 1]]) ? k - 1 : k + 1;
      const std::size_t a = std::min(k, drop);
      alt.erase(alt.begin() + static_cast<std::ptrdiff_t>(a), alt.begin() + static_cast<std::ptrdiff_t>(a + 2));
    }
  }
  if (alt.size() < r) return {};
  return alt;
}

}  // namespace detail

/// Designs a length `num_taps` (odd) linear-phase filter minimizing the
/// maximum weighted deviation from the piecewise-constant response `bands`.
/// Throws ConvergenceFailure if the exchange cannot find an alternation set.
/// A run that exhausts max_iterations is returned with converged == false.
inline Result design(std::size_t num_taps, std::span<const Band> bands, const Options& opt = {}) {
  if (num_taps < 3 || num_taps % 2 == 0) fail(ErrorCode::InvalidSpec, "remez needs an odd tap count >= 3");
  for (const auto& b : bands)
    if (!(b.lo >= 0.0 && b.lo < b.hi && b.hi <= 0.5 && b.weight > 0.0))
      fail(ErrorCode::InvalidSpec, "malformed remez band");

  const std::size_t half = (num_taps - 1) / 2;  // cos basis 0..half
  const std::size_t n_basis = half + 1;
  const std::size_t r = n_basis + 1;  // alternation points
  const auto grid = detail::make_grid(bands, n_basis, opt.grid_density);
  const std::size_t ng = grid.f.size();
  if (ng < r) fail(ErrorCode::InvalidSpec, "frequency grid too coarse for the requested length");

  std::vector<std::size_t> ext(r);
  for (std::size_t i = 0; i < r; ++i) ext[i] = i * (ng - 1) / (r - 1);

  Result res;
  std::vector<double> err(ng);
  double delta = 0.0;
  auto build_interpolant = [&](std::span<const std::size_t> e) {
    std::vector<double> xs(r);
    for (std::size_t i = 0; i < r; ++i) xs[i] = grid.x[e[i]];
    const auto b = detail::barycentric_weights(xs);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      const double s = (i % 2 == 0) ? 1.0 : -1.0;
      num += b[i] * grid.desired[e[i]];
      den += s * b[i] / grid.weight[e[i]];
    }
    delta = num / den;
    std::vector<double> xi(xs.begin(), xs.end() - 1);
    std::vector<double> yi(r - 1);
    for (std::size_t i = 0; i + 1 < r; ++i) {
      const double s = (i % 2 == 0) ? 1.0 : -1.0;
      yi[i] = grid.desired[e[i]] - s * delta / grid.weight[e[i]];
    }
    return detail::Interpolant(std::move(xi), std::move(yi));
  };

  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    const auto interp = build_interpolant(ext);
    for (std::size_t j = 0; j < ng; ++j) err[j] = grid.weight[j] * (grid.desired[j] - interp(grid.x[j]));

    auto next = detail::select_extremals(grid, err, r);
    if (next.empty()) fail(ErrorCode::ConvergenceFailure, "lost alternation at iteration " + std::to_string(it));

    double emax = 0.0;
    double emin = INFINITY;
    for (std::size_t j : next) {
      emax = std::max(emax, std::abs(err[j]));
      emin = std::min(emin, std::abs(err[j]));
    }
    const bool same = next == ext;
    ext = std::move(next);
    if (same || (emax - emin) <= opt.tolerance * emax) {
      res.converged = true;
      break;
    }
  }

  const auto interp = build_interpolant(ext);
  for (std::size_t j : ext) {
    res.extremal_freqs.push_back(grid.f[j]);
    res.extremal_errors.push_back(grid.weight[j] * (grid.desired[j] - interp(grid.x[j])));
  }
  res.delta = std::abs(delta);

  // Sample the amplitude at f_k = k / L and invert the cosine series.
  const std::size_t len = num_taps;
  std::vector<double> amp(n_basis);
  for (std::size_t k = 0; k < n_basis; ++k)
    amp[k] = interp(std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len)));
  std::vector<double> a(n_basis);
  for (std::size_t k = 0; k < n_basis; ++k) {
    double s = amp[0];
    for (std::size_t j = 1; j < n_basis; ++j)
      s += 2.0 * amp[j] * std::cos(2.0 * std::numbers::pi * static_cast<double>(j * k % len) / static_cast<double>(len));
    a[k] = (k == 0 ? 1.0 : 2.0) * s / static_cast<double>(len);
  }
  res.taps.assign(len, 0.0);
  res.taps[half] = a[0];
  for (std::size_t k = 1; k <= half; ++k) {
    res.taps[half - k] = a[k] / 2.0;
    res.taps[half + k] = a[k] / 2.0;
  }
  return res;
}

}  // namespace eegaffect::remez
