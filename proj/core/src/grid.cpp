// Copyright 2026 The jetcalc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "jetcalc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "fft.hpp"
#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {

GridSpec::GridSpec(std::size_t n_points) : n_points_(n_points) {
  if (n_points < 16 || (n_points & (n_points - 1)) != 0)
    throw PreconditionError("grid size must be a power of two >= 16, got " +
                            std::to_string(n_points));
}

std::size_t GridSpec::node_index(double x) const {
  const double n = static_cast<double>(n_points_);
  double r = std::fmod(x / spacing(), n);
  if (r < 0) r += n;
  const double idx = std::round(r);
  if (std::abs(r - idx) > 1e-8)
    throw PreconditionError("point " + csv::format(x) + " is not a grid node");
  return static_cast<std::size_t>(idx) % n_points_;
}

Field::Field(GridSpec grid, std::vector<double> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (samples_.size() != grid_.size())
    throw PreconditionError("field has " + std::to_string(samples_.size()) +
                            " samples, grid expects " + std::to_string(grid_.size()));
  for (double v : samples_)
    if (!std::isfinite(v)) throw PreconditionError("field sample is not finite");
}

Field Field::constant(GridSpec grid, double value) {
  return Field(grid, std::vector<double>(grid.size(), value));
}

double Field::max_abs() const {
  double m = 0.0;
  for (double v : samples_) m = std::max(m, std::abs(v));
  return m;
}

void Field::check_same_grid(const Field& other) const {
  if (!(grid_ == other.grid_)) throw PreconditionError("fields live on different grids");
}

Field& Field::operator+=(const Field& other) {
  check_same_grid(other);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  check_same_grid(other);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
  return *this;
}

Field& Field::operator*=(const Field& other) {
  check_same_grid(other);
  for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] *= other.samples_[i];
  return *this;
}

Field& Field::operator*=(double scale) {
  for (double& v : samples_) v *= scale;
  return *this;
}

SupportWindow::SupportWindow(double center, double radius) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw PreconditionError("window radius must be positive");
  if (!std::isfinite(center)) throw PreconditionError("window center must be finite");
  center_ = std::fmod(center, kTwoPi);
  if (center_ < 0) center_ += kTwoPi;
}

bool SupportWindow::contains(double x) const {
  return is_full() || arc_distance(x, center_) <= radius_ + 1e-12;
}

double signed_offset(double x, double base) {
  double d = std::remainder(x - base, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

double arc_distance(double a, double b) { return std::abs(signed_offset(a, b)); }

double window_gap(const SupportWindow& a, const SupportWindow& b) {
  return std::max(0.0, arc_distance(a.center(), b.center()) - a.radius() - b.radius());
}

bool windows_separated(const SupportWindow& a, const SupportWindow& b, const GridSpec& grid,
                       double cells) {
  return window_gap(a, b) >= cells * grid.spacing();
}

Spectrum spectrum(const Field& f) {
  const std::size_t n = f.size();
  Spectrum out(n / 2 + 1);
  detail::forward_fft(f.samples(), out);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
  return out;
}

Field from_spectrum(const GridSpec& grid, std::span<const std::complex<double>> coefficients) {
  if (coefficients.size() != grid.size() / 2 + 1)
    throw PreconditionError("spectrum length does not match grid");
  std::vector<double> samples(grid.size());
  detail::inverse_fft(coefficients, samples);
  return Field(grid, std::move(samples));
}

namespace {

void check_derivative_order(const GridSpec& grid, int order) {
  if (order < 0) throw PreconditionError("derivative order must be non-negative");
  if (static_cast<std::size_t>(order) > grid.derivative_guard())
    throw PreconditionError("derivative order " + std::to_string(order) +
                            " exceeds aliasing guard N/4 = " +
                            std::to_string(grid.derivative_guard()) + " on a " +
                            std::to_string(grid.size()) + "-point grid");
}

// (in)^order for mode n; Nyquist dropped for order ≥ 1.
std::complex<double> derivative_symbol(std::size_t n, std::size_t nyquist, int order) {
  if (order == 0) return 1.0;
  if (n == nyquist) return 0.0;
  const double mag = std::pow(static_cast<double>(n), order);
  switch (order % 4) {
    case 0: return {mag, 0.0};
    case 1: return {0.0, mag};
    case 2: return {-mag, 0.0};
    default: return {0.0, -mag};
  }
}

Field apply_symbol(const GridSpec& grid, const Spectrum& s, int order) {
  Spectrum d(s.size());
  for (std::size_t n = 0; n < s.size(); ++n)
    d[n] = s[n] * derivative_symbol(n, grid.nyquist(), order);
  return from_spectrum(grid, d);
}

}  // namespace

Field spectral_derivative(const Field& f, int order) {
  check_derivative_order(f.grid(), order);
  if (order == 0) return f;
  return apply_symbol(f.grid(), spectrum(f), order);
}

std::vector<Field> derivatives(const Field& f, int max_order) {
  check_derivative_order(f.grid(), max_order);
  std::vector<Field> out;
  out.reserve(static_cast<std::size_t>(max_order) + 1);
  out.push_back(f);
  if (max_order == 0) return out;
  const Spectrum s = spectrum(f);
  for (int j = 1; j <= max_order; ++j) out.push_back(apply_symbol(f.grid(), s, j));
  return out;
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.samples()) sum += v;
  return sum * f.grid().spacing();
}

double inner(const Field& f, const Field& g) {
  if (!(f.grid() == g.grid())) throw PreconditionError("fields live on different grids");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f[i] * g[i];
  return sum * f.grid().spacing();
}

double seminorm(const Field& f, int m, const SupportWindow& window) {
  const auto ds = derivatives(f, m);
  const GridSpec& grid = f.grid();
  double best = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!window.contains(grid.node(i))) continue;
    any = true;
    for (const Field& d : ds) best = std::max(best, std::abs(d[i]));
  }
  if (!any) throw PreconditionError("seminorm window contains no grid point");
  return best;
}

double sobolev_norm(const Field& f, int k) {
  if (k < 0) throw PreconditionError("Sobolev index must be non-negative");
  const Spectrum s = spectrum(f);
  const std::size_t nyq = f.grid().nyquist();
  double sum = 0.0;
  for (std::size_t n = 0; n <= nyq; ++n) {
    const double weight = std::pow(1.0 + static_cast<double>(n * n), 2 * k);
    const double multiplicity = (n == 0 || n == nyq) ? 1.0 : 2.0;
    sum += multiplicity * weight * std::norm(s[n]);
  }
  return kTwoPi * std::sqrt(sum);
}

Field bump(const SupportWindow& window, const GridSpec& grid) {
  if (!(window.radius() < std::numbers::pi))
    throw PreconditionError("bump radius must be below pi");
  return Field::from_function(grid, [&](double x) {
    const double t = signed_offset(x, window.center()) / window.radius();
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
  });
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

Field plateau(const SupportWindow& window, const GridSpec& grid) {
  if (window.is_full()) return Field::constant(grid, 1.0);
  const double r = window.radius();
  // Gaussian-smoothed step across [r/2, r]; clamping at the ends changes
  // values by at most erfc(6)/2 ≈ 1.1e-17.
  constexpr double kSharpness = 6.0;
  return Field::from_function(grid, [&](double x) {
    const double t = (arc_distance(x, window.center()) - 0.75 * r) / (0.25 * r);
    if (t <= -1.0) return 1.0;
    if (t >= 1.0) return 0.0;
    return 0.5 * std::erfc(kSharpness * t);
  });
}

Field random_field(const GridSpec& grid, std::uint64_t seed, int band_limit, double decay) {
  if (band_limit < 0 || static_cast<std::size_t>(band_limit) > grid.nyquist() / 2)
    throw PreconditionError("band limit must lie in [0, N/4]");
  if (!(decay >= 0.0) || !std::isfinite(decay))
    throw PreconditionError("decay must be a finite non-negative number");
  Rng rng(seed);
  Spectrum s(grid.nyquist() + 1, 0.0);
  s[0] = rng.uniform(-1.0, 1.0);
  double envelope = 1.0;
  for (int n = 1; n <= band_limit; ++n) {
    envelope *= decay;
    const double mag = rng.uniform() * envelope;
    const double phase = rng.uniform(0.0, kTwoPi);
    s[static_cast<std::size_t>(n)] = std::polar(mag, phase);
  }
  return from_spectrum(grid, s);
}

void write_field_csv(std::ostream& out, const Field& f) {
  out << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    csv::write_row(out, {csv::format(f.grid().node(i)), csv::format(f[i])});
}

Field read_field_csv(std::istream& in) {
  std::string line;
  if (!csv::next_data_line(in, line) || line != "x,value")
    throw ParseError("field CSV must start with the header 'x,value'");
  std::vector<double> values;
  while (csv::next_data_line(in, line)) {
    auto cols = csv::split(line);
    if (cols.size() != 2) throw ParseError("field CSV row must have two columns: " + line);
    csv::parse_double(cols[0]);
    values.push_back(csv::parse_double(cols[1]));
  }
  GridSpec grid(values.size());
  return Field(grid, std::move(values));
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "n,re,im\n";
  for (std::size_t n = 0; n < s.size(); ++n)
    csv::write_row(out, {std::to_string(n), csv::format(s[n].real()), csv::format(s[n].imag())});
}

Spectrum read_spectrum_csv(std::istream& in) {
  std::string line;
  if (!csv::next_data_line(in, line) || line != "n,re,im")
    throw ParseError("spectrum CSV must start with the header 'n,re,im'");
  Spectrum s;
  while (csv::next_data_line(in, line)) {
    auto cols = csv::split(line);
    if (cols.size() != 3) throw ParseError("spectrum CSV row must have three columns: " + line);
    if (csv::parse_integer(cols[0]) != static_cast<long long>(s.size()))
      throw ParseError("spectrum CSV modes must be consecutive from 0");
    s.emplace_back(csv::parse_double(cols[1]), csv::parse_double(cols[2]));
  }
  return s;
}

}  // namespace jetcalc
