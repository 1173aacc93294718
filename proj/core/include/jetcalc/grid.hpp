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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace jetcalc {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid on the circle of circumference 2π.
class GridSpec {
 public:
  /// n_points must be a power of two and at least 16.
  explicit GridSpec(std::size_t n_points);

  std::size_t size() const { return n_points_; }
  double spacing() const { return kTwoPi / static_cast<double>(n_points_); }
  double circumference() const { return kTwoPi; }
  double node(std::size_t i) const { return static_cast<double>(i) * spacing(); }

  /// Highest resolved Fourier mode.
  std::size_t nyquist() const { return n_points_ / 2; }

  /// Largest derivative order accepted by the spectral routines.
  std::size_t derivative_guard() const { return n_points_ / 4; }

  /// Index of the node at x (mod 2π); throws if x is not a node.
  std::size_t node_index(double x) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::size_t n_points_;
};

/// Samples of a smooth real function on a GridSpec. Immutable.
class Field {
 public:
  /// Throws PreconditionError on size mismatch or non-finite samples.
  Field(GridSpec grid, std::vector<double> samples);

  static Field zero(GridSpec grid) { return constant(grid, 0.0); }
  static Field constant(GridSpec grid, double value);

  template <class Fn>
  static Field from_function(GridSpec grid, Fn&& fn) {
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = fn(grid.node(i));
    return Field(grid, std::move(s));
  }

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// max |f| over the grid.
  double max_abs() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(const Field& other);  // pointwise
  Field& operator*=(double scale);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, const Field& b) { return a *= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= -1.0; }

  /// Bitwise equality of grids and samples.
  friend bool operator==(const Field&, const Field&) = default;

 private:
  void check_same_grid(const Field& other) const;

  GridSpec grid_;
  std::vector<double> samples_;
};

/// Closed arc {x : d(x, center) ≤ radius} on the circle.
class SupportWindow {
 public:
  SupportWindow(double center, double radius);

  /// The whole circle (radius π).
  static SupportWindow full_circle() { return SupportWindow(0.0, std::numbers::pi); }

  double center() const { return center_; }
  double radius() const { return radius_; }
  bool is_full() const { return radius_ >= std::numbers::pi; }
  bool contains(double x) const;

 private:
  double center_;
  double radius_;
};

/// Distance between two points of the circle, in [0, π].
double arc_distance(double a, double b);

/// Signed offset x − base wrapped into (−π, π].
double signed_offset(double x, double base);

/// Arc gap between two windows (0 if they overlap).
double window_gap(const SupportWindow& a, const SupportWindow& b);

/// True when the windows are at least `cells` grid spacings apart.
bool windows_separated(const SupportWindow& a, const SupportWindow& b, const GridSpec& grid,
                       double cells = 4.0);

using Spectrum = std::vector<std::complex<double>>;

/// Fourier coefficients f̂(n), n = 0..N/2, with f̂(n) = (1/N) Σ_j f(x_j) e^{-i n x_j}
/// (the discretized (1/2π)∫ f e^{-inx} dx). Negative modes are the conjugates.
Spectrum spectrum(const Field& f);

/// Inverse of spectrum(); the imaginary parts of modes 0 and N/2 are ignored.
Field from_spectrum(const GridSpec& grid, std::span<const std::complex<double>> coefficients);

/// Field whose spectrum is (in)^order f̂(n); the Nyquist mode is dropped for
/// order ≥ 1. Throws PreconditionError when order exceeds derivative_guard().
Field spectral_derivative(const Field& f, int order);

/// {f, f', ..., f^(k)} from a single forward transform.
std::vector<Field> derivatives(const Field& f, int max_order);

/// Periodic trapezoid rule: spacing · Σ samples.
double integrate(const Field& f);

/// L2 inner product ∫ f g via the trapezoid rule.
double inner(const Field& f, const Field& g);

/// π_{m,K}(f) = max over nodes in K of max_{j≤m} |f^(j)|.
double seminorm(const Field& f, int m, const SupportWindow& window);

/// 2π (Σ_n (1+n²)^{2k} |f̂(n)|²)^{1/2} over the resolved modes
/// n = -N/2+1 .. N/2.
double sobolev_norm(const Field& f, int k);

/// Bump exp(-1/(1-t²)) in the arc coordinate t = offset/radius, exactly zero
/// outside the window. Requires radius < π.
Field bump(const SupportWindow& window, const GridSpec& grid);

/// Smooth cutoff equal to 1 within radius/2 of the center and 0 beyond radius.
Field plateau(const SupportWindow& window, const GridSpec& grid);

/// Smooth monotone step: 0 for t ≤ 0, 1 for t ≥ 1, built from exp(-1/t).
double smooth_step(double t);

/// Real band-limited field with |f̂(n)| ≤ decay^|n| for |n| ≤ band_limit and
/// zero above; deterministic in seed. Requires band_limit ≤ N/4.
Field random_field(const GridSpec& grid, std::uint64_t seed, int band_limit, double decay);

// CSV: "x,value" rows, and "n,re,im" rows for n = 0..N/2. Both round-trip
// bit-exactly.
void write_field_csv(std::ostream& out, const Field& f);
Field read_field_csv(std::istream& in);
void write_spectrum_csv(std::ostream& out, const Spectrum& s);
Spectrum read_spectrum_csv(std::istream& in);

}  // namespace jetcalc
