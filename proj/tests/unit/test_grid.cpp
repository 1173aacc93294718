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

#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "jetcalc/error.hpp"
#include "jetcalc/grid.hpp"

namespace jetcalc {
namespace {

using std::numbers::pi;

TEST(GridSpec, RejectsBadSizes) {
  EXPECT_THROW(GridSpec(8), PreconditionError);
  EXPECT_THROW(GridSpec(48), PreconditionError);
  EXPECT_NO_THROW(GridSpec(16));
  GridSpec g(64);
  EXPECT_NEAR(g.spacing() * 64, kTwoPi, 1e-14);
  EXPECT_EQ(g.node_index(g.node(5) + kTwoPi), 5u);
  EXPECT_THROW(g.node_index(0.01), PreconditionError);
}

TEST(Field, RejectsNonFinite) {
  GridSpec g(16);
  std::vector<double> s(16, 0.0);
  s[3] = NAN;
  EXPECT_THROW(Field(g, s), PreconditionError);
  EXPECT_THROW(Field(g, std::vector<double>(15, 0.0)), PreconditionError);
  EXPECT_THROW(Field::zero(g) + Field::zero(GridSpec(32)), PreconditionError);
}

TEST(SpectralDerivative, SineToCosine) {
  GridSpec g(64);
  Field f = Field::from_function(g, [](double x) { return std::sin(x); });
  Field d = spectral_derivative(f, 1);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(d[i], std::cos(g.node(i)), 1e-12);
  EXPECT_EQ(spectral_derivative(f, 0), f);
}

TEST(SpectralDerivative, ConstantHasZeroDerivative) {
  GridSpec g(64);
  EXPECT_LE(spectral_derivative(Field::constant(g, 1.0), 1).max_abs(), 1e-15);
}

TEST(SpectralDerivative, ExpSinSecondDerivative) {
  GridSpec g(256);
  Field f = Field::from_function(g, [](double x) { return std::exp(std::sin(x)); });
  Field d = spectral_derivative(f, 2);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    const double want = (std::cos(x) * std::cos(x) - std::sin(x)) * std::exp(std::sin(x));
    EXPECT_NEAR(d[i], want, 1e-8);
  }
}

TEST(SpectralDerivative, GuardRejectsHighOrders) {
  GridSpec g(32);
  Field f = Field::constant(g, 1.0);
  EXPECT_NO_THROW(spectral_derivative(f, 8));
  EXPECT_THROW(spectral_derivative(f, 9), PreconditionError);
  EXPECT_THROW(spectral_derivative(f, -1), PreconditionError);
}

TEST(SpectralDerivative, CompositionMatchesInSpectrum) {
  GridSpec g(128);
  Field f = random_field(g, 11, 20, 0.8);
  Spectrum a = spectrum(spectral_derivative(spectral_derivative(f, 1), 1));
  Spectrum b = spectrum(spectral_derivative(f, 2));
  for (std::size_t n = 0; n < a.size(); ++n) EXPECT_LE(std::abs(a[n] - b[n]), 1e-13);
}

TEST(SpectralDerivative, DerivativesListMatchesSingleCalls) {
  GridSpec g(64);
  Field f = random_field(g, 5, 10, 0.7);
  auto ds = derivatives(f, 3);
  ASSERT_EQ(ds.size(), 4u);
  for (int k = 0; k <= 3; ++k) {
    Field single = spectral_derivative(f, k);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(ds[k][i], single[i], 1e-13);
  }
}

TEST(Integrate, ClosedForms) {
  GridSpec g(64);
  EXPECT_NEAR(integrate(Field::constant(g, 1.0)), 2 * pi, 1e-12);
  EXPECT_NEAR(integrate(Field::from_function(g, [](double x) { return std::sin(x); })), 0.0,
              1e-12);
  EXPECT_NEAR(
      integrate(Field::from_function(g, [](double x) { return std::sin(x) * std::sin(x); })), pi,
      1e-10);
}

TEST(Integrate, Parseval) {
  GridSpec g(128);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Field f = random_field(g, seed, 30, 0.9);
    Spectrum s = spectrum(f);
    double sum = std::norm(s[0]);
    for (std::size_t n = 1; n < s.size(); ++n) sum += 2 * std::norm(s[n]);
    EXPECT_NEAR(integrate(f * f), 2 * pi * sum, 1e-10);
  }
}

TEST(Seminorm, Examples) {
  GridSpec g(64);
  Field s = Field::from_function(g, [](double x) { return std::sin(x); });
  auto full = SupportWindow::full_circle();
  EXPECT_NEAR(seminorm(s, 0, full), 1.0, 1e-10);
  EXPECT_NEAR(seminorm(s, 1, full), 1.0, 1e-10);
  EXPECT_EQ(seminorm(Field::zero(g), 3, SupportWindow(1.0, 0.5)), 0.0);
}

TEST(Seminorm, EmptyWindowRejected) {
  GridSpec g(16);
  EXPECT_THROW(seminorm(Field::zero(g), 0, SupportWindow(0.2, 0.01)), PreconditionError);
}

TEST(Seminorm, MonotoneInOrderAndWindow) {
  GridSpec g(128);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Field f = random_field(g, seed, 16, 0.8);
    SupportWindow small(2.0, 0.5), large(2.0, 1.5);
    for (int m = 0; m < 4; ++m) {
      EXPECT_LE(seminorm(f, m, large), seminorm(f, m + 1, large));
      EXPECT_LE(seminorm(f, m, small), seminorm(f, m, large));
      EXPECT_LE(seminorm(f, m, large), seminorm(f, m, SupportWindow::full_circle()));
    }
  }
}

TEST(SobolevNorm, Examples) {
  GridSpec g(64);
  EXPECT_NEAR(sobolev_norm(Field::constant(g, 1.0), 1), 2 * pi, 1e-12);
  EXPECT_EQ(sobolev_norm(Field::zero(g), 1), 0.0);
  Field s = Field::from_function(g, [](double x) { return std::sin(x); });
  EXPECT_NEAR(sobolev_norm(s, 1), 2 * pi * std::sqrt(2.0), 1e-12);
}

TEST(Bump, Shape) {
  GridSpec g(256);
  SupportWindow w(g.node(64), 0.7);
  Field b = bump(w, g);
  EXPECT_NEAR(b[64], std::exp(-1.0), 1e-15);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!w.contains(g.node(i))) {
      EXPECT_EQ(b[i], 0.0);
    }
    EXPECT_GE(b[i], 0.0);
  }
  EXPECT_GT(integrate(b), 0.0);
  EXPECT_THROW(bump(SupportWindow(0.0, pi), g), PreconditionError);
}

TEST(Bump, WrapsAroundZero) {
  GridSpec g(64);
  Field b = bump(SupportWindow(0.0, 0.5), g);
  EXPECT_GT(b[g.size() - 1], 0.0);
  EXPECT_GT(b[1], 0.0);
  EXPECT_NEAR(b[1], b[g.size() - 1], 1e-15);
}

TEST(Plateau, OneInsideZeroOutside) {
  GridSpec g(256);
  SupportWindow w(3.0, 0.8);
  Field p = plateau(w, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = arc_distance(g.node(i), 3.0);
    if (d <= 0.4) EXPECT_EQ(p[i], 1.0);
    if (d >= 0.8) EXPECT_EQ(p[i], 0.0);
    EXPECT_GE(p[i], 0.0);
    EXPECT_LE(p[i], 1.0);
  }
}

TEST(SmoothStep, Limits) {
  EXPECT_EQ(smooth_step(-1.0), 0.0);
  EXPECT_EQ(smooth_step(0.0), 0.0);
  EXPECT_EQ(smooth_step(1.0), 1.0);
  EXPECT_NEAR(smooth_step(0.5), 0.5, 1e-15);
  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = smooth_step(i / 100.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Windows, Geometry) {
  EXPECT_NEAR(arc_distance(0.1, kTwoPi - 0.1), 0.2, 1e-15);
  EXPECT_NEAR(signed_offset(0.1, kTwoPi - 0.1), 0.2, 1e-15);
  EXPECT_NEAR(signed_offset(kTwoPi - 0.1, 0.1), -0.2, 1e-15);
  SupportWindow a(1.0, 0.3), b(2.0, 0.3);
  EXPECT_NEAR(window_gap(a, b), 0.4, 1e-15);
  EXPECT_EQ(window_gap(a, SupportWindow(1.2, 0.3)), 0.0);
  GridSpec g(64);
  EXPECT_TRUE(windows_separated(a, b, g));
  EXPECT_FALSE(windows_separated(a, SupportWindow(1.65, 0.3), g));
  EXPECT_TRUE(SupportWindow::full_circle().contains(4.0));
}

TEST(RandomField, Deterministic) {
  GridSpec g(128);
  EXPECT_EQ(random_field(g, 42, 8, 0.5), random_field(g, 42, 8, 0.5));
  EXPECT_NE(random_field(g, 42, 8, 0.5), random_field(g, 43, 8, 0.5));
}

TEST(RandomField, BandZeroIsConstant) {
  GridSpec g(64);
  Field f = random_field(g, 3, 0, 0.5);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_EQ(f[i], f[0]);
}

TEST(RandomField, CoefficientBoundsAndBand) {
  GridSpec g(128);
  Field f = random_field(g, 9, 8, 0.5);
  Spectrum s = spectrum(f);
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (n > 8)
      EXPECT_LE(std::abs(s[n]), 1e-15);
    else
      EXPECT_LE(std::abs(s[n]), std::pow(0.5, static_cast<double>(n)) + 1e-15);
  }
  EXPECT_THROW(random_field(g, 1, 33, 0.5), PreconditionError);
}

TEST(RandomField, RegressionValue) {
  GridSpec g(128);
  const double s = seminorm(random_field(g, 2024, 8, 0.5), 0, SupportWindow::full_circle());
  EXPECT_TRUE(std::isfinite(s));
  EXPECT_EQ(s, seminorm(random_field(g, 2024, 8, 0.5), 0, SupportWindow::full_circle()));
}

TEST(Csv, FieldRoundTripIsBitExact) {
  GridSpec g(32);
  Field f = random_field(g, 77, 8, 0.9);
  std::stringstream ss;
  write_field_csv(ss, f);
  EXPECT_EQ(read_field_csv(ss), f);
}

TEST(Csv, SpectrumRoundTripIsBitExact) {
  GridSpec g(32);
  Spectrum s = spectrum(random_field(g, 78, 8, 0.9));
  std::stringstream ss;
  write_spectrum_csv(ss, s);
  EXPECT_EQ(read_spectrum_csv(ss), s);
}

TEST(Csv, MalformedInputRejected) {
  std::stringstream ss("x,value\n0,1\n0.5,abc\n");
  EXPECT_THROW(read_field_csv(ss), ParseError);
}

}  // namespace
}  // namespace jetcalc
