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
#include "jetcalc/jet.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {
namespace {

using std::numbers::pi;

TEST(ExtractJet, Sine) {
  GridSpec g(64);
  Field f = Field::from_function(g, [](double x) { return std::sin(x); });
  Jet j = extract_jet(f, 0.0, 2);
  ASSERT_EQ(j.order(), 2);
  EXPECT_NEAR(j[0], 0.0, 1e-10);
  EXPECT_NEAR(j[1], 1.0, 1e-10);
  EXPECT_NEAR(j[2], 0.0, 1e-10);
}

TEST(ExtractJet, Constant) {
  GridSpec g(32);
  Jet j = extract_jet_at(Field::constant(g, 2.5), 7, 4);
  EXPECT_NEAR(j[0], 2.5, 1e-14);
  for (int k = 1; k <= 4; ++k) EXPECT_NEAR(j[k], 0.0, 1e-13);
}

TEST(ExtractJet, ExpSinAtQuarterTurn) {
  GridSpec g(256);
  Field f = Field::from_function(g, [](double x) { return std::exp(std::sin(x)); });
  Jet j = extract_jet(f, g.node(64), 2);
  EXPECT_NEAR(j[0], std::numbers::e, 1e-6);
  EXPECT_NEAR(j[1], 0.0, 1e-6);
  EXPECT_NEAR(j[2], -std::numbers::e, 1e-6);
}

TEST(ExtractJet, Rejections) {
  GridSpec g(32);
  Field f = Field::zero(g);
  EXPECT_THROW(extract_jet(f, 0.05, 1), PreconditionError);
  EXPECT_THROW(extract_jet(f, 0.0, 9), PreconditionError);
  EXPECT_THROW(Jet(0.0, {1.0, NAN}), PreconditionError);
  EXPECT_THROW(Jet(0.0, {}), PreconditionError);
}

TEST(ExtractJet, Linearity) {
  GridSpec g(128);
  Field a = random_field(g, 1, 20, 0.8), b = random_field(g, 2, 20, 0.8);
  const double s = 1.7, t = -0.3;
  for (std::size_t node : {0u, 17u, 99u}) {
    Jet ja = extract_jet_at(a, node, 3), jb = extract_jet_at(b, node, 3);
    Jet jc = extract_jet_at(s * a + t * b, node, 3);
    for (int k = 0; k <= 3; ++k)
      EXPECT_NEAR(jc[k], s * ja[k] + t * jb[k], 1e-11 * (1.0 + std::abs(jc[k])));
  }
}

TEST(ApproxEqual, Tolerance) {
  Jet a(1.0, {1.0, 2.0}), b(1.0, {1.0 + 1e-10, 2.0}), c(1.0, {1.0 + 1e-6, 2.0});
  EXPECT_TRUE(approx_equal(a, b));
  EXPECT_FALSE(approx_equal(a, c));
  EXPECT_FALSE(approx_equal(a, Jet(2.0, {1.0, 2.0})));
  EXPECT_FALSE(approx_equal(a, Jet(1.0, {1.0})));
}

TEST(RealizeJet, ZeroJetGivesZeroField) {
  GridSpec g(256);
  EXPECT_EQ(realize_jet(Jet(1.0, {0.0, 0.0, 0.0}), 1.0, g).max_abs(), 0.0);
}

TEST(RealizeJet, ConstantNearBasePoint) {
  GridSpec g(256);
  const double x0 = g.node(40);
  Field f = realize_jet(Jet(x0, {1.0, 0.0}), 1.0, g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (arc_distance(g.node(i), x0) <= 0.5) EXPECT_EQ(f[i], 1.0);
  EXPECT_THROW(realize_jet(Jet(x0, {1.0}), 1.6, g), PreconditionError);
}

// Rounding noise in the transform grows like (N/2)^k in the k-th derivative;
// measured floors at N = 512 are about 1e-7, 5e-5 and 1e-2 for k = 4, 5, 6.
constexpr double kRoundTripTol[7] = {1e-8, 1e-8, 1e-8, 1e-8, 1e-6, 5e-4, 5e-2};

TEST(RealizeJet, RoundTripRandomJets) {
  GridSpec g(512);
  Rng rng(2026);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = static_cast<int>(rng.integer(0, 4));
    const std::size_t node = static_cast<std::size_t>(rng.integer(0, 511));
    std::vector<double> v(k + 1);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    Jet j(g.node(node), v);
    Jet back = extract_jet_at(realize_jet(j, 1.5, g), node, k);
    for (int i = 0; i <= k; ++i) EXPECT_NEAR(back[i], j[i], kRoundTripTol[i]);
  }
}

TEST(RealizeJet, SectionPropertyUpToOrderSix) {
  GridSpec g(512);
  Rng rng(7);
  for (std::size_t node = 0; node < g.size(); node += 37) {
    std::vector<double> v(7);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    Jet j(g.node(node), v);
    Jet back = extract_jet_at(realize_jet(j, 1.5, g), node, 6);
    for (int k = 0; k <= 6; ++k) EXPECT_NEAR(back[k], j[k], kRoundTripTol[k]) << "node " << node;
  }
}

TEST(Jet, LocalityOfJets) {
  GridSpec g(512);
  Field f = random_field(g, 3, 12, 0.7);
  const std::size_t node = 128;
  // h agrees with f on a wide window around the node, differs far away.
  Field far = plateau(SupportWindow(g.node(node) + pi, 1.2), g);
  Field h = f + 3.0 * far;
  Jet a = extract_jet_at(f, node, 3), b = extract_jet_at(h, node, 3);
  for (int k = 0; k <= 2; ++k) EXPECT_NEAR(a[k], b[k], 1e-10);
  EXPECT_NEAR(a[3], b[3], 1e-8);
}

TEST(Jet, CsvRoundTrip) {
  std::vector<Jet> jets{Jet(0.5, {1.0, -2.25}), Jet(3.0, {0.1, 0.2, 0.3, 1e-300})};
  std::stringstream ss;
  write_jet_csv(ss, jets);
  auto back = read_jet_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].base_point(), jets[i].base_point());
    ASSERT_EQ(back[i].order(), jets[i].order());
    for (int k = 0; k <= jets[i].order(); ++k) EXPECT_EQ(back[i][k], jets[i][k]);
  }
}

}  // namespace
}  // namespace jetcalc
