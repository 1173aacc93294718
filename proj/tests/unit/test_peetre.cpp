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
#include "jetcalc/functional.hpp"
#include "jetcalc/peetre.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {
namespace {

using std::numbers::pi;

JetExpr u(int j) { return JetExpr::variable(j); }

const GridSpec kGrid(8192);

PointSet points(std::initializer_list<std::size_t> nodes, const GridSpec& grid = kGrid) {
  std::vector<double> p;
  for (std::size_t i : nodes) p.push_back(grid.node(i));
  return PointSet(p, grid);
}

TEST(PointSet, Invariants) {
  EXPECT_THROW(PointSet({}, kGrid), PreconditionError);
  EXPECT_THROW(PointSet({0.1}, kGrid), PreconditionError);
  EXPECT_THROW(points({3, 3}), PreconditionError);
}

TEST(PointSet, WrapsPeriodically) {
  EXPECT_THROW(PointSet({0.0, 2 * pi}, kGrid), PreconditionError);
  const PointSet X = points({0, 4096});
  EXPECT_NEAR(X.distance(pi / 2), pi / 2, 1e-15);
  EXPECT_NEAR(X.distance(2 * pi - 0.1), 0.1, 1e-14);
}

TEST(Mollifier, PlateauAndSupport) {
  for (double lambda : {0.25, 0.125, 0.0625}) {
    for (const PointSet& X : {points({100}), points({0, 3000}), points({1000, 4000, 7000})}) {
      const Field chi = mollifier(X, lambda);
      int plateau = 0;
      for (std::size_t i = 0; i < kGrid.size(); ++i) {
        const double d = X.distance(kGrid.node(i));
        if (d <= lambda / 8) {
          EXPECT_NEAR(chi[i], 1.0, 1e-12);
          ++plateau;
        } else if (d >= lambda) {
          EXPECT_NEAR(chi[i], 0.0, 1e-12);
        }
        EXPECT_GE(chi[i], -1e-15);
        EXPECT_LE(chi[i], 1.0 + 1e-12);
      }
      EXPECT_GT(plateau, 0);
    }
  }
}

TEST(Mollifier, Examples) {
  const PointSet X = points({0});
  const Field chi = mollifier(X, 0.25);
  EXPECT_NEAR(chi[0], 1.0, 1e-12);
  EXPECT_EQ(chi[4096], 0.0);
  for (const PointSet& Y : {points({0}), points({0, 4096}), points({0, 2730, 5461})}) {
    const double lambda = 0.125;
    const double mass = integrate(mollifier(Y, lambda));
    const double k = static_cast<double>(Y.size());
    EXPECT_GE(mass, k * lambda / 4 * (1 - 1e-12));
    EXPECT_LE(mass, k * 2 * lambda);
    // A unit-mass kernel preserves the discrete mass of the indicator.
    double indicator = 0.0;
    for (std::size_t i = 0; i < kGrid.size(); ++i)
      if (Y.distance(kGrid.node(i)) <= lambda / 2) indicator += kGrid.spacing();
    EXPECT_NEAR(mass, indicator, 1e-12);
  }
}

TEST(Mollifier, RejectsUnresolvableLambda) {
  const PointSet X = points({0});
  EXPECT_THROW(mollifier(X, 16.0 * kGrid.spacing() * 0.99), PreconditionError);
  EXPECT_NO_THROW(mollifier(X, 16.0 * kGrid.spacing() * 1.01));
  EXPECT_THROW(mollifier(X, 0.0), PreconditionError);
  EXPECT_THROW(mollifier(X, 1.5), PreconditionError);
  EXPECT_THROW(mollifier_derivatives(X, 0.25, 4), PreconditionError);
}

TEST(Mollifier, DerivativesMatchSpectral) {
  const PointSet X = points({500, 5000});
  const auto chi = mollifier_derivatives(X, 0.25, 3);
  const auto spec = band_limited_derivatives(chi[0], 3);
  for (int k = 1; k <= 3; ++k) {
    const double peak = chi[static_cast<std::size_t>(k)].max_abs();
    EXPECT_LE((chi[static_cast<std::size_t>(k)] - spec[static_cast<std::size_t>(k)]).max_abs(),
              1e-4 * peak)
        << k;
  }
}

TEST(VanishingTrial, VanishesToOrder) {
  const PointSet X = points({100, 3000});
  for (int order = 1; order <= 3; ++order) {
    const auto d = band_limited_derivatives(vanishing_trial_function(X, order, 7), order);
    for (std::size_t node : X.nodes()) {
      for (int j = 0; j < order; ++j) EXPECT_LE(std::abs(d[static_cast<std::size_t>(j)][node]), 1e-9);
      EXPECT_GT(std::abs(d[static_cast<std::size_t>(order)][node]), 0.1);
    }
  }
}

std::vector<double> lambda_grid() {
  std::vector<double> l;
  for (int j = 2; j <= 6; ++j) l.push_back(std::ldexp(1.0, -j));
  return l;
}

TEST(PeetreEstimate, ZeroTrialGivesZeroRatios) {
  const PointSet X = points({0});
  const std::vector<Field> trials{Field::zero(kGrid)};
  const auto l = lambda_grid();
  const PeetreTable t = check_peetre_estimate(X, 1, l, trials);
  ASSERT_EQ(t.rows.size(), 5u);
  for (const auto& r : t.rows) EXPECT_EQ(r.ratio, 0.0);
  EXPECT_TRUE(t.bounded());
}

TEST(PeetreEstimate, RejectsNonVanishingTrial) {
  const PointSet X = points({0});
  const auto l = lambda_grid();
  const std::vector<Field> trials{vanishing_trial_function(X, 1, 3)};
  EXPECT_NO_THROW(check_peetre_estimate(X, 0, l, trials));
  EXPECT_THROW(check_peetre_estimate(X, 1, l, trials), PreconditionError);
}

TEST(PeetreEstimate, RatioBoundedAsLambdaShrinks) {
  const auto l = lambda_grid();
  for (const PointSet& X : {points({0}), points({1000, 3700}), points({0, 2730, 5461})}) {
    for (int m = 0; m <= 2; ++m) {
      std::vector<Field> trials;
      for (std::uint64_t s = 1; s <= 3; ++s) trials.push_back(vanishing_trial_function(X, m + 1, s));
      const PeetreTable t = check_peetre_estimate(X, m, l, trials);
      EXPECT_GT(t.reference_ratio, 0.0);
      EXPECT_TRUE(t.bounded()) << "m = " << m << " max " << t.max_ratio << " ref " << t.reference_ratio;
      for (const auto& r : t.rows) EXPECT_LE(r.numerator, r.ratio * r.lambda * r.denominator * (1 + 1e-12));
    }
  }
}

TEST(PeetreEstimate, NearAntipodalPointsStayUnderUniformConstant) {
  // sin(x − x₁) also vanishes at x₁ + π, close to x₂ here, so the largest-λ
  // ratio is small; the ratio still stays below the one-point constant.
  const PointSet X = points({1000, 5000});
  const auto l = lambda_grid();
  for (int m = 0; m <= 2; ++m) {
    std::vector<Field> trials;
    for (std::uint64_t s = 1; s <= 3; ++s) trials.push_back(vanishing_trial_function(X, m + 1, s));
    EXPECT_LE(check_peetre_estimate(X, m, l, trials).max_ratio, 1.5) << m;
  }
}

TEST(PeetreEstimate, SingleCubeExampleConstant) {
  // m = 1, one point, sin³ factor. The recorded constant guards against regressions.
  const PointSet X = points({0});
  const auto l = lambda_grid();
  const std::vector<Field> trials{vanishing_trial_function(X, 2, 11) *
                                  Field::from_function(kGrid, [](double x) { return std::sin(x); })};
  const PeetreTable t = check_peetre_estimate(X, 1, l, trials);
  EXPECT_LE(t.max_ratio, 2.0);
  EXPECT_TRUE(t.bounded());
}

TEST(PeetreEstimate, Csv) {
  const PointSet X = points({0});
  const auto l = lambda_grid();
  const std::vector<Field> trials{vanishing_trial_function(X, 1, 3)};
  const std::vector<PeetreTable> tables{check_peetre_estimate(X, 0, l, trials)};
  std::ostringstream os;
  write_peetre_csv(os, tables);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), "m,lambda,numerator,denominator,ratio");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
}

const GridSpec kSmall(512);

TEST(JetDetermination, Square) {
  const PointSet X = points({10, 300}, kSmall);
  const std::vector<int> cand{0, 1, 2};
  const JetDetermination d = test_jet_determination(density_map(pow(u(0), 2)), cand, X, 5);
  ASSERT_TRUE(d.order);
  EXPECT_EQ(*d.order, 0);
  EXPECT_EQ(d.describe(), "determined at p = 0");
}

TEST(JetDetermination, EulerLagrangeOfQuarticDirichlet) {
  const auto w = standard_weights(kSmall);
  const JetExpr L = JetExpr::coefficient("h", w.h) * pow(u(0), 4) +
                    JetExpr::coefficient("g", w.g) * pow(u(1), 2);
  const PointSet X = points({10, 300}, kSmall);
  const std::vector<int> cand{0, 1, 2, 3};
  const JetDetermination d = test_jet_determination(density_map(euler_lagrange(L).expr), cand, X, 5);
  ASSERT_TRUE(d.order);
  EXPECT_EQ(*d.order, 2);
  EXPECT_FALSE(d.steps[1].determines);
  EXPECT_GT(d.steps[1].max_difference, 1e-3);
  EXPECT_EQ(d.describe(), "determined at p = 2");
  // The witness pair for p = 1 shares its 1-jet at the worst point.
  const auto& wit = d.steps[1].witness;
  ASSERT_EQ(wit.size(), 2u);
  const std::size_t node = kSmall.node_index(d.steps[1].witness_point);
  const auto a = band_limited_derivatives(wit[0], 2), b = band_limited_derivatives(wit[1], 2);
  EXPECT_NEAR(a[0][node], b[0][node], 1e-9);
  EXPECT_NEAR(a[1][node], b[1][node], 1e-9);
  EXPECT_GT(std::abs(a[2][node] - b[2][node]), 1e-3);
}

TEST(JetDetermination, IntegralIsNotDetermined) {
  const PointSet X = points({10}, kSmall);
  const std::vector<int> cand{0, 1, 2, 3, 4};
  const JetDetermination d = test_jet_determination(integral_map(), cand, X, 5);
  EXPECT_FALSE(d.order);
  EXPECT_EQ(d.describe(), "not jet-determined up to k_max = 4");
  std::ostringstream os;
  write_determination_csv(os, d);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "order,determines,max_difference,witness_point");
}

TEST(JetDetermination, Monotone) {
  const auto w = standard_weights(kSmall);
  const PointSet X = points({77, 222, 400}, kSmall);
  const std::vector<int> cand{0, 1, 2, 3, 4};
  for (const JetExpr& f : {pow(u(0), 3), u(1) * u(0), JetExpr::coefficient("g", w.g) * u(2),
                           euler_lagrange(pow(u(1), 2) * u(0)).expr}) {
    const JetDetermination d = test_jet_determination(density_map(f), cand, X, 9);
    bool seen = false;
    for (const auto& s : d.steps) {
      if (seen) EXPECT_TRUE(s.determines) << s.order;
      seen = seen || s.determines;
    }
    EXPECT_TRUE(d.order);
  }
}

TEST(KLocal, Examples) {
  const KPointMap product = product_of_densities(pow(u(0), 2) + u(1));
  EXPECT_EQ(test_k_local("product", product, 2, kSmall, 30, 1).verdict, Verdict::pass);
  const KPointMap far = [](const Field& phi, std::span<const std::size_t> n) {
    return phi[n[0]] * integrate(phi);
  };
  EXPECT_EQ(test_k_local("far", far, 2, kSmall, 30, 1).verdict, Verdict::fail);
  const KPointMap constant = [](const Field&, std::span<const std::size_t>) { return 3.0; };
  const ProbeReport c = test_k_local("constant", constant, 2, kSmall, 30, 1);
  EXPECT_EQ(c.verdict, Verdict::pass);
  EXPECT_EQ(c.max_residual, 0.0);
  for (int k = 1; k <= 3; ++k)
    EXPECT_EQ(test_k_local("product", product, k, kSmall, 20, 2).verdict, Verdict::pass);
  EXPECT_THROW(test_k_local("x", constant, 4, kSmall, 5, 1), PreconditionError);
}

TEST(KLocal, Deterministic) {
  const KPointMap product = product_of_densities(u(0));
  const ProbeReport a = test_k_local("p", product, 2, kSmall, 10, 4);
  const ProbeReport b = test_k_local("p", product, 2, kSmall, 10, 4);
  EXPECT_EQ(a.max_residual, b.max_residual);
  EXPECT_EQ(a.records.size(), 10u);
}

}  // namespace
}  // namespace jetcalc
