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

#include "jetcalc/identities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <utility>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"

namespace jetcalc {

namespace {

// P_n(x) and P_n'(x) from the three-term recurrence; n ≥ 1, |x| < 1.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

Quadrature gauss_legendre(int n) {
  if (n < 1) throw PreconditionError("quadrature needs at least one node");
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 1.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i), hi = static_cast<std::size_t>(n - 1 - i);
    q.nodes[lo] = 0.5 * (1.0 - x);
    q.nodes[hi] = 0.5 * (1.0 + x);
    q.weights[lo] = q.weights[hi] = w;
  }
  return q;
}

double check_ftc(const Functional& F, const Field& phi, const Field& psi, int n_quad,
                 const DerivativeConfig& cfg, bool allow_coarse) {
  if (n_quad < 8 && !allow_coarse) throw PreconditionError("check_ftc needs n_quad >= 8");
  const Quadrature q = gauss_legendre(n_quad);
  double integral = 0.0;
  const Field dirs[] = {psi};
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    integral += q.weights[i] * gateaux(F, phi + q.nodes[i] * psi, dirs, cfg);
  return std::abs(F(phi + psi) - F(phi) - integral);
}

double check_poincare_first(const JetExpr& f, std::span<const Field> psis) {
  const JetExpr rho = vertical_euler(f);
  const JetExpr el = euler_lagrange(f).expr;
  double worst = 0.0;
  for (const Field& psi : psis) {
    const double lhs = integrate(evaluate_along(rho, psi));
    const double rhs = integrate(psi * evaluate_along(el, psi));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double check_poincare_second(const JetExpr& f, const Field& psi1, const Field& psi2, int n_quad) {
  if (n_quad < 8) throw PreconditionError("check_poincare_second needs n_quad >= 8");
  const JetExpr el = euler_lagrange(f).expr;
  const Quadrature q = gauss_legendre(n_quad);
  double integral = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    integral += q.weights[i] * integrate(psi2 * evaluate_along(el, psi1 + q.nodes[i] * psi2));
  const double lhs = integrate(evaluate_along(f, psi1 + psi2));
  return std::abs(lhs - integrate(evaluate_along(f, psi1)) - integral);
}

double check_el_gradient(const JetExpr& f, std::span<const Field> phis,
                         const DerivativeConfig& cfg) {
  const JetExpr el = euler_lagrange(f).expr;
  const Functional F = make_local("f", f);
  double worst = 0.0;
  for (const Field& phi : phis) {
    const Field expect = evaluate_along(el, phi);
    const Field diff = gradient(F, phi, cfg) - expect;
    const double norm = std::sqrt(integrate(expect * expect));
    const double dist = std::sqrt(integrate(diff * diff));
    worst = std::max(worst, norm > 0.0 ? dist / norm : dist);
  }
  return worst;
}

double check_exactness(const JetExpr& t, std::span<const Field> psis) {
  if (t.depends_on_coordinate())
    throw PreconditionError(
        "check_exactness: the coordinate x is not periodic; use a coefficient field");
  const JetExpr dt = total_derivative(t);
  const Functional F = make_local("Dt", dt);
  double worst = 0.0;
  for (const Field& psi : psis) {
    const double zero = F(Field::zero(psi.grid()));
    worst = std::max({worst, std::abs(integrate(evaluate_along(dt, psi))),
                      std::abs(F(psi) - zero)});
  }
  return worst;
}

std::vector<Field> random_samples(const GridSpec& grid, std::uint64_t seed, int count,
                                  double amplitude, int band) {
  std::vector<Field> out;
  for (int i = 0; i < count; ++i)
    out.push_back(amplitude * random_field(grid, seed + static_cast<std::uint64_t>(i), band, 0.7));
  return out;
}

void write_identity_csv(std::ostream& out, std::span<const IdentityRecord> records) {
  csv::write_row(out, {"identity", "functional", "seed", "residual", "tolerance", "pass"});
  for (const IdentityRecord& r : records)
    csv::write_row(out, {r.identity, r.functional, std::to_string(r.seed), csv::format(r.residual),
                         csv::format(r.tolerance), r.residual <= r.tolerance ? "1" : "0"});
}

}  // namespace jetcalc
