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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "jetcalc/derivative.hpp"
#include "jetcalc/functional.hpp"
#include "jetcalc/jet_expr.hpp"

namespace jetcalc {

/// Gauss–Legendre rule on [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point rule, n ≥ 1, exact for polynomials of degree 2n−1.
Quadrature gauss_legendre(int n);

/// |F(φ+ψ) − F(φ) − ∫₀¹ DF_{φ+tψ}(ψ) dt|, the t-integral by n_quad-point
/// Gauss–Legendre. Requires n_quad ≥ 8 unless allow_coarse is set.
double check_ftc(const Functional& F, const Field& phi, const Field& psi, int n_quad,
                 const DerivativeConfig& cfg = {}, bool allow_coarse = false);

/// max over ψ of |∫(ρf)(j^kψ) − ∫ψ·EL(f)(j^{2k}ψ)|. The exact current
/// integrates to zero on the circle.
double check_poincare_first(const JetExpr& f, std::span<const Field> psis);

/// |∫f(j(ψ₁+ψ₂)) − ∫f(jψ₁) − ∫₀¹dt ∫ψ₂·EL(f)(j(ψ₁+tψ₂))|. Requires n_quad ≥ 8.
double check_poincare_second(const JetExpr& f, const Field& psi1, const Field& psi2, int n_quad);

/// max over φ of ‖∇F_φ − EL(f)(j^{2k}φ)‖_{L²} / ‖EL(f)(j^{2k}φ)‖_{L²} with
/// F = make_local(f) and ∇F from the derivative engine; absolute when the
/// Euler–Lagrange density vanishes.
double check_el_gradient(const JetExpr& f, std::span<const Field> phis,
                         const DerivativeConfig& cfg = {});

/// max over ψ of |∫(D_x t)(jψ)| and |F(ψ) − F(0)| for F = make_local(D_x t).
/// Rejects t containing the bare coordinate x, which is not periodic.
double check_exactness(const JetExpr& t, std::span<const Field> psis);

/// Random test fields: amplitude·random_field(grid, seed+i, band, 0.7).
std::vector<Field> random_samples(const GridSpec& grid, std::uint64_t seed, int count,
                                  double amplitude, int band = 8);

struct IdentityRecord {
  std::string identity;
  std::string functional;
  std::uint64_t seed;
  double residual;
  double tolerance;
};

/// Columns: identity,functional,seed,residual,tolerance,pass.
void write_identity_csv(std::ostream& out, std::span<const IdentityRecord> records);

}  // namespace jetcalc
