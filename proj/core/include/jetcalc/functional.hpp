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

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jetcalc/grid.hpp"
#include "jetcalc/jet_expr.hpp"

namespace jetcalc {

enum class FunctionalKind { local, bilinear_kernel, analytic, counterexample, unbounded_order };

std::string_view to_string(FunctionalKind kind);

/// Closed form of D^kF_φ(v_1, ..., v_k), k = dirs.size().
using DerivativeRule = std::function<double(const Field& phi, std::span<const Field> dirs)>;

/// Evaluable map Field → ℝ with metadata. Immutable; copies share state.
class Functional {
 public:
  using Evaluator = std::function<double(const Field&)>;

  Functional(std::string name, FunctionalKind kind, Evaluator eval);

  const std::string& name() const;
  FunctionalKind kind() const;
  double operator()(const Field& phi) const;

  /// True for functionals built by make_local.
  bool has_density() const;
  /// Density with the window factor folded in; throws unless has_density().
  const JetExpr& density() const;
  /// Density as given to make_local, before the window factor.
  const JetExpr& raw_density() const;
  const SupportWindow& window() const;
  /// Jet order of the density, or -1 when there is none.
  int jet_order() const;

  /// Highest order with an attached closed-form derivative (0 if none).
  int analytic_order() const;
  /// Throws PreconditionError when dirs.size() is 0 or above analytic_order().
  double analytic_derivative(const Field& phi, std::span<const Field> dirs) const;
  Functional with_derivative_rule(DerivativeRule rule, int max_order) const;

  /// Key/value lines for report headers.
  std::vector<std::pair<std::string, std::string>> metadata() const;

 private:
  struct State;
  explicit Functional(std::shared_ptr<const State> state);
  friend Functional make_local(std::string name, const JetExpr& f, const SupportWindow& window,
                               std::optional<GridSpec> grid);

  std::shared_ptr<const State> state_;
};

/// F(ψ) = ∫ f(j^k_x ψ) χ(x) dx, where χ is plateau(window) and is folded
/// into the density as the coefficient "window". A grid is needed only
/// when the window is not the full circle and f has no coefficient field.
Functional make_local(std::string name, const JetExpr& f,
                      const SupportWindow& window = SupportWindow::full_circle(),
                      std::optional<GridSpec> grid = std::nullopt);

/// ∫ f(j^k ψ) dx by pointwise evaluation at every node (slow reference path).
double integrate_pointwise(const JetExpr& f, const Field& psi);

/// G(φ) = ∫∫ g(x, y) φ(x) φ(y) dx dy with a symmetric kernel sampled on the
/// grid. Second derivative rules are attached.
Functional make_bilocal(std::string name, const GridSpec& grid,
                        const std::function<double(double, double)>& kernel);

/// Weight fields shared by the zoo and the built-in Lagrangians.
struct StandardWeights {
  Field f;
  Field g;
  Field h;
};

StandardWeights standard_weights(const GridSpec& grid);

/// Named densities used by the identity suites.
std::vector<std::pair<std::string, JetExpr>> builtin_lagrangians(const GridSpec& grid);

/// (C, a, b) with C = embedding_constant(grid), a = 1/(3C²), b = 1/(2C²).
struct CutoffThresholds {
  double embedding;
  double lower;
  double upper;
};

/// C = (1/2π)(Σ_{|n|≤N/2} (1+n²)^{-2})^{1/2}, so ‖f‖_{C⁰} ≤ C‖f‖_{H²}.
double embedding_constant(const GridSpec& grid);
CutoffThresholds cutoff_thresholds(const GridSpec& grid);

/// s(t) = 1 for t ≤ a, 0 for t ≥ b, B(b−t)/(B(b−t)+B(t−a)) in between with
/// B(t) = exp(−1/t).
double cutoff_step(double t, double a, double b);

/// χ(f) = s(‖1−f‖²_{H²}).
double counterexample_cutoff(const Field& f);

/// F_nl(f) = (1−χ(f))∫f + χ(f)(∫f)^N. Requires N ≥ 2.
Functional make_counterexample(int power = 3);

/// Partition of unity on value space: χ_n(s) = B(s−n)/Σ_m B(s−m) with
/// B(t) = exp(−1/(1−t²)) on |t| < 1.
double value_partition(int n, double s);
double value_partition_derivative(int n, double s);

/// U(φ) = Σ_n ∫ χ_n(φ(x)) φ^{(|n|)}(x) w(x) dx with w the Poisson kernel
/// (1−r²)/(1−2r cos x+r²), whose Fourier coefficients are r^|n|. Only the
/// bands met by the range of φ are evaluated. The first derivative rule is
/// attached.
Functional make_unbounded_order(const GridSpec& grid, double poisson_radius = 0.5);

/// The standard collection: F1, F3, F4, G, H, I, J, K, U, L2, L41.
std::vector<Functional> zoo(const GridSpec& grid);

/// Looks up a functional by name in zoo(grid) plus "Fnl" (N = 3).
Functional zoo_member(const GridSpec& grid, std::string_view name);

}  // namespace jetcalc
