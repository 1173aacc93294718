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
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jetcalc/grid.hpp"
#include "jetcalc/jet.hpp"

namespace jetcalc {

class Rng;

namespace detail {
struct ExprNode;
struct ExprAccess;
}  // namespace detail

/// Immutable expression in the jet coordinates (x, u_0, u_1, ..., u_k) with
/// smooth coefficient fields. Copies share structure.
///
/// The arithmetic operators and the free builders below simplify on
/// construction: sums and products are flattened, constants folded, like
/// terms and like factors merged, and operands sorted into a canonical
/// order. This is enough for exact cancellation of syntactically equal
/// terms, not a canonical form.
class JetExpr {
 public:
  enum class Kind { constant, coordinate, variable, coefficient, sum, product, power, function };
  enum class Func { sin, cos, exp };

  /// The constant 0.
  JetExpr();

  static JetExpr constant(double value);
  static JetExpr coordinate();
  /// u_order, i.e. the order-th derivative of the field.
  static JetExpr variable(int order);
  /// Named coefficient field. Names are identifiers and identify the field:
  /// two coefficients with the same name and derivative order compare equal.
  static JetExpr coefficient(std::string name, const Field& field);

  // Unsimplified constructors; the prefix parser uses these so printing and
  // parsing round-trip exactly.
  static JetExpr raw_sum(std::vector<JetExpr> terms);
  static JetExpr raw_product(std::vector<JetExpr> factors);
  static JetExpr raw_power(JetExpr base, int exponent);
  static JetExpr raw_function(Func f, JetExpr argument);
  static JetExpr raw_coefficient(std::string name, const Field& base, int derivative_order);

  Kind kind() const;
  /// Constant value; only for Kind::constant.
  double value() const;
  /// Variable order, power exponent, or coefficient derivative order.
  int index() const;
  Func func() const;
  const std::string& name() const;
  /// Coefficient field, already differentiated index() times.
  const Field& coefficient_field() const;
  /// Coefficient field before differentiation.
  const Field& coefficient_base() const;
  std::span<const JetExpr> children() const;

  /// Largest j with u_j present, or -1 when the expression has no vertical
  /// dependence.
  int max_jet_order() const;
  bool depends_on(int jet_variable) const;
  bool depends_on_coordinate() const;
  bool is_zero() const;
  /// Grid of the coefficient fields, if any appear.
  const std::optional<GridSpec>& grid() const;
  std::uint64_t hash() const;
  std::size_t node_count() const;

  /// Canonical prefix notation:
  ///   expr := NUMBER | "x" | "u" INT | "(coef" NAME INT ")"
  ///         | "(+" expr+ ")" | "(*" expr+ ")" | "(^" expr INT ")"
  ///         | "(sin" expr ")" | "(cos" expr ")" | "(exp" expr ")"
  /// NUMBER is the shortest decimal that reads back to the same double.
  std::string to_string() const;

  /// Structural equality.
  friend bool operator==(const JetExpr& a, const JetExpr& b);

  const detail::ExprNode* node() const { return node_.get(); }

 private:
  explicit JetExpr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}
  friend struct detail::ExprAccess;

  std::shared_ptr<const detail::ExprNode> node_;
};

JetExpr sum(std::vector<JetExpr> terms);
JetExpr product(std::vector<JetExpr> factors);
JetExpr pow(const JetExpr& base, int exponent);
JetExpr sin(const JetExpr& argument);
JetExpr cos(const JetExpr& argument);
JetExpr exp(const JetExpr& argument);

JetExpr operator+(const JetExpr& a, const JetExpr& b);
JetExpr operator-(const JetExpr& a, const JetExpr& b);
JetExpr operator*(const JetExpr& a, const JetExpr& b);
JetExpr operator-(const JetExpr& a);
JetExpr operator*(double c, const JetExpr& a);
JetExpr operator+(double c, const JetExpr& a);

/// ∂f/∂u_j with x and the other u_i held fixed.
JetExpr vertical_derivative(const JetExpr& f, int j);

/// ∂f/∂x at fixed jet coordinates; coefficient fields are differentiated
/// spectrally.
JetExpr explicit_x_derivative(const JetExpr& f);

/// D_x f = ∂f/∂x + Σ_j u_{j+1} ∂f/∂u_j.
JetExpr total_derivative(const JetExpr& f);
JetExpr total_derivative(const JetExpr& f, int times);

/// ρf = Σ_j u_j ∂f/∂u_j.
JetExpr vertical_euler(const JetExpr& f);

struct ELResult {
  /// Σ_j (-1)^j D_x^j (∂f/∂u_j); order at most twice the input order.
  JetExpr expr;
  /// Current j with ρf = u_0·EL(f) + D_x j, obtained by telescoping
  /// u_j P = (-1)^j u_0 D^j P + D_x Σ_{i<j} (-1)^i u_{j-1-i} D^i P.
  JetExpr boundary_current;
};

ELResult euler_lagrange(const JetExpr& f);

/// Value of f at a jet. Coefficient fields are sampled at the jet's base
/// point, which must then be a node of their grid. Throws PreconditionError
/// naming the first missing variable when the jet order is too small.
double evaluate(const JetExpr& f, const Jet& jet);

/// Pointwise value of f along (ψ, ψ', ..., ψ^(k)) given as derivative
/// fields; derivs.size() must exceed max_jet_order(f).
Field evaluate_along(const JetExpr& f, std::span<const Field> derivs);

/// Convenience: computes the needed derivatives of psi first.
Field evaluate_along(const JetExpr& f, const Field& psi);

using CoefficientRegistry = std::map<std::string, Field, std::less<>>;

/// Parses to_string() output. Coefficient names are looked up in the
/// registry; throws ParseError on malformed input or unknown names.
JetExpr parse_jet_expr(std::string_view text, const CoefficientRegistry& registry);

struct RandomExprOptions {
  int max_order = 2;
  int depth = 3;
  /// Candidate coefficient fields; may be empty.
  std::vector<std::pair<std::string, Field>> coefficients;
  bool allow_coordinate = false;
};

/// Random tree with at least one jet variable; constants are kept small so
/// values stay O(1) on O(1) jets.
JetExpr random_jet_expr(Rng& rng, const RandomExprOptions& options);

}  // namespace jetcalc
