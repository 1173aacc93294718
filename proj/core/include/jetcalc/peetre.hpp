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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jetcalc/grid.hpp"
#include "jetcalc/jet_expr.hpp"
#include "jetcalc/locality.hpp"

namespace jetcalc {

/// Nonempty set of distinct grid nodes.
class PointSet {
 public:
  /// Every point must be a node of grid (mod 2π).
  PointSet(std::vector<double> points, const GridSpec& grid);

  std::size_t size() const { return points_.size(); }
  std::span<const double> points() const { return points_; }
  std::span<const std::size_t> nodes() const { return nodes_; }
  const GridSpec& grid() const { return grid_; }

  /// Arc distance from x to the nearest point.
  double distance(double x) const;

 private:
  GridSpec grid_;
  std::vector<double> points_;
  std::vector<std::size_t> nodes_;
};

/// χ_λ = φ_λ ∗ α_λ as a discrete circular convolution: φ_λ the bump
/// exp(−1/(1−t²)) of radius 3λ/8 normalized to unit discrete mass, α_λ the
/// indicator of {d(x,X) ≤ λ/2}. Equals 1 where d(x,X) ≤ λ/8 and 0 where
/// d(x,X) ≥ λ. Requires 0 < λ ≤ 1 and λ ≥ 16·spacing.
Field mollifier(const PointSet& X, double lambda);

/// χ_λ and its derivatives up to max_order ≤ 3 at the nodes, differentiating
/// the bump in closed form inside the convolution sum.
std::vector<Field> mollifier_derivatives(const PointSet& X, double lambda, int max_order);

/// Π_i sin(x − x_i)^order · (1 + 0.3·r) with r a random band-4 field of unit
/// sup norm: periodic, band-limited, vanishing to the given order on X.
Field vanishing_trial_function(const PointSet& X, int order, std::uint64_t seed);

/// Derivatives 0..max_order of a band-limited field, with Fourier modes
/// below 1e-15 of the largest treated as zero.
std::vector<Field> band_limited_derivatives(const Field& f, int max_order);

struct PeetreRow {
  double lambda;
  /// π_{m}(χ_λ φ) and π_{m+1, d≤λ}(φ) of the trial with the largest ratio.
  double numerator;
  double denominator;
  double ratio;
};

struct PeetreTable {
  int m = 0;
  std::vector<PeetreRow> rows;
  double max_ratio = 0.0;
  /// Ratio at the largest λ of the grid.
  double reference_ratio = 0.0;

  /// max_ratio ≤ factor·reference_ratio.
  bool bounded(double factor = 3.0) const;
};

/// Ratios π_{m,K}(χ_λ φ) / (λ·π_{m+1,K∩{d≤λ}}(φ)), K the whole circle,
/// maximized over the trial functions. A 0/0 ratio counts as 0. Throws
/// PreconditionError when a trial's m-jet at X exceeds 1e-9.
PeetreTable check_peetre_estimate(const PointSet& X, int m, std::span<const double> lambdas,
                                  std::span<const Field> trials);

/// Columns: m,lambda,numerator,denominator,ratio.
void write_peetre_csv(std::ostream& out, std::span<const PeetreTable> tables);

using FieldMap = std::function<Field(const Field&)>;

/// φ ↦ f(j φ) evaluated along φ.
FieldMap density_map(const JetExpr& f);

/// φ ↦ (∫φ)·1.
FieldMap integral_map();

struct DeterminationStep {
  int order;
  bool determines;
  /// Largest normalized |F(φ₁)(x) − F(φ₂)(x)| over x ∈ X and trials.
  double max_difference;
  /// φ₁, φ₂ of the worst trial; they share their order-jets at X.
  std::vector<Field> witness;
  double witness_point;
};

struct JetDetermination {
  /// Smallest candidate that determines F on X, if any.
  std::optional<int> order;
  int max_candidate = 0;
  std::vector<DeterminationStep> steps;

  /// "determined at p = 2" or "not jet-determined up to k_max = 4".
  std::string describe() const;
};

/// For each candidate p: pairs φ₂ = φ₁ + δ with δ vanishing to order p+1 on
/// X, so φ₁ and φ₂ share p-jets at X. p determines F when every normalized
/// difference at X stays within tol (densities scaled to unit C⁰ norm).
JetDetermination test_jet_determination(const FieldMap& F, std::span<const int> candidates,
                                        const PointSet& X, std::uint64_t seed, int trials = 5,
                                        double tol = 1e-7);

/// Columns: order,determines,max_difference,witness_point.
void write_determination_csv(std::ostream& out, const JetDetermination& d);

/// (φ; x_1, ..., x_k) ↦ value, the points given as node indices.
using KPointMap = std::function<double(const Field&, std::span<const std::size_t>)>;

/// Π_i f(j φ)(x_i).
KPointMap product_of_densities(const JetExpr& f);

/// Per trial: k random nodes, φ random, δ a pulse in the largest gap between
/// the points (8 cells clear of them). Residual |F(φ+δ) − F(φ)|, scale
/// max(|F(φ)|, |F(φ+δ)|). Requires 1 ≤ k ≤ 3.
ProbeReport test_k_local(const std::string& name, const KPointMap& F, int k,
                         const GridSpec& grid, int trials, std::uint64_t seed,
                         double tol = 1e-9);

}  // namespace jetcalc
