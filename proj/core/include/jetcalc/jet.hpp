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
#include <iosfwd>
#include <span>
#include <vector>

#include "jetcalc/grid.hpp"

namespace jetcalc {

/// k-jet at a point: (ψ(x), ψ'(x), ..., ψ^(k)(x)).
class Jet {
 public:
  Jet(double base_point, std::vector<double> values);

  double base_point() const { return base_point_; }
  int order() const { return static_cast<int>(values_.size()) - 1; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  double base_point_;
  std::vector<double> values_;
};

struct JetTolerance {
  double absolute = 1e-9;
  double relative = 1e-9;
};

/// Same base point and componentwise |a-b| ≤ abs + rel·max(|a|,|b|).
bool approx_equal(const Jet& a, const Jet& b, JetTolerance tol = {});

/// Jet of f at the grid node x. Throws if x is not a node or k exceeds the
/// aliasing guard.
Jet extract_jet(const Field& f, double x, int k);
Jet extract_jet_at(const Field& f, std::size_t node, int k);

/// Taylor polynomial of the jet around its base point times a cutoff equal
/// to 1 within cutoff_radius/2 and 0 beyond cutoff_radius. Requires
/// cutoff_radius < π/2.
Field realize_jet(const Jet& jet, double cutoff_radius, const GridSpec& grid);

// CSV rows: x,k,v0,...,vk
void write_jet_csv(std::ostream& out, std::span<const Jet> jets);
std::vector<Jet> read_jet_csv(std::istream& in);

}  // namespace jetcalc
