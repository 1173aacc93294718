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

#include "jetcalc/jet.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"

namespace jetcalc {

Jet::Jet(double base_point, std::vector<double> values)
    : base_point_(base_point), values_(std::move(values)) {
  if (values_.empty()) throw PreconditionError("a jet needs at least the value ψ(x)");
  if (!std::isfinite(base_point_)) throw PreconditionError("jet base point must be finite");
  for (double v : values_)
    if (!std::isfinite(v)) throw PreconditionError("jet component is not finite");
}

bool approx_equal(const Jet& a, const Jet& b, JetTolerance tol) {
  if (a.order() != b.order()) return false;
  if (arc_distance(a.base_point(), b.base_point()) > 1e-12) return false;
  for (std::size_t j = 0; j < a.values().size(); ++j) {
    const double scale = std::max(std::abs(a[j]), std::abs(b[j]));
    if (std::abs(a[j] - b[j]) > tol.absolute + tol.relative * scale) return false;
  }
  return true;
}

Jet extract_jet_at(const Field& f, std::size_t node, int k) {
  if (node >= f.size()) throw PreconditionError("node index out of range");
  const auto ds = derivatives(f, k);
  std::vector<double> values;
  values.reserve(ds.size());
  for (const Field& d : ds) values.push_back(d[node]);
  return Jet(f.grid().node(node), std::move(values));
}

Jet extract_jet(const Field& f, double x, int k) {
  return extract_jet_at(f, f.grid().node_index(x), k);
}

Field realize_jet(const Jet& jet, double cutoff_radius, const GridSpec& grid) {
  if (!(cutoff_radius > 0.0 && cutoff_radius < 0.5 * std::numbers::pi))
    throw PreconditionError("cutoff radius must lie in (0, pi/2)");
  // Plateau radius is half the cutoff radius.
  const Field cutoff = plateau(SupportWindow(jet.base_point(), cutoff_radius), grid);
  const auto v = jet.values();
  return Field::from_function(grid, [&](double x) {
    const double d = signed_offset(x, jet.base_point());
    double term = 1.0, sum = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      sum += v[j] * term;
      term *= d / static_cast<double>(j + 1);
    }
    return sum;
  }) * cutoff;
}

void write_jet_csv(std::ostream& out, std::span<const Jet> jets) {
  for (const Jet& j : jets) {
    std::vector<std::string> row{csv::format(j.base_point()), std::to_string(j.order())};
    for (double v : j.values()) row.push_back(csv::format(v));
    csv::write_row(out, row);
  }
}

std::vector<Jet> read_jet_csv(std::istream& in) {
  std::vector<Jet> jets;
  std::string line;
  while (csv::next_data_line(in, line)) {
    const auto cols = csv::split(line);
    if (cols.size() < 3) throw ParseError("jet row needs x, k and at least one value");
    const long long k = csv::parse_integer(cols[1]);
    if (k < 0 || static_cast<std::size_t>(k) + 3 != cols.size())
      throw ParseError("jet row length does not match its order: " + line);
    std::vector<double> values;
    for (std::size_t i = 2; i < cols.size(); ++i) values.push_back(csv::parse_double(cols[i]));
    jets.emplace_back(csv::parse_double(cols[0]), std::move(values));
  }
  return jets;
}

}  // namespace jetcalc
