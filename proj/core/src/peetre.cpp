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

#include "jetcalc/peetre.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {

PointSet::PointSet(std::vector<double> points, const GridSpec& grid) : grid_(grid) {
  if (points.empty()) throw PreconditionError("point set must be nonempty");
  for (double p : points) {
    const std::size_t i = grid.node_index(p);
    if (std::find(nodes_.begin(), nodes_.end(), i) != nodes_.end())
      throw PreconditionError("point set contains a repeated point");
    nodes_.push_back(i);
    points_.push_back(grid.node(i));
  }
}

double PointSet::distance(double x) const {
  double d = std::numbers::pi;
  for (double p : points_) d = std::min(d, arc_distance(x, p));
  return d;
}

namespace {

// exp(−1/(1−t²)) and its first three derivatives, |t| < 1.
std::array<double, 4> bump_derivatives(double t) {
  const double s = 1.0 - t * t;
  const double e = std::exp(-1.0 / s);
  const double g1 = -2.0 * t / (s * s);
  const double g2 = -2.0 / (s * s) - 8.0 * t * t / (s * s * s);
  const double g3 = -24.0 * t / (s * s * s) - 48.0 * t * t * t / (s * s * s * s);
  return {e, g1 * e, (g2 + g1 * g1) * e, (g3 + 3.0 * g1 * g2 + g1 * g1 * g1) * e};
}

void check_lambda(const PointSet& X, double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0) throw PreconditionError("lambda must lie in (0, 1]");
  if (lambda < 16.0 * X.grid().spacing())
    throw PreconditionError("lambda " + csv::format(lambda) +
                            " is below the resolvability limit 16*spacing = " +
                            csv::format(16.0 * X.grid().spacing()));
}

}  // namespace

std::vector<Field> mollifier_derivatives(const PointSet& X, double lambda, int max_order) {
  check_lambda(X, lambda);
  if (max_order < 0 || max_order > 3) throw PreconditionError("mollifier derivative order must lie in [0, 3]");
  const GridSpec& grid = X.grid();
  const std::size_t n = grid.size();
  const double dx = grid.spacing();
  const double rho = 3.0 * lambda / 8.0;
  const auto reach = static_cast<long>(std::ceil(rho / dx));

  std::vector<std::array<double, 4>> kernel;
  double mass = 0.0;
  for (long o = -reach; o <= reach; ++o) {
    const double t = static_cast<double>(o) * dx / rho;
    kernel.push_back(std::abs(t) < 1.0 ? bump_derivatives(t) : std::array<double, 4>{});
    mass += kernel.back()[0];
  }
  std::vector<char> inside(n);
  for (std::size_t j = 0; j < n; ++j) inside[j] = X.distance(grid.node(j)) <= 0.5 * lambda;

  std::vector<std::vector<double>> out(static_cast<std::size_t>(max_order) + 1,
                                       std::vector<double>(n, 0.0));
  const auto nn = static_cast<long>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (X.distance(grid.node(i)) >= lambda) continue;
    std::array<double, 4> acc{};
    for (long o = -reach; o <= reach; ++o) {
      const auto j = static_cast<std::size_t>(((static_cast<long>(i) - o) % nn + nn) % nn);
      if (!inside[j]) continue;
      const auto& k = kernel[static_cast<std::size_t>(o + reach)];
      for (int d = 0; d <= max_order; ++d) acc[static_cast<std::size_t>(d)] += k[static_cast<std::size_t>(d)];
    }
    double scale = 1.0 / mass;
    for (int d = 0; d <= max_order; ++d) {
      out[static_cast<std::size_t>(d)][i] = acc[static_cast<std::size_t>(d)] * scale;
      scale /= rho;
    }
  }
  std::vector<Field> fields;
  for (auto& v : out) fields.emplace_back(grid, std::move(v));
  return fields;
}

Field mollifier(const PointSet& X, double lambda) {
  return mollifier_derivatives(X, lambda, 0).front();
}

Field vanishing_trial_function(const PointSet& X, int order, std::uint64_t seed) {
  if (order < 0) throw PreconditionError("vanishing order must be non-negative");
  const GridSpec& grid = X.grid();
  Field r = random_field(grid, seed, 4, 0.7);
  r *= 1.0 / r.max_abs();
  const std::vector<double> pts(X.points().begin(), X.points().end());
  const Field v = Field::from_function(grid, [&](double x) {
    double p = 1.0;
    for (double xi : pts) p *= std::pow(std::sin(x - xi), order);
    return p;
  });
  return v * (Field::constant(grid, 1.0) + 0.3 * r);
}

std::vector<Field> band_limited_derivatives(const Field& f, int max_order) {
  if (max_order < 0) throw PreconditionError("derivative order must be non-negative");
  Spectrum s = spectrum(f);
  double peak = 0.0;
  for (const auto& c : s) peak = std::max(peak, std::abs(c));
  for (auto& c : s)
    if (std::abs(c) < 1e-15 * peak) c = 0.0;
  std::vector<Field> out{from_spectrum(f.grid(), s)};
  const std::size_t nyq = f.grid().nyquist();
  s[nyq] = 0.0;
  for (int k = 1; k <= max_order; ++k) {
    for (std::size_t m = 0; m < nyq; ++m) s[m] *= std::complex<double>(0.0, static_cast<double>(m));
    out.push_back(from_spectrum(f.grid(), s));
  }
  return out;
}

bool PeetreTable::bounded(double factor) const { return max_ratio <= factor * reference_ratio; }

PeetreTable check_peetre_estimate(const PointSet& X, int m, std::span<const double> lambdas,
                                  std::span<const Field> trials) {
  if (m < 0 || m > 2) throw PreconditionError("Peetre order m must lie in [0, 2]");
  if (lambdas.empty()) throw PreconditionError("lambda grid is empty");
  const GridSpec& grid = X.grid();
  std::vector<std::vector<Field>> derivs;
  for (const Field& phi : trials) {
    derivs.push_back(band_limited_derivatives(phi, m + 1));
    for (std::size_t node : X.nodes())
      for (int j = 0; j <= m; ++j)
        if (std::abs(derivs.back()[static_cast<std::size_t>(j)][node]) > 1e-9)
          throw PreconditionError("trial function does not vanish to order " +
                                  std::to_string(m + 1) + " on X (derivative " +
                                  std::to_string(j) + ")");
  }
  std::vector<double> dist(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) dist[i] = X.distance(grid.node(i));

  PeetreTable table;
  table.m = m;
  double largest = -1.0;
  for (double lambda : lambdas) {
    const std::vector<Field> chi = mollifier_derivatives(X, lambda, m);
    PeetreRow row{lambda, 0.0, 0.0, 0.0};
    for (const auto& d : derivs) {
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        for (int j = 0; j <= m; ++j) {
          double v = 0.0, binom = 1.0;
          for (int a = 0; a <= j; ++a) {
            v += binom * chi[static_cast<std::size_t>(a)][i] * d[static_cast<std::size_t>(j - a)][i];
            binom = binom * (j - a) / (a + 1);
          }
          num = std::max(num, std::abs(v));
        }
        if (dist[i] <= lambda)
          for (int j = 0; j <= m + 1; ++j) den = std::max(den, std::abs(d[static_cast<std::size_t>(j)][i]));
      }
      const double ratio = num == 0.0 ? 0.0 : num / (lambda * den);
      if (ratio >= row.ratio) row = {lambda, num, den, ratio};
    }
    table.rows.push_back(row);
    table.max_ratio = std::max(table.max_ratio, row.ratio);
    if (lambda > largest) {
      largest = lambda;
      table.reference_ratio = row.ratio;
    }
  }
  return table;
}

void write_peetre_csv(std::ostream& out, std::span<const PeetreTable> tables) {
  csv::write_row(out, {"m", "lambda", "numerator", "denominator", "ratio"});
  for (const PeetreTable& t : tables)
    for (const PeetreRow& r : t.rows)
      csv::write_row(out, {std::to_string(t.m), csv::format(r.lambda), csv::format(r.numerator),
                           csv::format(r.denominator), csv::format(r.ratio)});
}

FieldMap density_map(const JetExpr& f) {
  return [f](const Field& phi) { return evaluate_along(f, phi); };
}

FieldMap integral_map() {
  return [](const Field& phi) { return Field::constant(phi.grid(), integrate(phi)); };
}

std::string JetDetermination::describe() const {
  if (order) return "determined at p = " + std::to_string(*order);
  return "not jet-determined up to k_max = " + std::to_string(max_candidate);
}

JetDetermination test_jet_determination(const FieldMap& F, std::span<const int> candidates,
                                        const PointSet& X, std::uint64_t seed, int trials,
                                        double tol) {
  if (candidates.empty()) throw PreconditionError("no candidate orders");
  if (trials < 1) throw PreconditionError("trials must be positive");
  std::vector<int> orders(candidates.begin(), candidates.end());
  std::sort(orders.begin(), orders.end());
  if (orders.front() < 0) throw PreconditionError("candidate orders must be non-negative");
  const GridSpec& grid = X.grid();
  JetDetermination result;
  result.max_candidate = orders.back();
  Rng rng(seed);
  for (int p : orders) {
    DeterminationStep step{p, true, 0.0, {}, X.points().front()};
    double worst = -1.0;
    for (int t = 0; t < trials; ++t) {
      const auto s1 = static_cast<std::uint64_t>(rng.integer(1, 1LL << 40));
      const auto s2 = static_cast<std::uint64_t>(rng.integer(1, 1LL << 40));
      const Field phi1 = 0.5 * random_field(grid, s1, 8, 0.7);
      const Field phi2 = phi1 + 0.5 * vanishing_trial_function(X, p + 1, s2);
      const Field a = F(phi1), b = F(phi2);
      const double norm = std::max(a.max_abs(), b.max_abs());
      for (std::size_t k = 0; k < X.size(); ++k) {
        const std::size_t node = X.nodes()[k];
        const double diff = norm > 0.0 ? std::abs(a[node] - b[node]) / norm : 0.0;
        if (diff > worst) {
          worst = diff;
          step.witness = {phi1, phi2};
          step.witness_point = X.points()[k];
        }
      }
    }
    step.max_difference = worst;
    step.determines = worst <= tol;
    if (step.determines && !result.order) result.order = p;
    result.steps.push_back(std::move(step));
  }
  return result;
}

void write_determination_csv(std::ostream& out, const JetDetermination& d) {
  csv::write_row(out, {"order", "determines", "max_difference", "witness_point"});
  for (const DeterminationStep& s : d.steps)
    csv::write_row(out, {std::to_string(s.order), s.determines ? "1" : "0",
                         csv::format(s.max_difference), csv::format(s.witness_point)});
}

KPointMap product_of_densities(const JetExpr& f) {
  return [f](const Field& phi, std::span<const std::size_t> nodes) {
    const Field d = evaluate_along(f, phi);
    double p = 1.0;
    for (std::size_t i : nodes) p *= d[i];
    return p;
  };
}

ProbeReport test_k_local(const std::string& name, const KPointMap& F, int k,
                         const GridSpec& grid, int trials, std::uint64_t seed, double tol) {
  if (k < 1 || k > 3) throw PreconditionError("k must lie in [1, 3]");
  if (trials < 1) throw PreconditionError("trials must be positive");
  ProbeReport r;
  r.functional = name;
  r.test = "k_local";
  r.seed = seed;
  r.tolerance = tol;
  r.parameters = {{"k", std::to_string(k)}};
  const double margin = 8.0 * grid.spacing();
  Rng rng(seed);
  double worst = -1.0;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::size_t> nodes;
    while (nodes.size() < static_cast<std::size_t>(k)) {
      const auto i = static_cast<std::size_t>(rng.integer(0, static_cast<long long>(grid.size()) - 1));
      if (std::find(nodes.begin(), nodes.end(), i) == nodes.end()) nodes.push_back(i);
    }
    std::vector<double> pts;
    for (std::size_t i : nodes) pts.push_back(grid.node(i));
    std::sort(pts.begin(), pts.end());
    double best_gap = -1.0, start = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double next = i + 1 < pts.size() ? pts[i + 1] : pts.front() + kTwoPi;
      if (next - pts[i] > best_gap) {
        best_gap = next - pts[i];
        start = pts[i];
      }
    }
    const double radius = std::min(1.2, 0.5 * best_gap - margin);
    if (radius < min_pulse_radius(grid))
      throw PreconditionError("no room for a perturbation away from the points");
    const SupportWindow w(std::fmod(start + 0.5 * best_gap, kTwoPi), radius);
    const double height = rng.uniform(0.3, 0.8) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
    const auto fs = static_cast<std::uint64_t>(rng.integer(1, 1LL << 40));
    const Field phi = 0.5 * random_field(grid, fs, 8, 0.7);
    const Field delta = pulse(w, grid, height);
    const double a = F(phi, nodes), b = F(phi + delta, nodes);
    const double res = std::abs(b - a);
    const double scale = std::max(std::abs(a), std::abs(b));
    r.records.push_back({t, res, scale});
    const double ratio = res == 0.0 ? 0.0 : res / scale;
    if (ratio > worst) {
      worst = ratio;
      r.witness = {phi, phi + delta};
    }
  }
  r.finalize();
  return r;
}

}  // namespace jetcalc
