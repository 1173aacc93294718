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

#include "jetcalc/locality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"

namespace jetcalc {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view locality_label(Verdict v) {
  switch (v) {
    case Verdict::pass: return "local";
    case Verdict::fail: return "nonlocal";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

double ratio_of(double residual, double scale) {
  if (residual == 0.0) return 0.0;
  if (scale == 0.0) return std::numeric_limits<double>::infinity();
  return residual / scale;
}

ProbeReport start(const Functional& F, std::string test, std::uint64_t seed, double tol) {
  ProbeReport r;
  r.functional = F.name();
  r.test = std::move(test);
  r.seed = seed;
  r.tolerance = tol;
  return r;
}

double l2(const Field& f) { return std::sqrt(integrate(f * f)); }

ProbeReport smoothness_from(const Functional& F, const Field& phi, const Field& grad,
                            const LocalityConfig& cfg) {
  ProbeReport r = start(F, "gradient_smoothness", 0, cfg.tail_tol);
  const double floor = cfg.vanishing_kernel_tol * std::max(1.0, std::abs(F(phi)));
  if (grad.max_abs() <= floor) {
    r.note = "gradient vanishes";
    r.records.push_back({0, 0.0, 1.0});
    r.finalize();
    return r;
  }
  const Spectrum s = spectrum(grad);
  const std::size_t nyq = grad.grid().nyquist();
  const std::size_t cut = 3 * nyq / 4;
  double total = 0.0, tail = 0.0;
  for (std::size_t n = 0; n <= nyq; ++n) {
    const double e = ((n == 0 || n == nyq) ? 1.0 : 2.0) * std::norm(s[n]);
    total += e;
    if (n > cut) tail += e;
  }
  r.parameters = {{"band", std::to_string(cut)}};
  r.note = "proxy for an empty wave front set";
  r.records.push_back({0, total > 0.0 ? tail / total : 0.0, 1.0});
  r.finalize();
  return r;
}

ProbeReport continuity_from(const Functional& F, const Field& phi, const Field& grad,
                            std::uint64_t seed, const LocalityConfig& cfg) {
  ProbeReport r = start(F, "gradient_continuity", seed, cfg.lipschitz_bound);
  const double eps = 1e-3;
  Field v = random_field(phi.grid(), seed, 8, 0.7);
  v *= 1.0 / v.max_abs();
  const Field moved = gradient(F, phi + eps * v, cfg.derivative);
  r.parameters = {{"epsilon", csv::format(eps)}};
  r.note = "proxy for smooth dependence of the gradient on phi";
  r.records.push_back({0, l2(moved - grad) / (eps * l2(v)), 1.0});
  r.finalize();
  return r;
}

}  // namespace

void ProbeReport::finalize() {
  trials = static_cast<int>(records.size());
  double worst = -1.0;
  for (const TrialRecord& t : records) {
    const double q = ratio_of(t.residual, t.scale);
    if (q > worst) {
      worst = q;
      max_residual = t.residual;
      scale = t.scale;
    }
  }
  if (worst <= tolerance)
    verdict = Verdict::pass;
  else if (worst > 10.0 * tolerance)
    verdict = Verdict::fail;
  else
    verdict = Verdict::inconclusive;
}

double ProbeReport::worst_ratio() const {
  double worst = 0.0;
  for (const TrialRecord& t : records) worst = std::max(worst, ratio_of(t.residual, t.scale));
  return worst;
}

Field pulse(const SupportWindow& window, const GridSpec& grid, double height) {
  if (!(window.radius() < std::numbers::pi))
    throw PreconditionError("pulse radius must be below pi");
  const double sigma = window.radius() / 9.0;
  return Field::from_function(grid, [&](double x) {
    const double d = signed_offset(x, window.center());
    if (std::abs(d) >= window.radius()) return 0.0;
    return height * std::exp(-0.5 * (d / sigma) * (d / sigma));
  });
}

double min_pulse_radius(const GridSpec& grid) {
  return std::max(0.6, 160.0 / static_cast<double>(grid.size()));
}

std::pair<SupportWindow, SupportWindow> draw_disjoint_windows(Rng& rng, const GridSpec& grid,
                                                              double gap_cells) {
  const double gap = gap_cells * grid.spacing();
  const double lo = min_pulse_radius(grid);
  const double r1 = rng.uniform(lo, std::max(lo, 1.2));
  const double r2 = rng.uniform(lo, std::max(lo, 1.2));
  const double room = kTwoPi - 2.0 * (r1 + r2 + gap);
  if (room <= 0.0) throw PreconditionError("gap too large for two windows on the circle");
  const double c1 = rng.uniform(0.0, kTwoPi);
  const double c2 = std::fmod(c1 + r1 + r2 + gap + rng.uniform(0.0, room), kTwoPi);
  return {SupportWindow(c1, r1), SupportWindow(c2, r2)};
}

std::pair<double, double> additivity_residual(const Functional& F, const Field& phi1,
                                              const Field& phi2, const Field& phi3) {
  const double all = F(phi1 + phi2 + phi3);
  const double left = F(phi1 + phi2);
  const double right = F(phi2 + phi3);
  const double mid = F(phi2);
  const double scale =
      std::max({std::abs(all), std::abs(left), std::abs(right), std::abs(mid)});
  return {std::abs(all - left - right + mid), scale};
}

namespace {

double signed_height(Rng& rng) {
  const double h = rng.uniform(0.3, 0.8);
  return rng.uniform() < 0.5 ? -h : h;
}

}  // namespace

ProbeReport test_additivity(const Functional& F, const GridSpec& grid, int trials,
                            std::uint64_t seed, const LocalityConfig& cfg,
                            const std::optional<Field>& base) {
  if (trials < 1) throw PreconditionError("trials must be positive");
  if (base && !(base->grid() == grid)) throw PreconditionError("base field on another grid");
  ProbeReport r = start(F, "additivity", seed, cfg.additivity_tol);
  r.parameters = {{"gap_cells", csv::format(cfg.gap_cells)},
                  {"base", base ? "given" : "random"}};
  Rng rng(seed);
  double worst = -1.0;
  for (int t = 0; t < trials; ++t) {
    const auto [w1, w3] = draw_disjoint_windows(rng, grid, cfg.gap_cells);
    const Field phi1 = pulse(w1, grid, signed_height(rng));
    const Field phi3 = pulse(w3, grid, signed_height(rng));
    const std::uint64_t field_seed = static_cast<std::uint64_t>(rng.integer(1, 1LL << 40));
    const Field phi2 = base ? *base : 0.5 * random_field(grid, field_seed, 8, 0.7);
    const auto [res, scale] = additivity_residual(F, phi1, phi2, phi3);
    r.records.push_back({t, res, scale});
    if (ratio_of(res, scale) > worst) {
      worst = ratio_of(res, scale);
      r.witness = {phi1, phi2, phi3};
    }
  }
  r.finalize();
  return r;
}

ProbeReport test_partial_additivity(const Functional& F, const GridSpec& grid, int trials,
                                    std::uint64_t seed, const LocalityConfig& cfg) {
  if (trials < 1) throw PreconditionError("trials must be positive");
  ProbeReport r = start(F, "partial_additivity", seed, cfg.additivity_tol);
  r.parameters = {{"gap_cells", csv::format(cfg.gap_cells)}};
  const double f0 = F(Field::zero(grid));
  Rng rng(seed);
  double worst = -1.0;
  for (int t = 0; t < trials; ++t) {
    const auto [w1, w2] = draw_disjoint_windows(rng, grid, cfg.gap_cells);
    const Field phi1 = pulse(w1, grid, signed_height(rng));
    const Field phi2 = pulse(w2, grid, signed_height(rng));
    const double both = F(phi1 + phi2), a = F(phi1), b = F(phi2);
    const double res = std::abs(both - a - b + f0);
    const double scale = std::max({std::abs(both), std::abs(a), std::abs(b), std::abs(f0)});
    r.records.push_back({t, res, scale});
    if (ratio_of(res, scale) > worst) {
      worst = ratio_of(res, scale);
      r.witness = {phi1, phi2};
    }
  }
  r.finalize();
  return r;
}

ProbeReport test_diagonal_support(const Functional& F, const Field& phi, int trials,
                                  std::uint64_t seed, const LocalityConfig& cfg) {
  if (trials < 1) throw PreconditionError("trials must be positive");
  const GridSpec& grid = phi.grid();
  ProbeReport r = start(F, "diagonal_support", seed, cfg.diagonal_tol);
  const double floor = 1e-13 + cfg.vanishing_kernel_tol * std::max(1.0, std::abs(F(phi)));
  r.parameters = {{"gap_cells", csv::format(cfg.gap_cells)}, {"noise_floor", csv::format(floor)}};
  Rng rng(seed);
  bool vanishing = true;
  double worst = -1.0;
  for (int t = 0; t < trials; ++t) {
    const auto [w1, w2] = draw_disjoint_windows(rng, grid, cfg.gap_cells);
    const Field psi = pulse(w1, grid, 1.0);
    const Field chi = pulse(w2, grid, 1.0);
    const double off = std::abs(kernel_probe2(F, phi, psi, chi, cfg.derivative));
    const double norm = std::max(std::abs(kernel_probe2(F, phi, psi, psi, cfg.derivative)),
                                 std::abs(kernel_probe2(F, phi, chi, chi, cfg.derivative)));
    if (norm > floor) vanishing = false;
    // Probes under the finite-difference noise floor are indistinguishable from 0.
    const double res = off > floor ? off : 0.0;
    r.records.push_back({t, res, std::max(norm, floor)});
    if (ratio_of(res, std::max(norm, floor)) > worst) {
      worst = ratio_of(res, std::max(norm, floor));
      r.witness = {psi, chi};
    }
  }
  r.finalize();
  if (vanishing && r.verdict == Verdict::pass) r.note = "kernel vanishes identically";
  return r;
}

ProbeReport test_gradient_smoothness(const Functional& F, const Field& phi,
                                     const LocalityConfig& cfg) {
  return smoothness_from(F, phi, gradient(F, phi, cfg.derivative), cfg);
}

ProbeReport test_gradient_continuity(const Functional& F, const Field& phi, std::uint64_t seed,
                                     const LocalityConfig& cfg) {
  return continuity_from(F, phi, gradient(F, phi, cfg.derivative), seed, cfg);
}

std::vector<Field> default_locality_samples(const GridSpec& grid, std::uint64_t seed) {
  return {0.25 * random_field(grid, seed, 8, 0.7), 0.25 * random_field(grid, seed + 1, 8, 0.7),
          Field::constant(grid, 1.0)};
}

ProbeReport locality_verdict(const Functional& F, const std::vector<Field>& samples,
                             std::uint64_t seed, const LocalityConfig& cfg) {
  if (samples.empty()) throw PreconditionError("locality_verdict needs at least one sample");
  ProbeReport r = start(F, "locality", seed, 0.0);
  std::set<std::string> failing;
  bool undecided = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Field& phi = samples[i];
    const std::uint64_t s = seed + 1000 * (i + 1);
    const Field grad = gradient(F, phi, cfg.derivative);
    std::vector<ProbeReport> subs;
    subs.push_back(test_additivity(F, phi.grid(), cfg.trials, s, cfg, phi));
    subs.push_back(test_diagonal_support(F, phi, cfg.trials, s + 1, cfg));
    subs.push_back(smoothness_from(F, phi, grad, cfg));
    subs.push_back(continuity_from(F, phi, grad, s + 2, cfg));
    for (ProbeReport& sub : subs) {
      sub.parameters.emplace_back("sample", std::to_string(i));
      if (sub.verdict == Verdict::fail) failing.insert(sub.test);
      if (sub.verdict == Verdict::inconclusive) undecided = true;
      r.sub_reports.push_back(std::move(sub));
    }
  }
  for (const ProbeReport& sub : r.sub_reports)
    for (const TrialRecord& t : sub.records) r.records.push_back(t);
  r.trials = static_cast<int>(r.records.size());
  if (!failing.empty()) {
    r.verdict = Verdict::fail;
    std::string names;
    for (const std::string& f : failing) names += (names.empty() ? "" : ";") + f;
    r.note = "failing: " + names;
  } else {
    r.verdict = undecided ? Verdict::inconclusive : Verdict::pass;
  }
  return r;
}

ProbeReport counterexample_witness(const GridSpec& grid, int power) {
  const Functional F = make_counterexample(power);
  const double a = cutoff_thresholds(grid).lower;
  const Field p1 = pulse(SupportWindow(0.0, 1.0), grid, 1.0);
  const Field p3 = pulse(SupportWindow(std::numbers::pi, 1.0), grid, 1.0);
  const Field phi1 = std::sqrt(0.9 * a) / sobolev_norm(p1, 1) * p1;
  const Field phi3 = std::sqrt(0.9 * a) / sobolev_norm(p3, 1) * p3;
  const Field phi2 = Field::constant(grid, 1.0);
  ProbeReport r = start(F, "additivity_witness", 0, LocalityConfig{}.additivity_tol);
  const auto [res, scale] = additivity_residual(F, phi1, phi2, phi3);
  r.records.push_back({0, res, scale});
  r.witness = {phi1, phi2, phi3};
  r.parameters = {{"power", std::to_string(power)},
                  {"h2_sq_phi1", csv::format(std::pow(sobolev_norm(phi1, 1), 2))},
                  {"h2_sq_phi1_plus_phi3", csv::format(std::pow(sobolev_norm(phi1 + phi3, 1), 2))},
                  {"lower", csv::format(a)},
                  {"upper", csv::format(cutoff_thresholds(grid).upper)}};
  r.note = "phi2 = 1; cutoff is 1 on 1+phi1 and 1+phi3 and 0 on 1+phi1+phi3";
  r.finalize();
  return r;
}

void write_probe_csv(std::ostream& out, const ProbeReport& report, bool header) {
  if (header) csv::write_row(out, {"functional", "test", "trial", "residual", "scale", "ratio"});
  if (!report.sub_reports.empty()) {
    for (const ProbeReport& sub : report.sub_reports) write_probe_csv(out, sub, false);
    return;
  }
  std::string test = report.test;
  for (const auto& [k, v] : report.parameters)
    if (k == "sample") test += "@" + v;
  for (const TrialRecord& t : report.records)
    csv::write_row(out, {report.functional, test, std::to_string(t.trial), csv::format(t.residual),
                         csv::format(t.scale), csv::format(ratio_of(t.residual, t.scale))});
}

std::string summarize(const ProbeReport& r) {
  std::string s = r.functional + " " + r.test + ": ";
  if (!r.sub_reports.empty()) {
    s += std::string(locality_label(r.verdict));
  } else {
    s += std::string(to_string(r.verdict)) + " worst ratio " + csv::format(r.worst_ratio()) +
         " (tolerance " + csv::format(r.tolerance) + ", trials " + std::to_string(r.trials) + ")";
  }
  if (!r.note.empty()) s += " [" + r.note + "]";
  return s;
}

}  // namespace jetcalc
