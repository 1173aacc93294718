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

// Runs every acceptance criterion once and prints one line per criterion.
// Exit status is 0 only when all criteria pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli/runner.hpp"
#include "jetcalc/csv.hpp"
#include "jetcalc/derivative.hpp"
#include "jetcalc/functional.hpp"
#include "jetcalc/identities.hpp"
#include "jetcalc/locality.hpp"
#include "jetcalc/peetre.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {
namespace {

constexpr std::uint64_t kSeed = 20260;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

JetExpr u(int j) { return JetExpr::variable(j); }

std::uint64_t draw(Rng& rng) { return static_cast<std::uint64_t>(rng.integer(1, 1LL << 40)); }

double rel_l2(const Field& got, const Field& want) {
  const Field d = got - want;
  return std::sqrt(integrate(d * d) / integrate(want * want));
}

Outcome analytic_derivatives() {
  const GridSpec grid(256);
  const double tol = 1e-6;
  double worst = 0.0;
  std::string where;
  for (const char* name : {"F1", "F3", "F4", "G", "H", "I", "J", "K"}) {
    const Functional F = zoo_member(grid, name);
    Rng rng(kSeed);
    for (int t = 0; t < 20; ++t) {
      const Field phi = 0.5 * random_field(grid, draw(rng), 8, 0.7);
      std::vector<Field> dirs;
      for (int i = 0; i < 3; ++i) dirs.push_back(random_field(grid, draw(rng), 8, 0.7));
      for (std::size_t k = 1; k <= 3; ++k) {
        const std::span<const Field> d(dirs.data(), k);
        const double ana = F.analytic_derivative(phi, d);
        const double rel = std::abs(gateaux(F, phi, d) - ana) /
                           std::max(std::abs(ana), 1e-2 * (1.0 + std::abs(F(phi))));
        if (rel > worst) {
          worst = rel;
          where = std::string(name) + " order " + std::to_string(k);
        }
      }
    }
  }
  return {worst <= tol, "F1,F3,F4,G,H,I,J,K orders 1-3, 20 trials: worst relative error " + sci(worst) +
                            " (" + where + ") vs " + sci(tol)};
}

Outcome symmetry_multilinearity() {
  const GridSpec grid(256);
  const double tol = 1e-8;
  double sym_ok = 0.0, lin_ok = 0.0;
  std::string failing;
  for (const Functional& F : zoo(grid)) {
    Rng rng(kSeed + 1);
    double sym = 0.0, lin = 0.0, est = 0.0;
    for (int t = 0; t < 3; ++t) {
      const Field phi = 0.5 * random_field(grid, draw(rng), 8, 0.7);
      const Field a = random_field(grid, draw(rng), 8, 0.7);
      const Field b = random_field(grid, draw(rng), 8, 0.7);
      const Field c = random_field(grid, draw(rng), 8, 0.7);
      const auto D = [&](std::vector<Field> d) {
        const DerivativeEstimate e = gateaux_estimate(F, phi, d);
        est = std::max(est, e.error);
        return e.value;
      };
      const double ab = D({a, b});
      sym = std::max(sym, std::abs(ab - D({b, a})) / std::max(1.0, std::abs(ab)));
      const double abc = D({a, b, c});
      for (const auto& p : std::vector<std::vector<Field>>{{a, c, b}, {b, a, c}, {b, c, a}, {c, a, b}, {c, b, a}})
        sym = std::max(sym, std::abs(abc - D(p)) / std::max(1.0, std::abs(abc)));
      const double lhs = D({0.7 * a - 1.3 * b, c});
      const double rhs = 0.7 * D({a, c}) - 1.3 * D({b, c});
      lin = std::max(lin, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
    }
    if (sym > tol || lin > tol)
      failing += " " + F.name() + " (symmetry " + sci(sym) + ", linearity " + sci(lin) +
                 ", largest Neville error estimate " + sci(est) + ")";
    else
      sym_ok = std::max(sym_ok, sym), lin_ok = std::max(lin_ok, lin);
  }
  std::string detail = "zoo, orders 2-3, 3 trials: passing members symmetry " + sci(sym_ok) + ", linearity " +
                       sci(lin_ok) + " vs " + sci(tol);
  if (!failing.empty())
    detail += "; over tolerance:" + failing +
              " - residuals sit below the finite-difference uncertainty of a C-infinity, non-analytic functional";
  return {failing.empty(), detail};
}

Outcome ftc() {
  const GridSpec grid(512);
  const double tol = 1e-7;
  std::vector<Functional> fs = zoo(grid);
  std::vector<double> worst(fs.size(), 0.0);
  for (std::uint64_t s = kSeed; s < kSeed + 5; ++s) {
    const auto paths = random_samples(grid, s, 10, 0.25);
    for (std::size_t f = 0; f < fs.size(); ++f)
      for (std::size_t i = 0; i + 1 < paths.size(); i += 2)
        worst[f] = std::max(worst[f], check_ftc(fs[f], paths[i], paths[i + 1], 16));
  }
  std::string failing;
  double rest = 0.0;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    if (worst[f] <= tol) {
      rest = std::max(rest, worst[f]);
      continue;
    }
    // Same paths at 64 points separate quadrature error from a wrong derivative.
    double fine = 0.0;
    for (std::uint64_t s = kSeed; s < kSeed + 5; ++s) {
      const auto paths = random_samples(grid, s, 10, 0.25);
      for (std::size_t i = 0; i + 1 < paths.size(); i += 2)
        fine = std::max(fine, check_ftc(fs[f], paths[i], paths[i + 1], 64));
    }
    failing += (failing.empty() ? "" : ", ") + fs[f].name() + " " + sci(worst[f]) + " (64 points: " + sci(fine) + ")";
  }
  std::string detail = "16-point Gauss-Legendre, 5 seeds x 5 paths: passing members worst " + sci(rest);
  if (!failing.empty())
    detail += "; over " + sci(tol) + ": " + failing +
              "; t -> DU is C-infinity but not analytic, so Gauss-Legendre converges slowly";
  return {failing.empty(), detail};
}

Outcome locality_classification() {
  std::vector<std::string> names;
  for (const Functional& F : zoo(GridSpec(16))) names.push_back(F.name());
  names.push_back("Fnl");
  LocalityConfig cfg;
  cfg.trials = 10;
  bool ok = true;
  std::string mismatches, notes;
  for (const std::string& name : names) {
    const GridSpec grid(cli::locality_grid(name));
    const Functional F = name == "Fnl" ? make_counterexample(3) : zoo_member(grid, name);
    std::string first;
    for (std::uint64_t s = kSeed; s < kSeed + 5; ++s) {
      const ProbeReport r = locality_verdict(F, default_locality_samples(grid, s), s, cfg);
      const std::string got(locality_label(r.verdict));
      if (s == kSeed) first = got;
      if (got != cli::expected_locality(name) || got != first) {
        ok = false;
        mismatches += " " + name + "@" + std::to_string(s) + "=" + got;
      }
      if ((name == "G" || name == "Fnl") && s == kSeed) {
        if (r.note.empty()) ok = false;
        notes += " " + name + " [" + r.note + "]";
      }
    }
  }
  return {ok, "12 functionals x 5 seeds, verdicts " + std::string(ok ? "as expected and stable" : "differ:" + mismatches) +
                  ";" + notes};
}

Outcome additivity_vs_diagonal() {
  const GridSpec grid(256);
  std::vector<Functional> fs = zoo(grid);
  fs.push_back(make_counterexample(3));
  const auto samples = default_locality_samples(grid, kSeed);
  int agree = 0, total = 0;
  std::string bad;
  for (const Functional& F : fs)
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto a = test_additivity(F, grid, 50, kSeed + 10 + i, {}, samples[i]);
      const auto d = test_diagonal_support(F, samples[i], 50, kSeed + 20 + i);
      ++total;
      if (a.verdict == d.verdict)
        ++agree;
      else
        bad += " " + F.name() + "@" + std::to_string(i);
    }
  return {agree == total, std::to_string(agree) + "/" + std::to_string(total) +
                              " (functional, sample) verdicts agree, 50 trials each" + bad};
}

Outcome counterexample() {
  const GridSpec grid(256);
  const Functional Fnl = make_counterexample(3);
  const ProbeReport partial = test_partial_additivity(Fnl, grid, 50, kSeed);
  const ProbeReport witness = counterexample_witness(grid, 3);
  const double value = Fnl(Field::constant(grid, 1.0));
  const double expect = std::pow(2.0 * std::numbers::pi, 3);
  const double rel = std::abs(value - expect) / expect;
  const bool ok = partial.verdict == Verdict::pass && partial.worst_ratio() <= 1e-9 &&
                  witness.worst_ratio() >= 0.1 && rel <= 1e-8;
  return {ok, "partial additivity worst ratio " + sci(partial.worst_ratio()) + " (<= 1e-9, 50 pairs); phi2 = 1 witness ratio " +
                  sci(witness.worst_ratio()) + " (>= 0.1); F_nl(1) relative error " + sci(rel) + " (<= 1e-8)"};
}

Outcome euler_lagrange_gradient() {
  const GridSpec grid(256);
  const auto w = standard_weights(grid);
  const Functional F = make_local("L41", JetExpr::coefficient("h", w.h) * pow(u(0), 4) +
                                             JetExpr::coefficient("g", w.g) * pow(u(1), 2));
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 3; ++s) {
    const Field phi = 0.5 * random_field(grid, kSeed + 30 + s, 8, 0.7);
    const Field oracle = 4.0 * w.h * phi * phi * phi - 2.0 * spectral_derivative(w.g * spectral_derivative(phi, 1), 1);
    worst = std::max(worst, rel_l2(gradient(F, phi), oracle));
  }
  return {worst <= 1e-5, "gradient of h u0^4 + g u1^2 vs 4h phi^3 - 2(g phi')', 3 fields: relative L2 " + sci(worst) +
                             " vs 1e-05"};
}

Outcome delta_coefficients() {
  const GridSpec grid(256);
  const auto w = standard_weights(grid);
  const Functional F = make_local("L41", JetExpr::coefficient("h", w.h) * pow(u(0), 4) +
                                             JetExpr::coefficient("g", w.g) * pow(u(1), 2));
  const Field phi = 0.5 * random_field(grid, kSeed + 40, 8, 0.7);
  const KernelCoefficients k = extract_delta_coefficients(F, phi, 2);
  const Field want[] = {12.0 * w.h * phi * phi, -1.0 * spectral_derivative(w.g, 1), -1.0 * w.g};
  double worst = 0.0;
  std::string per;
  for (std::size_t i = 0; i < 3; ++i) {
    const double e = rel_l2(k.coefficients[i], want[i]);
    worst = std::max(worst, e);
    per += (i ? ", " : "") + std::string("f") + std::to_string(i) + " " + sci(e);
  }
  const double twice = std::max(rel_l2(k.coefficients[1], 2.0 * want[1]), rel_l2(k.coefficients[2], 2.0 * want[2]));
  std::string detail = "recovered vs (12h phi^2, -g', -g): " + per + " vs 1e-04";
  if (worst > 1e-4)
    detail += "; f1, f2 match (-2g', -2g) to " + sci(twice) +
              ": D2F(u,v) = 2 Int u (6h phi^2 v - (g v')'), and the stated f1, f2 drop the factor 2 kept in f0";
  return {worst <= 1e-4, detail};
}

Outcome poincare() {
  const GridSpec grid(512);
  const auto psis = random_samples(grid, kSeed + 50, 21, 0.25);
  double first = 0.0, second = 0.0;
  for (const auto& [name, f] : builtin_lagrangians(grid)) {
    first = std::max(first, check_poincare_first(f, std::span(psis).first(20)));
    for (std::size_t i = 0; i < 20; ++i) second = std::max(second, check_poincare_second(f, psis[i], psis[i + 1], 16));
  }
  const auto w = standard_weights(grid);
  RandomExprOptions opts;
  opts.max_order = 2;
  opts.coefficients = {{"f", w.f}, {"g", w.g}, {"h", w.h}};
  Rng rng(kSeed + 51);
  const auto ex = random_samples(grid, kSeed + 52, 3, 0.25);
  double exact = 0.0;
  for (int i = 0; i < 30; ++i) exact = std::max(exact, check_exactness(random_jet_expr(rng, opts), ex));
  const bool ok = first <= 1e-8 && second <= 1e-7 && exact <= 1e-8;
  return {ok, "built-in Lagrangians, 20 psi: first " + sci(first) + " (<= 1e-8), second " + sci(second) +
                  " (<= 1e-7); 30 random total derivatives " + sci(exact) + " (<= 1e-8)"};
}

Outcome peetre_estimate() {
  const GridSpec grid(8192);
  const std::size_t n = grid.size();
  const std::vector<PointSet> sets{PointSet({grid.node(0)}, grid),
                                   PointSet({grid.node(n / 8), grid.node(n / 2 - n / 16)}, grid),
                                   PointSet({grid.node(0), grid.node(n / 3), grid.node(2 * n / 3)}, grid)};
  double plateau = 0.0;
  for (const PointSet& X : sets)
    for (double lambda : {0.25, 0.125, 0.0625}) {
      const Field chi = mollifier(X, lambda);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = X.distance(grid.node(i));
        if (d <= lambda / 8) plateau = std::max(plateau, std::abs(chi[i] - 1.0));
        if (d >= lambda) plateau = std::max(plateau, std::abs(chi[i]));
      }
    }
  std::vector<double> lambdas;
  for (int j = 2; j <= 6; ++j) lambdas.push_back(std::ldexp(1.0, -j));
  double growth = 0.0;
  for (const PointSet& X : sets)
    for (int m = 0; m <= 2; ++m) {
      std::vector<Field> trials;
      for (std::uint64_t s = 0; s < 3; ++s) trials.push_back(vanishing_trial_function(X, m + 1, kSeed + 60 + s));
      const PeetreTable t = check_peetre_estimate(X, m, lambdas, trials);
      growth = std::max(growth, t.max_ratio / t.reference_ratio);
    }
  return {plateau <= 1e-12 && growth <= 3.0,
          "N = 8192, |X| = 1,2,3: plateau/support deviation " + sci(plateau) +
              " (<= 1e-12); max ratio / largest-lambda ratio over lambda = 2^-2..2^-6, m = 0,1,2: " + sci(growth) +
              " (<= 3)"};
}

Outcome jet_determination(const std::filesystem::path& out) {
  const GridSpec grid(512);
  const PointSet X({grid.node(32), grid.node(263)}, grid);
  const auto w = standard_weights(grid);
  const JetExpr L41 = JetExpr::coefficient("h", w.h) * pow(u(0), 4) + JetExpr::coefficient("g", w.g) * pow(u(1), 2);
  const std::vector<int> cand{0, 1, 2, 3, 4};
  const JetDetermination el = test_jet_determination(density_map(euler_lagrange(L41).expr), cand, X, kSeed + 70);
  const JetDetermination in = test_jet_determination(integral_map(), cand, X, kSeed + 71);
  const DeterminationStep& one = el.steps[1];
  std::filesystem::create_directories(out);
  std::ofstream wit(out / "determination_witness.csv");
  csv::write_row(wit, {"x", "phi1", "phi2"});
  for (std::size_t i = 0; i < grid.size(); ++i)
    csv::write_row(wit, {csv::format(grid.node(i)), csv::format(one.witness[0][i]), csv::format(one.witness[1][i])});
  const bool ok = el.order == 2 && !one.determines && !in.order;
  return {ok, "EL(h u0^4 + g u1^2): " + el.describe() + ", p = 1 witness differs by " + sci(one.max_difference) +
                  " at x = " + csv::format(one.witness_point) + " (pair in " + (out / "determination_witness.csv").string() +
                  "); integral map: " + in.describe()};
}

Outcome order_growth() {
  const GridSpec grid(256);
  const Functional U = zoo_member(grid, "U");
  const int freqs[] = {1, 2, 3, 4, 5, 6, 7, 8};
  // At φ ≡ n only the n-th band is active: DU(e^{iωx}) ∝ (iω)^n r^ω with r = 1/2,
  // so the fitted slope is n plus the fit of ω ln r against ln ω.
  double mx = 0, my = 0;
  for (int f : freqs) mx += std::log(f) / 8, my += f * std::log(0.5) / 8;
  double sxy = 0, sxx = 0;
  for (int f : freqs) sxy += (std::log(f) - mx) * (f * std::log(0.5) - my), sxx += (std::log(f) - mx) * (std::log(f) - mx);
  const double shift = sxy / sxx;
  bool increasing = true, near = true;
  double prev = -1e300;
  std::string slopes;
  for (int n = 1; n <= 4; ++n) {
    const double s = estimate_order(U, Field::constant(grid, n), freqs).slope;
    increasing = increasing && s > prev;
    near = near && std::abs(s - (n + shift)) <= 0.05;
    prev = s;
    slopes += (n > 1 ? ", " : "") + csv::format(std::round(s * 1e4) / 1e4);
  }
  return {increasing && near, "U at phi = 1..4: slopes " + slopes + " (oracle n + " + csv::format(std::round(shift * 1e4) / 1e4) +
                                  " within 0.05; strictly increasing: " + (increasing ? "yes" : "no") + ")"};
}

}  // namespace
}  // namespace jetcalc

int main(int argc, char** argv) {
  using namespace jetcalc;
  const std::filesystem::path out = argc > 1 ? argv[1] : "acceptance_out";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"analytic-derivative agreement", analytic_derivatives},
      {"derivative symmetry and multilinearity", symmetry_multilinearity},
      {"fundamental theorem of calculus", ftc},
      {"locality classification", locality_classification},
      {"additivity iff diagonal support", additivity_vs_diagonal},
      {"counterexample behavior", counterexample},
      {"Euler-Lagrange gradient", euler_lagrange_gradient},
      {"delta-coefficient extraction", delta_coefficients},
      {"Poincare identities and exactness", poincare},
      {"Peetre estimate", peetre_estimate},
      {"jet determination", [&] { return jet_determination(out); }},
      {"order growth", order_growth},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria pass\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
