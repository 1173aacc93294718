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

#include "jetcalc/functional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"

namespace jetcalc {

std::string_view to_string(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::local: return "local";
    case FunctionalKind::bilinear_kernel: return "bilinear_kernel";
    case FunctionalKind::analytic: return "analytic";
    case FunctionalKind::counterexample: return "counterexample";
    case FunctionalKind::unbounded_order: return "unbounded_order";
  }
  return "unknown";
}

struct Functional::State {
  std::string name;
  FunctionalKind kind;
  Evaluator eval;
  std::optional<JetExpr> density;
  std::optional<JetExpr> raw_density;
  SupportWindow window = SupportWindow::full_circle();
  DerivativeRule rule;
  int rule_order = 0;
};

Functional::Functional(std::string name, FunctionalKind kind, Evaluator eval) {
  if (!eval) throw PreconditionError("functional needs an evaluator");
  auto s = std::make_shared<State>();
  s->name = std::move(name);
  s->kind = kind;
  s->eval = std::move(eval);
  state_ = std::move(s);
}

Functional::Functional(std::shared_ptr<const State> state) : state_(std::move(state)) {}

const std::string& Functional::name() const { return state_->name; }
FunctionalKind Functional::kind() const { return state_->kind; }

double Functional::operator()(const Field& phi) const {
  const double v = state_->eval(phi);
  if (!std::isfinite(v))
    throw NumericalError("functional " + state_->name + " evaluated to a non-finite value");
  return v;
}

bool Functional::has_density() const { return state_->density.has_value(); }

const JetExpr& Functional::density() const {
  if (!state_->density) throw PreconditionError(state_->name + " has no jet density");
  return *state_->density;
}

const JetExpr& Functional::raw_density() const {
  if (!state_->raw_density) throw PreconditionError(state_->name + " has no jet density");
  return *state_->raw_density;
}

const SupportWindow& Functional::window() const { return state_->window; }

int Functional::jet_order() const {
  return state_->density ? std::max(0, state_->density->max_jet_order()) : -1;
}

int Functional::analytic_order() const { return state_->rule ? state_->rule_order : 0; }

double Functional::analytic_derivative(const Field& phi, std::span<const Field> dirs) const {
  const int k = static_cast<int>(dirs.size());
  if (k == 0 || k > analytic_order())
    throw PreconditionError(state_->name + " has no closed-form derivative of order " +
                            std::to_string(k));
  return state_->rule(phi, dirs);
}

Functional Functional::with_derivative_rule(DerivativeRule rule, int max_order) const {
  if (!rule || max_order < 1) throw PreconditionError("derivative rule needs order >= 1");
  auto s = std::make_shared<State>(*state_);
  s->rule = std::move(rule);
  s->rule_order = max_order;
  return Functional(std::shared_ptr<const State>(std::move(s)));
}

std::vector<std::pair<std::string, std::string>> Functional::metadata() const {
  std::vector<std::pair<std::string, std::string>> m{
      {"functional", state_->name},
      {"kind", std::string(to_string(state_->kind))},
      {"jet_order", std::to_string(jet_order())},
      {"analytic_order", std::to_string(analytic_order())},
  };
  if (state_->raw_density) {
    m.emplace_back("density", state_->raw_density->to_string());
    m.emplace_back("window", csv::format(state_->window.center()) + ":" +
                                 csv::format(state_->window.radius()));
  }
  return m;
}

Functional make_local(std::string name, const JetExpr& f, const SupportWindow& window,
                      std::optional<GridSpec> grid) {
  if (!grid) grid = f.grid();
  JetExpr density = f;
  if (!window.is_full()) {
    if (!grid) throw PreconditionError("a windowed local functional needs a grid");
    density = JetExpr::coefficient("window", plateau(window, *grid)) * f;
  }
  const int order = std::max(0, density.max_jet_order());
  auto s = std::make_shared<Functional::State>();
  s->name = std::move(name);
  s->kind = FunctionalKind::local;
  s->eval = [density, order](const Field& psi) {
    return integrate(evaluate_along(density, derivatives(psi, order)));
  };
  s->density = density;
  s->raw_density = f;
  s->window = window;
  return Functional(std::shared_ptr<const Functional::State>(std::move(s)));
}

double integrate_pointwise(const JetExpr& f, const Field& psi) {
  const int k = std::max(0, f.max_jet_order());
  const auto ds = derivatives(psi, k);
  double sum = 0.0;
  std::vector<double> v(static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    for (int j = 0; j <= k; ++j) v[static_cast<std::size_t>(j)] = ds[static_cast<std::size_t>(j)][i];
    sum += evaluate(f, Jet(psi.grid().node(i), v));
  }
  return sum * psi.grid().spacing();
}

namespace {

void require_grid(const Field& phi, const GridSpec& grid, const std::string& name) {
  if (!(phi.grid() == grid))
    throw PreconditionError(name + " was built for a grid of " + std::to_string(grid.size()) +
                            " points");
}

double product_integral(const Field& weight, std::span<const Field> factors) {
  std::vector<double> acc(weight.samples().begin(), weight.samples().end());
  for (const Field& f : factors)
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= f[i];
  double s = 0.0;
  for (double a : acc) s += a;
  return s * weight.grid().spacing();
}

double falling_factorial(int n, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= n - i;
  return r;
}

}  // namespace

Functional make_bilocal(std::string name, const GridSpec& grid,
                        const std::function<double(double, double)>& kernel) {
  const std::size_t n = grid.size();
  auto k = std::make_shared<std::vector<double>>(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) (*k)[i * n + j] = kernel(grid.node(i), grid.node(j));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if ((*k)[i * n + j] != (*k)[j * n + i])
        throw PreconditionError("bilocal kernel must be symmetric");
  const double h2 = grid.spacing() * grid.spacing();
  auto form = [k, n, h2](const Field& a, const Field& b) {
    const auto m = static_cast<Eigen::Index>(n);
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        kernel_matrix(k->data(), m, m);
    const Eigen::Map<const Eigen::VectorXd> av(a.samples().data(), m), bv(b.samples().data(), m);
    return av.dot(kernel_matrix * bv) * h2;
  };
  Functional g(name, FunctionalKind::bilinear_kernel, [form, grid, name](const Field& phi) {
    require_grid(phi, grid, name);
    return form(phi, phi);
  });
  return g.with_derivative_rule(
      [form](const Field& phi, std::span<const Field> d) {
        switch (d.size()) {
          case 1: return 2.0 * form(phi, d[0]);
          case 2: return 2.0 * form(d[0], d[1]);
          default: return 0.0;
        }
      },
      4);
}

StandardWeights standard_weights(const GridSpec& grid) {
  return {
      Field::from_function(grid,
                           [](double x) { return 0.8 + 0.3 * std::cos(x) + 0.2 * std::sin(2 * x); }),
      Field::from_function(grid,
                           [](double x) { return 1.1 + 0.3 * std::cos(2 * x) - 0.2 * std::sin(x); }),
      Field::from_function(grid,
                           [](double x) { return 1.0 + 0.25 * std::sin(x) + 0.1 * std::cos(3 * x); }),
  };
}

std::vector<std::pair<std::string, JetExpr>> builtin_lagrangians(const GridSpec& grid) {
  const StandardWeights w = standard_weights(grid);
  const JetExpr f = JetExpr::coefficient("f", w.f);
  const JetExpr g = JetExpr::coefficient("g", w.g);
  const JetExpr h = JetExpr::coefficient("h", w.h);
  const JetExpr u0 = JetExpr::variable(0), u1 = JetExpr::variable(1), u2 = JetExpr::variable(2);
  return {
      {"L1", u0},
      {"L2", pow(u0, 2)},
      {"F3", f * pow(u0, 3)},
      {"F4", f * pow(u0, 4)},
      {"H", g * h * pow(u1, 2)},
      {"I", f * exp(u0)},
      {"K", f * sin(u0)},
      {"L41", h * pow(u0, 4) + g * pow(u1, 2)},
      {"Q2", h * pow(u0, 2) * pow(u1, 2) + 0.1 * (g * pow(u2, 2))},
  };
}

double embedding_constant(const GridSpec& grid) {
  const auto half = static_cast<long>(grid.nyquist());
  double sum = 1.0;
  for (long n = half; n >= 1; --n) {
    const double q = 1.0 + static_cast<double>(n) * static_cast<double>(n);
    sum += 2.0 / (q * q);
  }
  return std::sqrt(sum) / kTwoPi;
}

CutoffThresholds cutoff_thresholds(const GridSpec& grid) {
  const double c = embedding_constant(grid);
  return {c, 1.0 / (3.0 * c * c), 1.0 / (2.0 * c * c)};
}

double cutoff_step(double t, double a, double b) {
  if (!(a < b)) throw PreconditionError("cutoff step needs a < b");
  if (t <= a) return 1.0;
  if (t >= b) return 0.0;
  const double p = std::exp(-1.0 / (b - t));
  const double q = std::exp(-1.0 / (t - a));
  return p / (p + q);
}

double counterexample_cutoff(const Field& f) {
  const CutoffThresholds th = cutoff_thresholds(f.grid());
  const double norm = sobolev_norm(Field::constant(f.grid(), 1.0) - f, 1);
  return cutoff_step(norm * norm, th.lower, th.upper);
}

Functional make_counterexample(int power) {
  if (power < 2) throw PreconditionError("counterexample power N must be at least 2");
  return Functional("Fnl", FunctionalKind::counterexample, [power](const Field& f) {
    const double chi = counterexample_cutoff(f);
    const double total = integrate(f);
    return (1.0 - chi) * total + chi * std::pow(total, power);
  });
}

namespace {

double value_bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

double value_bump_derivative(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return value_bump(t) * (-2.0 * t / (q * q));
}

// Σ_m B(s−m) and its derivative; only the two nearest integers contribute.
std::pair<double, double> partition_normalizer(double s) {
  const double base = std::floor(s);
  double sum = 0.0, dsum = 0.0;
  for (double m = base - 1.0; m <= base + 2.0; m += 1.0) {
    sum += value_bump(s - m);
    dsum += value_bump_derivative(s - m);
  }
  return {sum, dsum};
}

}  // namespace

double value_partition(int n, double s) {
  const double b = value_bump(s - n);
  if (b == 0.0) return 0.0;
  return b / partition_normalizer(s).first;
}

double value_partition_derivative(int n, double s) {
  const double b = value_bump(s - n);
  const double db = value_bump_derivative(s - n);
  if (b == 0.0 && db == 0.0) return 0.0;
  const auto [sum, dsum] = partition_normalizer(s);
  return (db * sum - b * dsum) / (sum * sum);
}

Functional make_unbounded_order(const GridSpec& grid, double poisson_radius) {
  if (!(poisson_radius > 0.0 && poisson_radius < 1.0))
    throw PreconditionError("Poisson radius must lie in (0, 1)");
  const double r = poisson_radius;
  const Field weight = Field::from_function(
      grid, [r](double x) { return (1.0 - r * r) / (1.0 - 2.0 * r * std::cos(x) + r * r); });

  // Integer bands m whose χ_m can be nonzero somewhere on the range of phi.
  auto bands = [](const Field& phi) {
    const auto s = phi.samples();
    const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
    return std::pair<int, int>{static_cast<int>(std::floor(*lo)), static_cast<int>(std::ceil(*hi))};
  };
  auto max_order = [grid](int lo, int hi) {
    const int k = std::max(std::abs(lo), std::abs(hi));
    if (static_cast<std::size_t>(k) > grid.derivative_guard())
      throw PreconditionError("field range needs derivative order " + std::to_string(k) +
                              " beyond the aliasing guard");
    return k;
  };

  Functional u("U", FunctionalKind::unbounded_order, [=](const Field& phi) {
    require_grid(phi, grid, "U");
    const auto [lo, hi] = bands(phi);
    const auto ds = derivatives(phi, max_order(lo, hi));
    double sum = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
      double local = 0.0;
      for (int m = lo; m <= hi; ++m) {
        const double c = value_partition(m, phi[i]);
        if (c != 0.0) local += c * ds[static_cast<std::size_t>(std::abs(m))][i];
      }
      sum += local * weight[i];
    }
    return sum * grid.spacing();
  });
  return u.with_derivative_rule(
      [=](const Field& phi, std::span<const Field> dirs) {
        const auto [lo, hi] = bands(phi);
        const int k = max_order(lo, hi);
        const auto ds = derivatives(phi, k);
        const auto vs = derivatives(dirs[0], k);
        double sum = 0.0;
        for (std::size_t i = 0; i < phi.size(); ++i) {
          double local = 0.0;
          for (int m = lo; m <= hi; ++m) {
            const auto a = static_cast<std::size_t>(std::abs(m));
            local += value_partition_derivative(m, phi[i]) * vs[0][i] * ds[a][i] +
                     value_partition(m, phi[i]) * vs[a][i];
          }
          sum += local * weight[i];
        }
        return sum * grid.spacing();
      },
      1);
}

std::vector<Functional> zoo(const GridSpec& grid) {
  const StandardWeights w = standard_weights(grid);
  const JetExpr f = JetExpr::coefficient("f", w.f);
  const JetExpr g = JetExpr::coefficient("g", w.g);
  const JetExpr h = JetExpr::coefficient("h", w.h);
  const JetExpr u0 = JetExpr::variable(0), u1 = JetExpr::variable(1);
  const Field gh = w.g * w.h;

  std::vector<Functional> out;

  for (int n : {1, 3, 4}) {
    const Field wf = w.f;
    out.push_back(make_local("F" + std::to_string(n), f * pow(u0, n))
                      .with_derivative_rule(
                          [wf, n](const Field& phi, std::span<const Field> d) {
                            const int k = static_cast<int>(d.size());
                            if (k > n) return 0.0;
                            std::vector<Field> factors(d.begin(), d.end());
                            for (int i = 0; i < n - k; ++i) factors.push_back(phi);
                            return falling_factorial(n, k) * product_integral(wf, factors);
                          },
                          4));
  }

  const auto bump_weight = [](double x) { return 1.0 + 0.5 * std::sin(x); };
  out.push_back(make_bilocal("G", grid, [bump_weight](double x, double y) {
    return 0.5 * std::exp(std::cos(x - y)) + bump_weight(x) * bump_weight(y);
  }));

  out.push_back(make_local("H", g * h * pow(u1, 2))
                    .with_derivative_rule(
                        [gh](const Field& phi, std::span<const Field> d) {
                          switch (d.size()) {
                            case 1: {
                              const Field a[] = {spectral_derivative(phi, 1),
                                                 spectral_derivative(d[0], 1)};
                              return 2.0 * product_integral(gh, a);
                            }
                            case 2: {
                              const Field a[] = {spectral_derivative(d[0], 1),
                                                 spectral_derivative(d[1], 1)};
                              return 2.0 * product_integral(gh, a);
                            }
                            default: return 0.0;
                          }
                        },
                        4));

  const Field wf = w.f;
  out.push_back(make_local("I", f * exp(u0))
                    .with_derivative_rule(
                        [wf](const Field& phi, std::span<const Field> d) {
                          std::vector<double> ex(phi.size());
                          for (std::size_t i = 0; i < ex.size(); ++i) ex[i] = std::exp(phi[i]);
                          std::vector<Field> factors(d.begin(), d.end());
                          factors.push_back(Field(phi.grid(), std::move(ex)));
                          return product_integral(wf, factors);
                        },
                        4));

  out.push_back(Functional("J", FunctionalKind::analytic,
                           [wf](const Field& phi) {
                             require_grid(phi, wf.grid(), "J");
                             return std::exp(inner(wf, phi));
                           })
                    .with_derivative_rule(
                        [wf](const Field& phi, std::span<const Field> d) {
                          double r = std::exp(inner(wf, phi));
                          for (const Field& v : d) r *= inner(wf, v);
                          return r;
                        },
                        4));

  out.push_back(make_local("K", f * sin(u0))
                    .with_derivative_rule(
                        [wf](const Field& phi, std::span<const Field> d) {
                          const double shift = 0.5 * std::numbers::pi * static_cast<double>(d.size());
                          std::vector<double> s(phi.size());
                          for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(phi[i] + shift);
                          std::vector<Field> factors(d.begin(), d.end());
                          factors.push_back(Field(phi.grid(), std::move(s)));
                          return product_integral(wf, factors);
                        },
                        4));

  out.push_back(make_unbounded_order(grid));

  out.push_back(make_local("L2", pow(u0, 2), SupportWindow::full_circle(), grid)
                    .with_derivative_rule(
                        [](const Field& phi, std::span<const Field> d) {
                          switch (d.size()) {
                            case 1: return 2.0 * inner(phi, d[0]);
                            case 2: return 2.0 * inner(d[0], d[1]);
                            default: return 0.0;
                          }
                        },
                        4));

  const Field wg = w.g, wh = w.h;
  out.push_back(
      make_local("L41", h * pow(u0, 4) + g * pow(u1, 2))
          .with_derivative_rule(
              [wg, wh](const Field& phi, std::span<const Field> d) {
                const std::size_t k = d.size();
                std::vector<Field> pot(d.begin(), d.end());
                for (std::size_t i = k; i < 4; ++i) pot.push_back(phi);
                const double quartic = falling_factorial(4, static_cast<int>(k)) * product_integral(wh, pot);
                if (k > 2) return quartic;
                std::vector<Field> grad;
                for (const Field& v : d) grad.push_back(spectral_derivative(v, 1));
                if (k == 1) grad.push_back(spectral_derivative(phi, 1));
                return quartic + 2.0 * product_integral(wg, grad);
              },
              4));
  return out;
}

Functional zoo_member(const GridSpec& grid, std::string_view name) {
  if (name == "Fnl") return make_counterexample(3);
  for (Functional& f : zoo(grid))
    if (f.name() == name) return f;
  throw PreconditionError("unknown functional '" + std::string(name) + "'");
}

}  // namespace jetcalc
