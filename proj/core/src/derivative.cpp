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

#include "jetcalc/derivative.hpp"

#include <cmath>
#include <complex>
#include <ostream>
#include <string>

#include <Eigen/Dense>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"

namespace jetcalc {

void DerivativeConfig::validate() const {
  if (!(base_step > 0.0) || !std::isfinite(base_step))
    throw PreconditionError("base_step must be positive");
  if (richardson_levels < 2) throw PreconditionError("richardson_levels must be at least 2");
}

namespace {

DerivativeEstimate neville(const Functional& F, const Field& phi, std::span<const Field> dirs,
                           std::span<const double> scale, double h0, int richardson_levels) {
  const std::size_t k = dirs.size();
  const std::size_t corners = std::size_t{1} << k;
  const auto levels = static_cast<std::size_t>(richardson_levels);
  std::vector<std::vector<double>> table(levels);
  int evaluations = 0;
  std::vector<double> t(k);
  for (std::size_t l = 0; l < levels; ++l) {
    const double h = std::ldexp(h0, -static_cast<int>(l));
    double sum = 0.0;
    for (std::size_t mask = 0; mask < corners; ++mask) {
      Field p = phi;
      double sign = 1.0;
      for (std::size_t i = 0; i < k; ++i) {
        const bool neg = (mask >> i) & 1U;
        t[i] = (neg ? -h : h) * scale[i];
        if (neg) sign = -sign;
        p += t[i] * dirs[i];
      }
      double v;
      try {
        v = F(p);
      } catch (const NumericalError& e) {
        std::string where;
        for (double ti : t) where += (where.empty() ? "" : ", ") + csv::format(ti);
        throw NumericalError("non-finite evaluation of " + F.name() + " at t = (" + where + "): " +
                             e.what());
      }
      ++evaluations;
      sum += sign * v;
    }
    double denom = static_cast<double>(corners);
    for (std::size_t i = 0; i < k; ++i) denom *= h * scale[i];
    table[l].push_back(sum / denom);
    double factor = 1.0;
    for (std::size_t m = 1; m <= l; ++m) {
      factor *= 4.0;
      const double prev = table[l][m - 1];
      table[l].push_back(prev + (prev - table[l - 1][m - 1]) / (factor - 1.0));
    }
  }
  const double best = table[levels - 1][levels - 1];
  const double err = std::abs(best - table[levels - 2][levels - 2]);
  return {best, err, evaluations};
}

}  // namespace

DerivativeEstimate gateaux_estimate(const Functional& F, const Field& phi,
                                    std::span<const Field> dirs, const DerivativeConfig& cfg) {
  cfg.validate();
  const std::size_t k = dirs.size();
  if (k < 1 || k > 4) throw PreconditionError("derivative order must lie in [1, 4]");
  for (const Field& d : dirs)
    if (!(d.grid() == phi.grid())) throw PreconditionError("direction lives on a different grid");

  std::vector<double> scale(k, 1.0);
  if (cfg.scale_mode == StepScale::relative)
    for (std::size_t i = 0; i < k; ++i) scale[i] = 1.0 / (1.0 + dirs[i].max_abs());

  DerivativeEstimate est = neville(F, phi, dirs, scale, cfg.base_step, cfg.richardson_levels);
  if (cfg.adaptive_step && k > 1 && cfg.base_step < 1.0) {
    int evaluations = est.evaluations;
    for (double h : {0.1 * cfg.base_step, std::pow(cfg.base_step, 2.0 / static_cast<double>(k + 1))}) {
      const DerivativeEstimate alt = neville(F, phi, dirs, scale, h, cfg.richardson_levels);
      evaluations += alt.evaluations;
      if (alt.error < est.error) est = alt;
    }
    est.evaluations = evaluations;
  }
  return est;
}

double gateaux(const Functional& F, const Field& phi, std::span<const Field> dirs,
               const DerivativeConfig& cfg) {
  return gateaux_estimate(F, phi, dirs, cfg).value;
}

Field fourier_mode(const GridSpec& grid, int n, bool sine) {
  return Field::from_function(grid, [n, sine](double x) {
    const double a = static_cast<double>(n) * x;
    return sine ? std::sin(a) : std::cos(a);
  });
}

namespace {

// Field g with ∫ g e = pairing(e) for every real Fourier mode e up to band.
template <class Pairing>
Field synthesize(const GridSpec& grid, int band_limit, const Pairing& pairing) {
  const int nyq = static_cast<int>(grid.nyquist());
  const int band = band_limit < 0 ? nyq : band_limit;
  if (band > nyq)
    throw PreconditionError("gradient band limit " + std::to_string(band) +
                            " exceeds the Nyquist mode " + std::to_string(nyq));
  Spectrum s(grid.nyquist() + 1, 0.0);
  s[0] = pairing(Field::constant(grid, 1.0)) / kTwoPi;
  for (int n = 1; n <= band; ++n) {
    const double c = pairing(fourier_mode(grid, n, false));
    if (n == nyq) {
      s[static_cast<std::size_t>(n)] = c / kTwoPi;
      continue;
    }
    const double d = pairing(fourier_mode(grid, n, true));
    // a cos + b sin = Re((a − ib) e^{inx}), with a = c/π and b = d/π.
    s[static_cast<std::size_t>(n)] = std::complex<double>(c, -d) / (2.0 * std::numbers::pi);
  }
  return from_spectrum(grid, s);
}

}  // namespace

Field gradient(const Functional& F, const Field& phi, const DerivativeConfig& cfg, int band_limit) {
  return synthesize(phi.grid(), band_limit, [&](const Field& e) {
    const Field d[] = {e};
    return gateaux(F, phi, d, cfg);
  });
}

Field second_gradient(const Functional& F, const Field& phi, const Field& w,
                      const DerivativeConfig& cfg, int band_limit) {
  return synthesize(phi.grid(), band_limit, [&](const Field& e) {
    const Field d[] = {e, w};
    return gateaux(F, phi, d, cfg);
  });
}

double kernel_probe2(const Functional& F, const Field& phi, const Field& psi, const Field& chi,
                     const DerivativeConfig& cfg) {
  const Field d[] = {psi, chi};
  return gateaux(F, phi, d, cfg);
}

KernelCoefficients extract_delta_coefficients(const Functional& F, const Field& phi, int k_max,
                                              const DerivativeConfig& cfg) {
  if (k_max < 0) throw PreconditionError("k_max must be non-negative");
  if (k_max > 6)
    throw PreconditionError("k_max above 6 makes the Vandermonde system ill-conditioned");
  const GridSpec& grid = phi.grid();
  if (static_cast<std::size_t>(k_max) > grid.derivative_guard())
    throw PreconditionError("k_max exceeds the aliasing guard");
  const std::size_t n = grid.size();
  const int k = k_max;
  const int cols = k + 1;
  const int rows = 2 * (2 * k + 1);

  // Rows ordered ξ = −k..k, real part then imaginary part.
  Eigen::MatrixXd m(rows, cols);
  for (int xi = -k; xi <= k; ++xi) {
    const int r = 2 * (xi + k);
    for (int j = 0; j < cols; ++j) {
      const std::complex<double> p = std::pow(std::complex<double>(0.0, xi), j);
      m(r, j) = j == 0 ? 1.0 : p.real();
      m(r + 1, j) = j == 0 ? 0.0 : p.imag();
    }
  }

  Eigen::MatrixXd rhs(rows, static_cast<Eigen::Index>(n));
  for (int xi = 0; xi <= k; ++xi) {
    const Field ac = second_gradient(F, phi, fourier_mode(grid, xi, false), cfg);
    const Field as = xi == 0 ? Field::zero(grid) : second_gradient(F, phi, fourier_mode(grid, xi, true), cfg);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = grid.node(i);
      const std::complex<double> b =
          std::complex<double>(ac[i], as[i]) * std::polar(1.0, -static_cast<double>(xi) * x);
      const auto col = static_cast<Eigen::Index>(i);
      rhs(2 * (xi + k), col) = b.real();
      rhs(2 * (xi + k) + 1, col) = b.imag();
      // A_{−ξ} is the conjugate probe.
      rhs(2 * (k - xi), col) = b.real();
      rhs(2 * (k - xi) + 1, col) = -b.imag();
    }
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(m);
  const Eigen::MatrixXd sol = qr.solve(rhs);
  const Eigen::MatrixXd res = m * sol - rhs;

  KernelCoefficients out;
  out.residual = res.colwise().norm().maxCoeff();
  for (int j = 0; j < cols; ++j) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = sol(j, static_cast<Eigen::Index>(i));
    out.coefficients.emplace_back(grid, std::move(v));
  }
  return out;
}

OrderEstimate estimate_order(const Functional& F, const Field& phi, std::span<const int> freqs,
                             const DerivativeConfig& cfg) {
  if (freqs.empty()) throw PreconditionError("estimate_order needs frequencies");
  const int nyq = static_cast<int>(phi.grid().nyquist());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (freqs[i] < 1 || freqs[i] >= nyq)
      throw PreconditionError("frequency " + std::to_string(freqs[i]) + " outside [1, N/2)");
    if (i > 0 && freqs[i] <= freqs[i - 1])
      throw PreconditionError("frequencies must be strictly ascending");
  }
  const double floor = std::max(1e-13, 1e-11 * (1.0 + std::abs(F(phi))));
  OrderEstimate out;
  std::vector<double> lx, ly;
  for (int w : freqs) {
    const Field c[] = {fourier_mode(phi.grid(), w, false)};
    const Field s[] = {fourier_mode(phi.grid(), w, true)};
    const double mag = std::hypot(gateaux(F, phi, c, cfg), gateaux(F, phi, s, cfg));
    out.frequencies.push_back(w);
    out.magnitudes.push_back(mag);
    if (mag > floor) {
      out.used.push_back(w);
      lx.push_back(std::log(static_cast<double>(w)));
      ly.push_back(std::log(mag));
    }
  }
  if (out.used.empty()) throw NumericalError("order undefined (zero derivative)");
  if (out.used.size() == 1) {
    out.slope = 0.0;
    return out;
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(lx.size());
  my /= static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.slope = sxy / sxx;
  return out;
}

void write_gradient_csv(std::ostream& out, const Field& gradient) {
  write_field_csv(out, gradient);
}

void write_kernel_coefficients_csv(std::ostream& out, const KernelCoefficients& k) {
  std::vector<std::string> header{"x"};
  for (std::size_t j = 0; j < k.coefficients.size(); ++j) header.push_back("p" + std::to_string(j));
  csv::write_row(out, header);
  if (k.coefficients.empty()) return;
  const GridSpec& grid = k.coefficients.front().grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<std::string> row{csv::format(grid.node(i))};
    for (const Field& f : k.coefficients) row.push_back(csv::format(f[i]));
    csv::write_row(out, row);
  }
}

}  // namespace jetcalc
