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

#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "jetcalc/csv.hpp"
#include "jetcalc/derivative.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/functional.hpp"
#include "jetcalc/identities.hpp"
#include "jetcalc/locality.hpp"
#include "jetcalc/peetre.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc::cli {

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"derivative", 1e-6},      {"additivity", 1e-9},      {"diagonal", 1e-6},
      {"tail", 1e-8},            {"lipschitz", 1e6},        {"vanishing_kernel", 1e-8},
      {"ftc", 1e-7},             {"poincare_first", 1e-8},  {"poincare_second", 1e-7},
      {"el_gradient", 1e-5},     {"exactness", 1e-8},       {"plateau", 1e-12},
      {"peetre_factor", 3.0},    {"determination", 1e-7},   {"partial", 1e-9},
      {"hammerstein", 0.1},      {"value", 1e-8},
  };
  return t;
}

double RunConfig::tol(const std::string& name) const {
  if (auto it = tolerances.find(name); it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  try {
    return csv::parse_double(v);
  } catch (const ParseError&) {
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
  }
}

long long to_integer(std::string_view key, std::string_view v) {
  try {
    return csv::parse_integer(v);
  } catch (const ParseError&) {
    throw ConfigError(std::string(key) + ": not an integer: '" + std::string(v) + "'");
  }
}

std::size_t to_grid(std::string_view key, std::string_view v) {
  const long long n = to_integer(key, v);
  if (n < 16 || (n & (n - 1)) != 0)
    throw ConfigError(std::string(key) + ": grid size must be a power of two ≥ 16");
  return static_cast<std::size_t>(n);
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "grid") {
    cfg.grid = to_grid(key, value);
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "suite") {
    std::vector<std::string> names;
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto pos = std::min(value.find(',', start), value.size());
      const auto name = trim(value.substr(start, pos - start));
      if (!name.empty()) names.emplace_back(name);
      start = pos + 1;
    }
    cfg.suite = std::move(names);
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "trials") {
    const long long t = to_integer(key, value);
    if (t < 1) throw ConfigError("trials must be positive");
    cfg.trials = static_cast<int>(t);
  } else if (key == "power") {
    const long long p = to_integer(key, value);
    if (p < 1 || p > 16) throw ConfigError("power must lie in [1, 16]");
    cfg.power = static_cast<int>(p);
  } else if (key == "peetre_grid") {
    cfg.peetre_grid = to_grid(key, value);
  } else if (key == "lambda_min") {
    cfg.lambda_min = to_double(key, value);
  } else if (key.starts_with("tol.")) {
    const std::string name(key.substr(4));
    if (!default_tolerances().contains(name)) throw ConfigError("unknown tolerance '" + name + "'");
    const double v = to_double(key, value);
    if (!(v > 0.0)) throw ConfigError("tolerance " + name + " must be positive");
    cfg.tolerances[name] = v;
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void load_config(RunConfig& cfg, std::istream& in, const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  load_config(cfg, in, path.string());
}

std::size_t default_grid(std::string_view command) {
  if (command == "locality" || command == "identities") return 512;
  return 256;
}

namespace {

std::ofstream open_csv(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  std::ofstream out(cfg.out / name);
  if (!out) throw ConfigError("cannot write " + (cfg.out / name).string());
  return out;
}

GridSpec grid_for(const RunConfig& cfg, std::string_view command) {
  return GridSpec(cfg.grid.value_or(default_grid(command)));
}

int trials_or(const RunConfig& cfg, int fallback) { return cfg.trials > 0 ? cfg.trials : fallback; }

std::vector<Functional> select(const RunConfig& cfg, std::vector<Functional> all) {
  if (!cfg.suite) return all;
  if (cfg.suite->empty()) throw ConfigError("empty suite selection");
  std::vector<Functional> out;
  for (const std::string& name : *cfg.suite) {
    auto it = std::find_if(all.begin(), all.end(), [&](const Functional& f) { return f.name() == name; });
    if (it == all.end()) throw ConfigError("unknown functional '" + name + "' in suite");
    out.push_back(*it);
  }
  return out;
}

std::uint64_t draw_seed(Rng& rng) { return static_cast<std::uint64_t>(rng.integer(1, 1LL << 40)); }

const char* pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

int cmd_derivatives(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid = grid_for(cfg, "derivatives");
  const auto fs = select(cfg, zoo(grid));
  const int trials = trials_or(cfg, 20);
  const double tol = cfg.tol("derivative");
  std::ofstream csv_out = open_csv(cfg, "derivatives.csv");
  csv::write_row(csv_out, {"functional", "order", "trial", "analytic", "numeric", "error_estimate",
                           "relative_error", "pass"});
  bool ok = true;
  for (const Functional& F : fs) {
    Rng rng(cfg.seed);
    const int orders = std::min(3, F.analytic_order());
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
      const Field phi = 0.5 * random_field(grid, draw_seed(rng), 8, 0.7);
      std::vector<Field> dirs;
      for (int i = 0; i < 3; ++i) dirs.push_back(random_field(grid, draw_seed(rng), 8, 0.7));
      for (int k = 1; k <= orders; ++k) {
        const std::span<const Field> d(dirs.data(), static_cast<std::size_t>(k));
        const double ana = F.analytic_derivative(phi, d);
        const DerivativeEstimate est = gateaux_estimate(F, phi, d);
        const double scale = std::max(std::abs(ana), 1e-2 * (1.0 + std::abs(F(phi))));
        const double rel = std::abs(est.value - ana) / scale;
        worst = std::max(worst, rel);
        ok = ok && rel <= tol;
        csv::write_row(csv_out, {F.name(), std::to_string(k), std::to_string(t), csv::format(ana),
                                 csv::format(est.value), csv::format(est.error), csv::format(rel),
                                 rel <= tol ? "1" : "0"});
      }
    }
    log << F.name() << ": orders 1.." << orders << ", worst relative error " << worst << " ["
        << pass_fail(worst <= tol) << "]\n";
  }
  return ok ? kExitOk : kExitScientific;
}

std::size_t locality_grid(std::string_view functional) { return functional == "U" ? 1024 : 512; }

std::string expected_locality(std::string_view functional) {
  return functional == "G" || functional == "J" || functional == "Fnl" ? "nonlocal" : "local";
}

int cmd_locality(const RunConfig& cfg, std::ostream& log) {
  std::vector<std::string> names;
  {
    std::vector<Functional> all = zoo(GridSpec(16));
    all.push_back(make_counterexample(cfg.power));
    for (const Functional& F : select(cfg, all)) names.push_back(F.name());
  }
  LocalityConfig lc;
  lc.trials = trials_or(cfg, 10);
  lc.additivity_tol = cfg.tol("additivity");
  lc.diagonal_tol = cfg.tol("diagonal");
  lc.tail_tol = cfg.tol("tail");
  lc.lipschitz_bound = cfg.tol("lipschitz");
  lc.vanishing_kernel_tol = cfg.tol("vanishing_kernel");

  std::ofstream summary = open_csv(cfg, "locality.csv");
  std::ofstream trials = open_csv(cfg, "locality_trials.csv");
  csv::write_row(summary, {"functional", "grid", "expected", "verdict", "worst_ratio", "failing", "match"});
  bool ok = true, header = true;
  for (const std::string& name : names) {
    const GridSpec grid(cfg.grid.value_or(locality_grid(name)));
    const Functional F = name == "Fnl" ? make_counterexample(cfg.power) : zoo_member(grid, name);
    const ProbeReport r = locality_verdict(F, default_locality_samples(grid, cfg.seed), cfg.seed, lc);
    const std::string got(locality_label(r.verdict));
    const std::string want = expected_locality(name);
    const bool match = got == want;
    ok = ok && match;
    std::string failing = r.note;
    std::replace(failing.begin(), failing.end(), ',', ';');
    csv::write_row(summary, {name, std::to_string(grid.size()), want, got, csv::format(r.worst_ratio()),
                             failing, match ? "1" : "0"});
    for (const ProbeReport& sub : r.sub_reports) {
      write_probe_csv(trials, sub, header);
      header = false;
    }
    log << name << " (N = " << grid.size() << "): " << got << " (expected " << want << ")"
        << (r.note.empty() ? "" : "; " + r.note) << " [" << pass_fail(match) << "]\n";
  }
  return ok ? kExitOk : kExitScientific;
}

int cmd_identities(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid = grid_for(cfg, "identities");
  std::vector<IdentityRecord> records;
  bool ok = true;
  const auto add = [&](std::string identity, std::string functional, std::uint64_t seed,
                       double residual, const std::string& tol_name) {
    const double tol = cfg.tol(tol_name);
    ok = ok && residual <= tol;
    log << identity << " " << functional << ": residual " << residual << " (tolerance " << tol
        << ") [" << pass_fail(residual <= tol) << "]\n";
    records.push_back({std::move(identity), std::move(functional), seed, residual, tol});
  };

  const int n_psi = trials_or(cfg, 20);
  const auto psis = random_samples(grid, cfg.seed, n_psi, 0.25);
  const auto pairs = random_samples(grid, cfg.seed + 1, 2 * n_psi, 0.25);
  const auto phis = random_samples(grid, cfg.seed + 2, 3, 0.25);
  for (const auto& [name, f] : builtin_lagrangians(grid)) {
    add("poincare_first", name, cfg.seed, check_poincare_first(f, psis), "poincare_first");
    double second = 0.0;
    for (std::size_t i = 0; i + 1 < pairs.size(); i += 2)
      second = std::max(second, check_poincare_second(f, pairs[i], pairs[i + 1], 16));
    add("poincare_second", name, cfg.seed + 1, second, "poincare_second");
    add("el_gradient", name, cfg.seed + 2, check_el_gradient(f, phis), "el_gradient");
  }

  const auto fs = select(cfg, zoo(grid));
  const auto paths = random_samples(grid, cfg.seed + 3, 10, 0.25);
  for (const Functional& F : fs) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < paths.size(); i += 2)
      worst = std::max(worst, check_ftc(F, paths[i], paths[i + 1], 16));
    add("ftc", F.name(), cfg.seed + 3, worst, "ftc");
  }

  const auto w = standard_weights(grid);
  RandomExprOptions opts;
  opts.max_order = 2;
  opts.coefficients = {{"f", w.f}, {"g", w.g}, {"h", w.h}};
  Rng rng(cfg.seed + 4);
  const auto ex_psis = random_samples(grid, cfg.seed + 5, 3, 0.25);
  double exact = 0.0;
  for (int i = 0; i < 30; ++i) exact = std::max(exact, check_exactness(random_jet_expr(rng, opts), ex_psis));
  add("exactness", "random_total_derivatives", cfg.seed + 4, exact, "exactness");

  std::ofstream out = open_csv(cfg, "identities.csv");
  write_identity_csv(out, records);
  return ok ? kExitOk : kExitScientific;
}

int cmd_peetre(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid(cfg.peetre_grid);
  std::vector<double> lambdas;
  for (double l = 0.25; l >= cfg.lambda_min * (1 - 1e-12); l *= 0.5) lambdas.push_back(l);
  if (lambdas.empty()) throw ConfigError("lambda_min must not exceed 1/4");
  for (double l : lambdas)
    if (l < 16.0 * grid.spacing())
      throw PreconditionError("lambda " + csv::format(l) + " is below the resolvability limit " +
                              csv::format(16.0 * grid.spacing()) + " of the Peetre grid");
  bool ok = true;
  const std::size_t n = grid.size();
  const std::vector<PointSet> sets{PointSet({grid.node(0)}, grid),
                                   PointSet({grid.node(n / 8), grid.node(n / 2 - n / 16)}, grid),
                                   PointSet({grid.node(0), grid.node(n / 3), grid.node(2 * n / 3)}, grid)};

  const double plateau_tol = cfg.tol("plateau");
  double plateau = 0.0;
  for (const PointSet& X : sets)
    for (double lambda : {0.25, 0.125, 0.0625}) {
      if (lambda < 16.0 * grid.spacing()) continue;
      const Field chi = mollifier(X, lambda);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = X.distance(grid.node(i));
        if (d <= lambda / 8) plateau = std::max(plateau, std::abs(chi[i] - 1.0));
        if (d >= lambda) plateau = std::max(plateau, std::abs(chi[i]));
      }
    }
  ok = ok && plateau <= plateau_tol;
  log << "mollifier plateau/support deviation " << plateau << " [" << pass_fail(plateau <= plateau_tol)
      << "]\n";

  const double factor = cfg.tol("peetre_factor");
  std::vector<PeetreTable> tables;
  for (const PointSet& X : sets)
    for (int m = 0; m <= 2; ++m) {
      std::vector<Field> trials;
      for (std::uint64_t s = 0; s < 3; ++s) trials.push_back(vanishing_trial_function(X, m + 1, cfg.seed + s));
      tables.push_back(check_peetre_estimate(X, m, lambdas, trials));
      const PeetreTable& t = tables.back();
      ok = ok && t.bounded(factor);
      log << "|X| = " << X.size() << ", m = " << m << ": max ratio " << t.max_ratio
          << ", largest-lambda ratio " << t.reference_ratio << " [" << pass_fail(t.bounded(factor)) << "]\n";
    }
  std::ofstream pout = open_csv(cfg, "peetre.csv");
  write_peetre_csv(pout, tables);

  const GridSpec small(cfg.grid.value_or(512));
  const PointSet X({small.node(small.size() / 16), small.node(small.size() / 2 + 7)}, small);
  const auto w = standard_weights(small);
  const JetExpr u0 = JetExpr::variable(0), u1 = JetExpr::variable(1);
  const JetExpr L41 = JetExpr::coefficient("h", w.h) * pow(u0, 4) + JetExpr::coefficient("g", w.g) * pow(u1, 2);
  const std::vector<int> cand{0, 1, 2, 3, 4};
  const double dtol = cfg.tol("determination");
  struct Case {
    std::string name;
    FieldMap map;
    std::optional<int> expected;
  };
  const std::vector<Case> cases{{"square", density_map(pow(u0, 2)), 0},
                                {"el_L41", density_map(euler_lagrange(L41).expr), 2},
                                {"integral", integral_map(), std::nullopt}};
  std::ofstream dout = open_csv(cfg, "determination.csv");
  csv::write_row(dout, {"map", "order", "determines", "max_difference", "witness_point"});
  for (const Case& c : cases) {
    const JetDetermination d = test_jet_determination(c.map, cand, X, cfg.seed, 5, dtol);
    const bool match = d.order == c.expected;
    ok = ok && match;
    for (const DeterminationStep& s : d.steps)
      csv::write_row(dout, {c.name, std::to_string(s.order), s.determines ? "1" : "0",
                            csv::format(s.max_difference), csv::format(s.witness_point)});
    log << c.name << ": " << d.describe() << " [" << pass_fail(match) << "]\n";
  }
  return ok ? kExitOk : kExitScientific;
}

int cmd_counterexample(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid = grid_for(cfg, "counterexample");
  const Functional Fnl = make_counterexample(cfg.power);
  LocalityConfig lc;
  lc.additivity_tol = cfg.tol("partial");
  const ProbeReport partial = test_partial_additivity(Fnl, grid, trials_or(cfg, 50), cfg.seed, lc);
  const ProbeReport witness = counterexample_witness(grid, cfg.power);
  const double value = Fnl(Field::constant(grid, 1.0));
  const double expect = std::pow(2.0 * std::numbers::pi, cfg.power);
  const double rel = std::abs(value - expect) / expect;

  const bool partial_ok = partial.verdict == Verdict::pass;
  const bool witness_ok = witness.worst_ratio() >= cfg.tol("hammerstein");
  const bool value_ok = rel <= cfg.tol("value");
  log << summarize(partial) << " [" << pass_fail(partial_ok) << "]\n";
  log << summarize(witness) << " [" << pass_fail(witness_ok) << ": failure expected]\n";
  if (witness.witness.size() == 3) {
    const Field& p2 = witness.witness[1];
    log << "witness: phi2 = " << csv::format(p2[0]) << " (constant), |phi1|_inf = "
        << csv::format(witness.witness[0].max_abs()) << ", |phi3|_inf = "
        << csv::format(witness.witness[2].max_abs()) << "\n";
  }
  log << "F_nl(1) = " << csv::format(value) << ", (2 pi)^" << cfg.power << " = " << csv::format(expect)
      << ", relative error " << rel << " [" << pass_fail(value_ok) << "]\n";

  std::ofstream out = open_csv(cfg, "counterexample.csv");
  write_probe_csv(out, partial, true);
  write_probe_csv(out, witness, false);
  return partial_ok && witness_ok && value_ok ? kExitOk : kExitScientific;
}

int cmd_zoo(const RunConfig& cfg, std::ostream& log) {
  const GridSpec grid = grid_for(cfg, "zoo");
  std::vector<Functional> all = zoo(grid);
  all.push_back(make_counterexample(cfg.power));
  const Field phi = 0.5 * random_field(grid, cfg.seed, 8, 0.7);
  std::ofstream out = open_csv(cfg, "zoo.csv");
  csv::write_row(out, {"functional", "kind", "jet_order", "analytic_order", "value"});
  for (const Functional& F : select(cfg, all)) {
    const double v = F(phi);
    csv::write_row(out, {F.name(), std::string(to_string(F.kind())), std::to_string(F.jet_order()),
                         std::to_string(F.analytic_order()), csv::format(v)});
    log << F.name() << " (" << to_string(F.kind()) << "): F(phi) = " << csv::format(v) << "\n";
  }
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"jetcalc: verification suites for functionals on periodic fields"};
  app.require_subcommand(1);
  std::optional<std::string> config_file;
  std::vector<std::pair<std::string, std::string>> flags;
  std::vector<std::string> tols;
  const auto flag = [&](CLI::App* sub, const std::string& name, const std::string& key,
                        const std::string& help) {
    sub->add_option_function<std::string>(
        "--" + name, [&flags, key](const std::string& v) { flags.emplace_back(key, v); }, help);
  };
  using Command = int (*)(const RunConfig&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"derivatives", "analytic vs finite-difference derivatives of the zoo", cmd_derivatives},
      {"locality", "locality verdicts over the zoo and the counterexample", cmd_locality},
      {"identities", "FTC, Poincare identities, EL gradients and exactness", cmd_identities},
      {"peetre", "mollifier estimate and jet determination", cmd_peetre},
      {"counterexample", "partially additive but not local functional", cmd_counterexample},
      {"zoo", "list the built-in functionals", cmd_zoo},
  };
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    flag(sub, "grid", "grid", "grid size N (power of two)");
    flag(sub, "seed", "seed", "base seed");
    flag(sub, "suite", "suite", "comma-separated functional names");
    flag(sub, "out", "out", "output directory for CSV files");
    flag(sub, "trials", "trials", "trials per check");
    flag(sub, "power", "power", "exponent of the counterexample");
    flag(sub, "peetre-grid", "peetre_grid", "grid size for mollifier checks");
    flag(sub, "lambda-min", "lambda_min", "smallest lambda of the Peetre grid");
    sub->add_option("--tol", tols, "tolerance override NAME=VALUE");
    sub->add_option("--config", config_file, "key=value configuration file");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitConfig;
  }
  try {
    RunConfig cfg;
    if (config_file) load_config_file(cfg, *config_file);
    for (const auto& [k, v] : flags) apply_setting(cfg, k, v);
    for (const std::string& t : tols) {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("--tol expects NAME=VALUE, got '" + t + "'");
      apply_setting(cfg, "tol." + t.substr(0, eq), t.substr(eq + 1));
    }
    for (const auto& [name, help, fn] : commands)
      if (app.got_subcommand(name)) return fn(cfg, out);
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitScientific;
  }
}

}  // namespace jetcalc::cli
