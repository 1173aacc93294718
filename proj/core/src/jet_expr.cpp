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

#include "jetcalc/jet_expr.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "jetcalc/csv.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/rng.hpp"

namespace jetcalc {
namespace detail {

// Lazily differentiated coefficient field shared by every node that refers
// to the same named field.
struct CoefficientFamily {
  CoefficientFamily(std::string n, Field b) : name(std::move(n)), base(std::move(b)) {}

  std::shared_ptr<const Field> derivative(int order) const {
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[order];
    if (!slot) slot = std::make_shared<const Field>(spectral_derivative(base, order));
    return slot;
  }

  std::string name;
  Field base;
  mutable std::mutex mutex;
  mutable std::map<int, std::shared_ptr<const Field>> cache;
};

struct ExprNode {
  JetExpr::Kind kind = JetExpr::Kind::constant;
  double value = 0.0;
  int index = 0;
  JetExpr::Func func = JetExpr::Func::sin;
  std::shared_ptr<const CoefficientFamily> family;
  std::shared_ptr<const Field> field;
  std::vector<JetExpr> children;

  int max_order = -1;
  std::uint64_t var_mask = 0;  // bit j: u_j present; bit 63 also covers j > 63
  bool has_x = false;
  std::optional<GridSpec> grid;
  std::uint64_t hash = 0;
  std::size_t count = 1;
};

struct ExprAccess {
  static JetExpr wrap(std::shared_ptr<const ExprNode> n) { return JetExpr(std::move(n)); }
};

}  // namespace detail

namespace {

using detail::CoefficientFamily;
using detail::ExprNode;
using Kind = JetExpr::Kind;
using Func = JetExpr::Func;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  std::uint64_t z = h ^ (v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t hash_string(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001B3ULL;
  return h;
}

std::uint64_t mask_bit(int j) { return 1ULL << std::min(j, 63); }

JetExpr finalize(ExprNode n) {
  std::uint64_t h = mix(0, static_cast<std::uint64_t>(n.kind));
  switch (n.kind) {
    case Kind::constant:
      h = mix(h, std::bit_cast<std::uint64_t>(n.value));
      break;
    case Kind::coordinate:
      n.has_x = true;
      break;
    case Kind::variable:
      n.max_order = n.index;
      n.var_mask = mask_bit(n.index);
      h = mix(h, static_cast<std::uint64_t>(n.index));
      break;
    case Kind::coefficient:
      n.grid = n.family->base.grid();
      h = mix(mix(h, hash_string(n.family->name)), static_cast<std::uint64_t>(n.index));
      break;
    case Kind::power:
      h = mix(h, static_cast<std::uint64_t>(n.index));
      break;
    case Kind::function:
      h = mix(h, static_cast<std::uint64_t>(n.func));
      break;
    default:
      break;
  }
  for (const JetExpr& c : n.children) {
    const ExprNode& cn = *c.node();
    n.max_order = std::max(n.max_order, cn.max_order);
    n.var_mask |= cn.var_mask;
    n.has_x = n.has_x || cn.has_x;
    if (cn.grid) {
      if (n.grid && !(*n.grid == *cn.grid))
        throw PreconditionError("expression mixes coefficient fields from different grids");
      n.grid = cn.grid;
    }
    n.count += cn.count;
    h = mix(h, cn.hash);
  }
  n.hash = h;
  return detail::ExprAccess::wrap(std::make_shared<const ExprNode>(std::move(n)));
}

JetExpr make_leaf(Kind kind, double value = 0.0, int index = 0) {
  ExprNode n;
  n.kind = kind;
  n.value = value;
  n.index = index;
  return finalize(std::move(n));
}

JetExpr make_coefficient(std::shared_ptr<const CoefficientFamily> family, int order) {
  ExprNode n;
  n.kind = Kind::coefficient;
  n.index = order;
  n.field = family->derivative(order);
  n.family = std::move(family);
  return finalize(std::move(n));
}

JetExpr make_composite(Kind kind, std::vector<JetExpr> children, int index = 0,
                       Func func = Func::sin) {
  ExprNode n;
  n.kind = kind;
  n.index = index;
  n.func = func;
  n.children = std::move(children);
  return finalize(std::move(n));
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  // 'x' and 'u<digits>' are reserved for the jet coordinates.
  if (s == "x") return false;
  if (s.size() > 1 && s[0] == 'u' &&
      std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return false;
  return true;
}

double apply(Func f, double v) {
  switch (f) {
    case Func::sin: return std::sin(v);
    case Func::cos: return std::cos(v);
    default: return std::exp(v);
  }
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    default: return "exp";
  }
}

void sort_canonical(std::vector<JetExpr>& v) {
  std::stable_sort(v.begin(), v.end(),
                   [](const JetExpr& a, const JetExpr& b) { return a.hash() < b.hash(); });
}

// Lookup table of expressions keyed by structure.
template <class Value>
class StructuralMap {
 public:
  Value* find(const JetExpr& key) {
    auto [lo, hi] = index_.equal_range(key.hash());
    for (auto it = lo; it != hi; ++it)
      if (entries_[it->second].first == key) return &entries_[it->second].second;
    return nullptr;
  }
  void insert(const JetExpr& key, Value v) {
    index_.emplace(key.hash(), entries_.size());
    entries_.emplace_back(key, std::move(v));
  }
  std::vector<std::pair<JetExpr, Value>>& entries() { return entries_; }

 private:
  std::unordered_multimap<std::uint64_t, std::size_t> index_;
  std::vector<std::pair<JetExpr, Value>> entries_;
};

JetExpr make_product(std::vector<JetExpr> factors);
JetExpr make_sum(std::vector<JetExpr> terms);

JetExpr make_power(const JetExpr& base, int exponent) {
  if (exponent < 0) throw PreconditionError("only non-negative integer powers are supported");
  if (exponent == 0) return JetExpr::constant(1.0);
  if (exponent == 1) return base;
  switch (base.kind()) {
    case Kind::constant:
      return JetExpr::constant(std::pow(base.value(), exponent));
    case Kind::power:
      return make_power(base.children()[0], base.index() * exponent);
    case Kind::product: {
      std::vector<JetExpr> fs;
      for (const JetExpr& f : base.children()) fs.push_back(make_power(f, exponent));
      return make_product(std::move(fs));
    }
    default:
      return make_composite(Kind::power, {base}, exponent);
  }
}

JetExpr make_product(std::vector<JetExpr> factors) {
  std::vector<JetExpr> flat;
  for (JetExpr& f : factors) {
    if (f.kind() == Kind::product)
      flat.insert(flat.end(), f.children().begin(), f.children().end());
    else
      flat.push_back(std::move(f));
  }
  double coeff = 1.0;
  StructuralMap<int> groups;
  for (const JetExpr& f : flat) {
    if (f.kind() == Kind::constant) {
      coeff *= f.value();
      continue;
    }
    const bool is_pow = f.kind() == Kind::power;
    const JetExpr& b = is_pow ? f.children()[0] : f;
    const int e = is_pow ? f.index() : 1;
    if (int* slot = groups.find(b))
      *slot += e;
    else
      groups.insert(b, e);
  }
  if (coeff == 0.0) return JetExpr::constant(0.0);
  std::vector<JetExpr> out;
  for (auto& [b, e] : groups.entries()) {
    if (e == 0) continue;
    JetExpr p = make_power(b, e);
    if (p.kind() == Kind::constant)
      coeff *= p.value();
    else
      out.push_back(std::move(p));
  }
  sort_canonical(out);
  if (out.empty()) return JetExpr::constant(coeff);
  if (coeff != 1.0 && out.size() == 1 && out.front().kind() == Kind::sum) {
    // Distribute a numeric factor over a lone sum so like terms can meet.
    std::vector<JetExpr> terms;
    for (const JetExpr& t : out.front().children())
      terms.push_back(make_product({JetExpr::constant(coeff), t}));
    return make_sum(std::move(terms));
  }
  if (coeff != 1.0) out.insert(out.begin(), JetExpr::constant(coeff));
  if (out.size() == 1) return out.front();
  return make_composite(Kind::product, std::move(out));
}

// Splits c·rest where c is a leading numeric factor.
std::pair<double, JetExpr> split_coefficient(const JetExpr& t) {
  if (t.kind() == Kind::product && t.children()[0].kind() == Kind::constant) {
    const auto ch = t.children();
    if (ch.size() == 2) return {ch[0].value(), ch[1]};
    return {ch[0].value(), make_composite(Kind::product, {ch.begin() + 1, ch.end()})};
  }
  return {1.0, t};
}

JetExpr make_sum(std::vector<JetExpr> terms) {
  std::vector<JetExpr> flat;
  for (JetExpr& t : terms) {
    if (t.kind() == Kind::sum)
      flat.insert(flat.end(), t.children().begin(), t.children().end());
    else
      flat.push_back(std::move(t));
  }
  double constant = 0.0;
  StructuralMap<double> groups;
  for (const JetExpr& t : flat) {
    if (t.kind() == Kind::constant) {
      constant += t.value();
      continue;
    }
    auto [c, rest] = split_coefficient(t);
    if (double* slot = groups.find(rest))
      *slot += c;
    else
      groups.insert(rest, c);
  }
  std::vector<JetExpr> out;
  for (auto& [rest, c] : groups.entries()) {
    if (c == 0.0) continue;
    out.push_back(c == 1.0 ? rest : make_product({JetExpr::constant(c), rest}));
  }
  sort_canonical(out);
  if (constant != 0.0) out.insert(out.begin(), JetExpr::constant(constant));
  if (out.empty()) return JetExpr::constant(0.0);
  if (out.size() == 1) return out.front();
  return make_composite(Kind::sum, std::move(out));
}

JetExpr make_function(Func f, const JetExpr& arg) {
  if (arg.kind() == Kind::constant) return JetExpr::constant(apply(f, arg.value()));
  return make_composite(Kind::function, {arg}, 0, f);
}

}  // namespace

// ---------------------------------------------------------------------------
// JetExpr

JetExpr::JetExpr() : JetExpr(constant(0.0)) {}

JetExpr JetExpr::constant(double value) {
  if (!std::isfinite(value)) throw PreconditionError("expression constant is not finite");
  return make_leaf(Kind::constant, value == 0.0 ? 0.0 : value);
}

JetExpr JetExpr::coordinate() { return make_leaf(Kind::coordinate); }

JetExpr JetExpr::variable(int order) {
  if (order < 0) throw PreconditionError("jet variable order must be non-negative");
  return make_leaf(Kind::variable, 0.0, order);
}

JetExpr JetExpr::coefficient(std::string name, const Field& field) {
  return raw_coefficient(std::move(name), field, 0);
}

JetExpr JetExpr::raw_coefficient(std::string name, const Field& base, int derivative_order) {
  if (!is_identifier(name))
    throw PreconditionError("coefficient name '" + name + "' is not a free identifier");
  if (derivative_order < 0) throw PreconditionError("derivative order must be non-negative");
  return make_coefficient(std::make_shared<const CoefficientFamily>(std::move(name), base),
                          derivative_order);
}

JetExpr JetExpr::raw_sum(std::vector<JetExpr> terms) {
  if (terms.empty()) throw PreconditionError("sum needs at least one term");
  return make_composite(Kind::sum, std::move(terms));
}

JetExpr JetExpr::raw_product(std::vector<JetExpr> factors) {
  if (factors.empty()) throw PreconditionError("product needs at least one factor");
  return make_composite(Kind::product, std::move(factors));
}

JetExpr JetExpr::raw_power(JetExpr base, int exponent) {
  if (exponent < 0) throw PreconditionError("only non-negative integer powers are supported");
  return make_composite(Kind::power, {std::move(base)}, exponent);
}

JetExpr JetExpr::raw_function(Func f, JetExpr argument) {
  return make_composite(Kind::function, {std::move(argument)}, 0, f);
}

Kind JetExpr::kind() const { return node_->kind; }
double JetExpr::value() const { return node_->value; }
int JetExpr::index() const { return node_->index; }
Func JetExpr::func() const { return node_->func; }

const std::string& JetExpr::name() const {
  static const std::string empty;
  return node_->family ? node_->family->name : empty;
}

const Field& JetExpr::coefficient_field() const {
  if (!node_->field) throw PreconditionError("not a coefficient node");
  return *node_->field;
}

const Field& JetExpr::coefficient_base() const {
  if (!node_->family) throw PreconditionError("not a coefficient node");
  return node_->family->base;
}

std::span<const JetExpr> JetExpr::children() const { return node_->children; }
int JetExpr::max_jet_order() const { return node_->max_order; }

bool JetExpr::depends_on(int j) const {
  if (j < 0) return false;
  return (node_->var_mask & mask_bit(j)) != 0;
}

bool JetExpr::depends_on_coordinate() const { return node_->has_x; }
bool JetExpr::is_zero() const { return kind() == Kind::constant && value() == 0.0; }
const std::optional<GridSpec>& JetExpr::grid() const { return node_->grid; }
std::uint64_t JetExpr::hash() const { return node_->hash; }
std::size_t JetExpr::node_count() const { return node_->count; }

bool operator==(const JetExpr& a, const JetExpr& b) {
  const ExprNode* x = a.node();
  const ExprNode* y = b.node();
  if (x == y) return true;
  if (x->hash != y->hash || x->kind != y->kind || x->index != y->index ||
      x->children.size() != y->children.size())
    return false;
  switch (x->kind) {
    case Kind::constant:
      if (x->value != y->value) return false;
      break;
    case Kind::coefficient:
      if (x->family->name != y->family->name) return false;
      break;
    case Kind::function:
      if (x->func != y->func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < x->children.size(); ++i)
    if (!(x->children[i] == y->children[i])) return false;
  return true;
}

namespace {

void print(const JetExpr& e, std::string& out) {
  switch (e.kind()) {
    case Kind::constant:
      out += csv::format(e.value());
      return;
    case Kind::coordinate:
      out += 'x';
      return;
    case Kind::variable:
      out += 'u';
      out += std::to_string(e.index());
      return;
    case Kind::coefficient:
      out += "(coef " + e.name() + ' ' + std::to_string(e.index()) + ')';
      return;
    case Kind::power:
      out += "(^ ";
      print(e.children()[0], out);
      out += ' ' + std::to_string(e.index()) + ')';
      return;
    case Kind::function:
      out += '(';
      out += func_name(e.func());
      out += ' ';
      print(e.children()[0], out);
      out += ')';
      return;
    case Kind::sum:
    case Kind::product:
      out += e.kind() == Kind::sum ? "(+" : "(*";
      for (const JetExpr& c : e.children()) {
        out += ' ';
        print(c, out);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::string JetExpr::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Builders

JetExpr sum(std::vector<JetExpr> terms) { return make_sum(std::move(terms)); }
JetExpr product(std::vector<JetExpr> factors) { return make_product(std::move(factors)); }
JetExpr pow(const JetExpr& base, int exponent) { return make_power(base, exponent); }
JetExpr sin(const JetExpr& a) { return make_function(Func::sin, a); }
JetExpr cos(const JetExpr& a) { return make_function(Func::cos, a); }
JetExpr exp(const JetExpr& a) { return make_function(Func::exp, a); }

JetExpr operator+(const JetExpr& a, const JetExpr& b) { return make_sum({a, b}); }
JetExpr operator-(const JetExpr& a, const JetExpr& b) { return make_sum({a, -b}); }
JetExpr operator*(const JetExpr& a, const JetExpr& b) { return make_product({a, b}); }
JetExpr operator-(const JetExpr& a) { return make_product({JetExpr::constant(-1.0), a}); }
JetExpr operator*(double c, const JetExpr& a) { return make_product({JetExpr::constant(c), a}); }
JetExpr operator+(double c, const JetExpr& a) { return make_sum({JetExpr::constant(c), a}); }

// ---------------------------------------------------------------------------
// Differentiation

namespace {

using Memo = std::unordered_map<const ExprNode*, JetExpr>;

// Chain and product rules shared by the three derivations; `leaf` handles
// constants, coordinate, variables and coefficients.
template <class Leaf>
JetExpr differentiate(const JetExpr& e, Memo& memo, const Leaf& leaf) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  JetExpr result;
  const auto ch = e.children();
  switch (e.kind()) {
    case Kind::sum: {
      std::vector<JetExpr> terms;
      for (const JetExpr& c : ch) terms.push_back(differentiate(c, memo, leaf));
      result = make_sum(std::move(terms));
      break;
    }
    case Kind::product: {
      std::vector<JetExpr> terms;
      for (std::size_t i = 0; i < ch.size(); ++i) {
        JetExpr d = differentiate(ch[i], memo, leaf);
        if (d.is_zero()) continue;
        std::vector<JetExpr> fs;
        for (std::size_t k = 0; k < ch.size(); ++k) fs.push_back(k == i ? d : ch[k]);
        terms.push_back(make_product(std::move(fs)));
      }
      result = make_sum(std::move(terms));
      break;
    }
    case Kind::power: {
      const JetExpr& b = ch[0];
      JetExpr d = differentiate(b, memo, leaf);
      result = d.is_zero() ? JetExpr()
                           : make_product({JetExpr::constant(e.index()),
                                           make_power(b, e.index() - 1), d});
      break;
    }
    case Kind::function: {
      const JetExpr& a = ch[0];
      JetExpr d = differentiate(a, memo, leaf);
      if (d.is_zero()) break;
      switch (e.func()) {
        case Func::sin: result = make_product({make_function(Func::cos, a), d}); break;
        case Func::cos:
          result = make_product({JetExpr::constant(-1.0), make_function(Func::sin, a), d});
          break;
        case Func::exp: result = make_product({e, d}); break;
      }
      break;
    }
    default:
      result = leaf(e);
      break;
  }
  memo.emplace(e.node(), result);
  return result;
}

JetExpr coefficient_derivative(const JetExpr& e) {
  return make_coefficient(e.node()->family, e.index() + 1);
}

}  // namespace

JetExpr vertical_derivative(const JetExpr& f, int j) {
  if (j < 0) throw PreconditionError("jet variable order must be non-negative");
  Memo memo;
  auto leaf = [j](const JetExpr& e) {
    return (e.kind() == Kind::variable && e.index() == j) ? JetExpr::constant(1.0) : JetExpr();
  };
  if (!f.depends_on(j)) return JetExpr();
  return differentiate(f, memo, leaf);
}

JetExpr explicit_x_derivative(const JetExpr& f) {
  Memo memo;
  return differentiate(f, memo, [](const JetExpr& e) {
    switch (e.kind()) {
      case Kind::coordinate: return JetExpr::constant(1.0);
      case Kind::coefficient: return coefficient_derivative(e);
      default: return JetExpr();
    }
  });
}

JetExpr total_derivative(const JetExpr& f) {
  Memo memo;
  return differentiate(f, memo, [](const JetExpr& e) {
    switch (e.kind()) {
      case Kind::coordinate: return JetExpr::constant(1.0);
      case Kind::coefficient: return coefficient_derivative(e);
      case Kind::variable: return JetExpr::variable(e.index() + 1);
      default: return JetExpr();
    }
  });
}

JetExpr total_derivative(const JetExpr& f, int times) {
  JetExpr out = f;
  for (int i = 0; i < times; ++i) out = total_derivative(out);
  return out;
}

JetExpr vertical_euler(const JetExpr& f) {
  std::vector<JetExpr> terms;
  for (int j = 0; j <= f.max_jet_order(); ++j)
    if (f.depends_on(j)) terms.push_back(JetExpr::variable(j) * vertical_derivative(f, j));
  return make_sum(std::move(terms));
}

ELResult euler_lagrange(const JetExpr& f) {
  std::vector<JetExpr> el_terms, current_terms;
  for (int j = 0; j <= f.max_jet_order(); ++j) {
    // chain[i] = D_x^i (∂f/∂u_j)
    std::vector<JetExpr> chain{vertical_derivative(f, j)};
    if (chain[0].is_zero()) continue;
    for (int i = 0; i < j; ++i) chain.push_back(total_derivative(chain.back()));
    el_terms.push_back(j % 2 == 0 ? chain[j] : -chain[j]);
    for (int i = 0; i < j; ++i) {
      JetExpr t = JetExpr::variable(j - 1 - i) * chain[i];
      current_terms.push_back(i % 2 == 0 ? t : -t);
    }
  }
  return {make_sum(std::move(el_terms)), make_sum(std::move(current_terms))};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  while (n > 0) {
    if (n & 1) r *= x;
    x *= x;
    n >>= 1;
  }
  return r;
}

std::string missing_variable_message(int order, int have) {
  return "jet of order " + std::to_string(have) + " does not provide u" + std::to_string(order);
}

double eval_point(const JetExpr& e, const Jet& jet, std::size_t node,
                  std::unordered_map<const ExprNode*, double>& memo) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  double v = 0.0;
  const auto ch = e.children();
  switch (e.kind()) {
    case Kind::constant: v = e.value(); break;
    case Kind::coordinate: v = jet.base_point(); break;
    case Kind::variable: v = jet[static_cast<std::size_t>(e.index())]; break;
    case Kind::coefficient: v = e.coefficient_field()[node]; break;
    case Kind::sum:
      for (const JetExpr& c : ch) v += eval_point(c, jet, node, memo);
      break;
    case Kind::product:
      v = 1.0;
      for (const JetExpr& c : ch) v *= eval_point(c, jet, node, memo);
      break;
    case Kind::power: v = ipow(eval_point(ch[0], jet, node, memo), e.index()); break;
    case Kind::function: v = apply(e.func(), eval_point(ch[0], jet, node, memo)); break;
  }
  memo.emplace(e.node(), v);
  return v;
}

using VecMemo = std::unordered_map<const ExprNode*, std::vector<double>>;

const std::vector<double>& eval_vec(const JetExpr& e, std::span<const Field> derivs,
                                    VecMemo& memo) {
  if (auto it = memo.find(e.node()); it != memo.end()) return it->second;
  const GridSpec& grid = derivs.front().grid();
  const std::size_t n = grid.size();
  std::vector<double> v(n, 0.0);
  const auto ch = e.children();
  switch (e.kind()) {
    case Kind::constant: std::fill(v.begin(), v.end(), e.value()); break;
    case Kind::coordinate:
      for (std::size_t i = 0; i < n; ++i) v[i] = grid.node(i);
      break;
    case Kind::variable: {
      auto s = derivs[static_cast<std::size_t>(e.index())].samples();
      std::copy(s.begin(), s.end(), v.begin());
      break;
    }
    case Kind::coefficient: {
      auto s = e.coefficient_field().samples();
      std::copy(s.begin(), s.end(), v.begin());
      break;
    }
    case Kind::sum:
      for (const JetExpr& c : ch) {
        const auto& cv = eval_vec(c, derivs, memo);
        for (std::size_t i = 0; i < n; ++i) v[i] += cv[i];
      }
      break;
    case Kind::product:
      std::fill(v.begin(), v.end(), 1.0);
      for (const JetExpr& c : ch) {
        const auto& cv = eval_vec(c, derivs, memo);
        for (std::size_t i = 0; i < n; ++i) v[i] *= cv[i];
      }
      break;
    case Kind::power: {
      const auto& cv = eval_vec(ch[0], derivs, memo);
      for (std::size_t i = 0; i < n; ++i) v[i] = ipow(cv[i], e.index());
      break;
    }
    case Kind::function: {
      const auto& cv = eval_vec(ch[0], derivs, memo);
      for (std::size_t i = 0; i < n; ++i) v[i] = apply(e.func(), cv[i]);
      break;
    }
  }
  return memo.emplace(e.node(), std::move(v)).first->second;
}

}  // namespace

double evaluate(const JetExpr& f, const Jet& jet) {
  if (f.max_jet_order() > jet.order())
    throw PreconditionError(missing_variable_message(f.max_jet_order(), jet.order()));
  std::size_t node = 0;
  if (f.grid()) node = f.grid()->node_index(jet.base_point());
  std::unordered_map<const ExprNode*, double> memo;
  const double v = eval_point(f, jet, node, memo);
  if (!std::isfinite(v)) throw NumericalError("expression evaluated to a non-finite value");
  return v;
}

Field evaluate_along(const JetExpr& f, std::span<const Field> derivs) {
  if (derivs.empty()) throw PreconditionError("evaluate_along needs at least the field itself");
  const int have = static_cast<int>(derivs.size()) - 1;
  if (f.max_jet_order() > have)
    throw PreconditionError(missing_variable_message(f.max_jet_order(), have));
  const GridSpec& grid = derivs.front().grid();
  for (const Field& d : derivs)
    if (!(d.grid() == grid)) throw PreconditionError("derivative fields use different grids");
  if (f.grid() && !(*f.grid() == grid))
    throw PreconditionError("coefficient fields and jet fields use different grids");
  VecMemo memo;
  std::vector<double> v = eval_vec(f, derivs, memo);
  for (double x : v)
    if (!std::isfinite(x)) throw NumericalError("expression evaluated to a non-finite value");
  return Field(grid, std::move(v));
}

Field evaluate_along(const JetExpr& f, const Field& psi) {
  const auto ds = derivatives(psi, std::max(0, f.max_jet_order()));
  return evaluate_along(f, ds);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const CoefficientRegistry& registry)
      : text_(text), registry_(registry) {}

  JetExpr parse_all() {
    JetExpr e = parse();
    skip_space();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError("jet expression: " + why + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view atom() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
    if (start == pos_) fail("expected a token");
    return text_.substr(start, pos_ - start);
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  int integer() {
    const auto a = atom();
    try {
      return static_cast<int>(csv::parse_integer(a));
    } catch (const ParseError&) {
      fail("expected an integer");
    }
  }

  JetExpr parse() {
    if (peek('(')) {
      ++pos_;
      const std::string op(atom());
      JetExpr e = parse_compound(op);
      expect(')');
      return e;
    }
    const auto a = atom();
    if (a == "x") return JetExpr::coordinate();
    if (a.size() > 1 && a[0] == 'u' &&
        std::all_of(a.begin() + 1, a.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      return JetExpr::variable(static_cast<int>(csv::parse_integer(a.substr(1))));
    try {
      return JetExpr::constant(csv::parse_double(a));
    } catch (const ParseError&) {
      fail("unknown token '" + std::string(a) + "'");
    }
  }

  JetExpr parse_compound(const std::string& op) {
    if (op == "coef") {
      const std::string name(atom());
      const int order = integer();
      auto it = registry_.find(name);
      if (it == registry_.end()) fail("unknown coefficient '" + name + "'");
      if (auto f = families_.find(name); f != families_.end())
        return make_coefficient(f->second, order);
      auto family = std::make_shared<const CoefficientFamily>(name, it->second);
      families_.emplace(name, family);
      return make_coefficient(family, order);
    }
    if (op == "^") {
      JetExpr base = parse();
      return JetExpr::raw_power(std::move(base), integer());
    }
    if (op == "sin" || op == "cos" || op == "exp") {
      const Func f = op == "sin" ? Func::sin : op == "cos" ? Func::cos : Func::exp;
      return JetExpr::raw_function(f, parse());
    }
    if (op == "+" || op == "*") {
      std::vector<JetExpr> items;
      while (!peek(')')) items.push_back(parse());
      if (items.empty()) fail("empty '" + op + "'");
      return op == "+" ? JetExpr::raw_sum(std::move(items)) : JetExpr::raw_product(std::move(items));
    }
    fail("unknown operator '" + op + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  const CoefficientRegistry& registry_;
  std::map<std::string, std::shared_ptr<const CoefficientFamily>> families_;
};

}  // namespace

JetExpr parse_jet_expr(std::string_view text, const CoefficientRegistry& registry) {
  return Parser(text, registry).parse_all();
}

// ---------------------------------------------------------------------------
// Random trees

namespace {

JetExpr random_leaf(Rng& rng, const RandomExprOptions& o, bool force_variable) {
  const double r = force_variable ? 0.0 : rng.uniform();
  if (r < 0.5) return JetExpr::variable(static_cast<int>(rng.integer(0, o.max_order)));
  if (r < 0.7 && !o.coefficients.empty()) {
    const auto& [name, field] =
        o.coefficients[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(o.coefficients.size()) - 1))];
    return JetExpr::coefficient(name, field);
  }
  if (r < 0.8 && o.allow_coordinate) return JetExpr::coordinate();
  // Quarter-integer constants in [-1, 1], never zero.
  double c = static_cast<double>(rng.integer(1, 4)) / 4.0;
  return rng.uniform() < 0.5 ? JetExpr::constant(-c) : JetExpr::constant(c);
}

JetExpr random_tree(Rng& rng, const RandomExprOptions& o, int depth) {
  if (depth <= 0) return random_leaf(rng, o, false);
  switch (rng.integer(0, 4)) {
    case 0:
    case 1:
      return random_tree(rng, o, depth - 1) + random_tree(rng, o, depth - 1);
    case 2:
      return random_tree(rng, o, depth - 1) * random_tree(rng, o, depth - 1);
    case 3:
      // Powers only of leaves keep magnitudes bounded.
      return pow(random_leaf(rng, o, false), static_cast<int>(rng.integer(2, 3)));
    default: {
      const JetExpr arg = 0.5 * random_tree(rng, o, depth - 1);
      switch (rng.integer(0, 2)) {
        case 0: return sin(arg);
        case 1: return cos(arg);
        default: return exp(arg);
      }
    }
  }
}

}  // namespace

JetExpr random_jet_expr(Rng& rng, const RandomExprOptions& options) {
  if (options.max_order < 0 || options.depth < 0)
    throw PreconditionError("random expression options must be non-negative");
  for (int attempt = 0; attempt < 64; ++attempt) {
    JetExpr e = random_tree(rng, options, options.depth);
    if (e.max_jet_order() >= 0) return e;
  }
  return random_leaf(rng, options, true) * random_tree(rng, options, options.depth);
}

}  // namespace jetcalc
