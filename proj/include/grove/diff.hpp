#pragma once

// Free commutative differential algebra in abstract derivative variables
// Z_{(kernel,p)} and formal right-hand-side symbols F_i^l, with the partial
// derivations D_a, the total derivative powers, and the elementary
// differential map tree -> expression.
//
// The total derivative in direction j is the derivation
//   D^{(j)} e = sum_{a active in e} Z_{a+e_j} D_a e,
// finite because each symbol carries an explicit dependency set, and the
// total derivative of order k is the iterated composition prod_j (D^{(j)})^{k_j}
// (the directions commute). Coefficients live in the scalar ring, so
// character symbols flow through unchanged.

#include "grove/grafting.hpp"
#include "grove/rules.hpp"
#include "grove/scalar.hpp"
#include "grove/treevec.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace grove {

struct DiffVar {
  std::uint16_t kernel = 0;
  MultiIndex p;

  bool operator==(const DiffVar& o) const { return kernel == o.kernel && p == o.p; }
  bool operator!=(const DiffVar& o) const { return !(*this == o); }
  bool operator<(const DiffVar& o) const {
    if (kernel != o.kernel) return kernel < o.kernel;
    return p < o.p;
  }
};

inline DiffVar var_of(const EdgeLabel& a) { return DiffVar{a.type.index, a.deriv}; }

// A symbol F_comp^channel with an applied multiset of partials D_a (sorted).
struct DSym {
  std::uint16_t comp = 0;
  std::uint16_t channel = 0;
  std::vector<DiffVar> ds;

  bool operator==(const DSym& o) const { return comp == o.comp && channel == o.channel && ds == o.ds; }
  bool operator<(const DSym& o) const {
    if (comp != o.comp) return comp < o.comp;
    if (channel != o.channel) return channel < o.channel;
    return ds < o.ds;
  }
};

struct DiffMono {
  std::map<DiffVar, std::uint32_t> z;
  std::map<DSym, std::uint32_t> f;

  bool operator==(const DiffMono& o) const { return z == o.z && f == o.f; }
  bool operator<(const DiffMono& o) const {
    if (z != o.z) return z < o.z;
    return f < o.f;
  }

  DiffMono operator*(const DiffMono& o) const {
    DiffMono r = *this;
    for (const auto& [v, n] : o.z) r.z[v] += n;
    for (const auto& [s, n] : o.f) r.f[s] += n;
    return r;
  }
};

class DiffExpr {
 public:
  DiffExpr() = default;
  explicit DiffExpr(const Scalar& c) {
    if (!c.is_zero()) terms_[DiffMono{}] = c;
  }
  static DiffExpr variable(const DiffVar& v) {
    DiffMono m;
    m.z[v] = 1;
    DiffExpr e;
    e.terms_[m] = Scalar(1);
    return e;
  }
  static DiffExpr symbol(std::uint16_t comp, std::uint16_t channel) {
    DiffMono m;
    m.f[DSym{comp, channel, {}}] = 1;
    DiffExpr e;
    e.terms_[m] = Scalar(1);
    return e;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<DiffMono, Scalar>& terms() const { return terms_; }

  void add(const DiffMono& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  DiffExpr& operator+=(const DiffExpr& o) {
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  DiffExpr& operator-=(const DiffExpr& o) {
    for (const auto& [m, c] : o.terms_) add(m, -c);
    return *this;
  }
  DiffExpr operator+(const DiffExpr& o) const {
    DiffExpr r = *this;
    r += o;
    return r;
  }
  DiffExpr operator-(const DiffExpr& o) const {
    DiffExpr r = *this;
    r -= o;
    return r;
  }
  DiffExpr operator*(const DiffExpr& o) const {
    DiffExpr r;
    for (const auto& [m1, c1] : terms_)
      for (const auto& [m2, c2] : o.terms_) r.add(m1 * m2, c1 * c2);
    return r;
  }
  DiffExpr operator*(const Scalar& c) const {
    DiffExpr r;
    for (const auto& [m, w] : terms_) r.add(m, w * c);
    return r;
  }
  bool operator==(const DiffExpr& o) const { return terms_ == o.terms_; }
  bool operator!=(const DiffExpr& o) const { return !(*this == o); }

 private:
  std::map<DiffMono, Scalar> terms_;
};

// --- printing ---------------------------------------------------------------

inline std::string var_str(const DiffVar& v, const Signature& sig) {
  return "Z[" + sig.kernels().at(v.kernel).name + "," + v.p.str() + "]";
}

inline std::string dsym_str(const DSym& s, const Signature& sig) {
  std::string out;
  for (const auto& d : s.ds) out += "D[" + sig.kernels().at(d.kernel).name + "," + d.p.str() + "]";
  out += "F_" + std::to_string(s.comp + 1) + "^" + std::to_string(s.channel);
  return out;
}

inline std::string diff_str(const DiffExpr& e, const Signature& sig) {
  if (e.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    if (!first) out += " + ";
    first = false;
    std::vector<std::string> parts{c.factor_str()};
    for (const auto& [v, n] : m.z) parts.push_back(var_str(v, sig) + (n > 1 ? "^" + std::to_string(n) : ""));
    for (const auto& [s, n] : m.f) parts.push_back(dsym_str(s, sig) + (n > 1 ? "^" + std::to_string(n) : ""));
    std::string term;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (i && !(i == 1 && parts[0] == "1" && parts.size() > 1)) term += " * ";
      if (i == 0 && parts[0] == "1" && parts.size() > 1) continue;
      term += parts[i];
    }
    out += term;
  }
  return out;
}

inline nlohmann::json diff_to_json(const DiffExpr& e, const Signature& sig) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [m, c] : e.terms()) {
    nlohmann::json jm;
    jm["coeff"] = c.str();
    jm["z"] = nlohmann::json::array();
    for (const auto& [v, n] : m.z)
      jm["z"].push_back({{"var", var_str(v, sig)}, {"power", n}});
    jm["f"] = nlohmann::json::array();
    for (const auto& [s, n] : m.f)
      jm["f"].push_back({{"symbol", dsym_str(s, sig)}, {"power", n}});
    arr.push_back(jm);
  }
  return arr;
}

// --- derivations ------------------------------------------------------------

inline const Component* component_of(const EquationSpec& spec, std::uint16_t comp) {
  return &spec.components.at(comp);
}

inline bool in_deps(const EquationSpec& spec, std::uint16_t comp, const DiffVar& a) {
  for (const auto& d : spec.components.at(comp).deps)
    if (var_of(d) == a) return true;
  return false;
}

// Partial derivative D_a, a Leibniz derivation. On Z_b it gives 1_{a=b}; on a
// derived symbol it appends a to the D-multiset, or kills the term when a is
// outside the symbol's dependency set.
inline DiffExpr d_var(const DiffExpr& e, const DiffVar& a, const EquationSpec& spec) {
  DiffExpr out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [v, n] : m.z) {
      if (!(v == a)) continue;
      DiffMono r = m;
      if (n == 1)
        r.z.erase(v);
      else
        r.z[v] = n - 1;
      out.add(r, c * Rat(n));
    }
    for (const auto& [s, n] : m.f) {
      if (!in_deps(spec, s.comp, a)) continue;
      DSym ds = s;
      ds.ds.push_back(a);
      std::sort(ds.ds.begin(), ds.ds.end());
      DiffMono r = m;
      if (n == 1)
        r.f.erase(s);
      else
        r.f[s] = n - 1;
      r.f[ds] += 1;
      out.add(r, c * Rat(n));
    }
  }
  return out;
}

// Variables the expression actually depends on: Z's present plus each present
// symbol's declared dependencies.
inline std::set<DiffVar> active_vars(const DiffExpr& e, const EquationSpec& spec) {
  std::set<DiffVar> out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [v, n] : m.z) out.insert(v);
    for (const auto& [s, n] : m.f)
      for (const auto& d : spec.components.at(s.comp).deps) out.insert(var_of(d));
  }
  return out;
}

// Total derivative in direction j.
inline DiffExpr partial_dir(const DiffExpr& e, std::size_t j, const EquationSpec& spec) {
  DiffExpr out;
  for (const auto& a : active_vars(e, spec)) {
    DiffVar shifted{a.kernel, a.p + MultiIndex::unit(spec.sig.dim(), j)};
    out += DiffExpr::variable(shifted) * d_var(e, a, spec);
  }
  return out;
}

// Iterated total derivative of multi-order k.
inline DiffExpr partial_total(const DiffExpr& e, const MultiIndex& k, const EquationSpec& spec) {
  DiffExpr out = e;
  for (std::size_t j = 0; j < k.dim(); ++j)
    for (std::uint32_t r = 0; r < k[j]; ++r) out = partial_dir(out, j, spec);
  return out;
}

// --- elementary differentials ------------------------------------------------

// F_i(tau): zero off the conforming sector; on tau = X^k zeta_l prod I_{a_j}(tau_j),
// the total derivative and partials apply to the node symbol only, then the
// child values multiply in.
inline DiffExpr upsilon(const EquationSpec& spec, std::uint16_t comp, const DecoratedTree& t) {
  const Component& c = spec.components.at(comp);
  auto l = node_channel(t);
  if (!l || !c.has_channel(*l)) return DiffExpr();
  DiffExpr core = DiffExpr::symbol(comp, *l);
  for (const auto& ch : t.children) {
    if (ch.label.type.kind != TypeKind::Kernel) return DiffExpr();
    core = d_var(core, var_of(ch.label), spec);
    if (core.is_zero()) return DiffExpr();
  }
  core = partial_total(core, t.deco, spec);
  if (core.is_zero()) return DiffExpr();
  for (const auto& ch : t.children) {
    const Component* sub = spec.component_for_kernel(ch.label.type.index);
    if (!sub) return DiffExpr();
    auto subIdx = static_cast<std::uint16_t>(sub - spec.components.data());
    core = core * upsilon(spec, subIdx, ch.sub);
    if (core.is_zero()) return DiffExpr();
  }
  return core;
}

inline DiffExpr upsilon(const EquationSpec& spec, std::uint16_t comp, const TreeVec& v) {
  DiffExpr out;
  for (const auto& [t, c] : v.terms()) out += upsilon(spec, comp, t) * c;
  return out;
}

// --- operator identities ------------------------------------------------------

// sum_{l <= min(m, a.p)} binom(m,l) partial^{m-l} D_{a-l} e == D_a partial^m e.
inline bool commutation_check(const EquationSpec& spec, const DiffExpr& e, const DiffVar& a,
                              const MultiIndex& m) {
  DiffExpr lhs;
  MultiIndex cap = a.p;
  for_each_below(m, [&](const MultiIndex& l) {
    if (!l.leq(cap)) return;
    Rat coeff(m.binom(l));
    DiffVar lowered{a.kernel, a.p - l};
    lhs += partial_total(d_var(e, lowered, spec), m - l, spec) * Scalar(coeff);
  });
  DiffExpr rhs = d_var(partial_total(e, m, spec), a, spec);
  return lhs == rhs;
}

// partial^k G / k! against the sum over multisets of (variable, nonzero order)
// pairs with total order k.
inline bool faa_di_bruno_check(const EquationSpec& spec, const DiffExpr& g,
                               const std::vector<DiffVar>& vars, const MultiIndex& k) {
  struct Pair {
    DiffVar b;
    MultiIndex kp;
  };
  std::vector<Pair> pairs;
  for (const auto& b : vars)
    for_each_below(k, [&](const MultiIndex& kp) {
      if (!kp.is_zero()) pairs.push_back(Pair{b, kp});
    });

  DiffExpr rhs;
  // Multisets as multiplicity vectors over the pair list, orders summing to k.
  std::vector<std::uint32_t> mult(pairs.size(), 0);
  std::function<void(std::size_t, MultiIndex)> walk = [&](std::size_t i, MultiIndex left) {
    if (left.is_zero() || i == pairs.size()) {
      if (!left.is_zero()) return;
      Rat coeff = 1;
      DiffExpr term = g;
      DiffMono zpart;
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (std::uint32_t r = 0; r < mult[p]; ++r) {
          term = d_var(term, pairs[p].b, spec);
          coeff /= Rat(pairs[p].kp.fact());
        }
        if (mult[p]) {
          coeff /= Rat(factorial_int(mult[p]));
          DiffVar shifted{pairs[p].b.kernel, pairs[p].b.p + pairs[p].kp};
          zpart.z[shifted] += mult[p];
        }
      }
      if (term.is_zero()) return;
      DiffExpr zfactor;
      zfactor.add(zpart, Scalar(1));
      rhs += zfactor * term * Scalar(coeff);
      return;
    }
    // multiplicity of pairs[i] from 0 while the order budget allows
    MultiIndex acc = left;
    std::uint32_t r = 0;
    while (true) {
      mult[i] = r;
      walk(i + 1, acc);
      bool fits = pairs[i].kp.leq(acc);
      if (!fits) break;
      acc = acc - pairs[i].kp;
      ++r;
    }
    mult[i] = 0;
  };
  walk(0, k);

  DiffExpr lhs = partial_total(g, k, spec) * Scalar(Rat(1) / Rat(k.fact()));
  return lhs == rhs;
}

// F_i(tauLeft * sigma) == partial^k D_{a_1}..D_{a_n} F_i(sigma) prod_j F_{l_j}(tau_j)
// for tauLeft = X^k prod I_{a_j}(tau_j) without noise factor.
inline bool star_morphism_check(const EquationSpec& spec, std::uint16_t comp,
                                const DecoratedTree& tauLeft, const DecoratedTree& sigma) {
  Decomposition d = decompose(tauLeft);
  if (d.noise) throw std::invalid_argument("star_morphism_check: left factor must be noise-free");
  DiffExpr lhs = upsilon(spec, comp, star(tauLeft, sigma));
  DiffExpr rhs = upsilon(spec, comp, sigma);
  for (const auto& f : d.factors) rhs = d_var(rhs, var_of(f.label), spec);
  rhs = partial_total(rhs, d.k, spec);
  for (const auto& f : d.factors) {
    const Component* sub = spec.component_for_kernel(f.label.type.index);
    if (!sub) return lhs.is_zero();
    rhs = rhs * upsilon(spec, static_cast<std::uint16_t>(sub - spec.components.data()), f.sub);
  }
  return lhs == rhs;
}

// F_i(R* tau) == partial^k D_{a_1}..D_{a_n} F_i(R* zeta_l) prod_j F_{l_j}(tau_j)
// for tau = X^k zeta_l prod I_{a_j}(tau_j) and a right-strong R* given as a
// function on trees.
inline bool prop_combined_check(const EquationSpec& spec, std::uint16_t comp, const DecoratedTree& tau,
                                const std::function<TreeVec(const DecoratedTree&)>& rstar) {
  Decomposition d = decompose(tau);
  DiffExpr lhs = upsilon(spec, comp, rstar(tau));
  DecoratedTree zeta{MultiIndex(tau.deco.dim()), d.noise, {}};
  DiffExpr rhs = upsilon(spec, comp, rstar(zeta));
  for (const auto& f : d.factors) rhs = d_var(rhs, var_of(f.label), spec);
  rhs = partial_total(rhs, d.k, spec);
  for (const auto& f : d.factors) {
    const Component* sub = spec.component_for_kernel(f.label.type.index);
    if (!sub) return lhs.is_zero();
    rhs = rhs * upsilon(spec, static_cast<std::uint16_t>(sub - spec.components.data()), f.sub);
  }
  return lhs == rhs;
}

}  // namespace grove
