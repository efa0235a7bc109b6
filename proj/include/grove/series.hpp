#pragma once

// Coherent tree expansions. The component series U_b collects the jet of one
// solution component in direction b; substituting the deviations U_b - Z_b 1
// into the Taylor expansion of F_i(R* zeta_l) and summing over root channels
// must reproduce, tree by tree, the series with coefficients F_i(R* tau)/S(tau).
// verify_renormalized_series checks that equality symbolically on a bounded
// window, counterterms tabulates ell(tau) F_i(tau)/S(tau) over the negative
// basis and checks it against F_i((R* - Id) 1).

#include "grove/basis.hpp"
#include "grove/diff.hpp"
#include "grove/preparation.hpp"
#include "grove/rules.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace grove {

using SeriesTerms = std::map<DecoratedTree, DiffExpr, TreeLess>;
using SeriesPieces = std::vector<std::pair<DecoratedTree, DiffExpr>>;

// U_b - Z_b 1: the polynomial tail sum_{k != 0} Z_{b+k} X^k / k! plus the
// planted part sum_tau (F_{j(b)}(tau)/S(tau)) I_b(tau) over trees conforming
// for b's kernel component, truncated to the bounds.
inline SeriesPieces deviation_series(const EquationSpec& spec, const DiffVar& b,
                                     const std::vector<DecoratedTree>& window,
                                     const Bounds& bounds) {
  const Component* comp = spec.component_for_kernel(b.kernel);
  if (!comp) throw std::invalid_argument("deviation_series: no component for the variable's kernel");
  auto compIdx = static_cast<std::uint16_t>(comp - spec.components.data());

  SeriesPieces out;
  for_each_total_le(spec.sig.dim(), bounds.maxDeco, [&](const MultiIndex& k) {
    if (k.is_zero()) return;
    DiffVar shifted{b.kernel, b.p + k};
    out.push_back({poly_tree(k), DiffExpr::variable(shifted) * Scalar(Rat(1) / Rat(k.fact()))});
  });

  EdgeLabel lab{TypeId{TypeKind::Kernel, b.kernel}, b.p};
  for (const auto& tau : window) {
    if (!conforming(spec, tau, *comp)) continue;
    DecoratedTree pt = planted(lab, tau, spec.sig);
    if (!bounds.admits(pt)) continue;
    DiffExpr f = upsilon(spec, compIdx, tau);
    if (f.is_zero()) continue;
    out.push_back({pt, f * Scalar(Rat(1) / symmetry_factor(tau))});
  }
  return out;
}

namespace detail {

// Root-join a running product against one deviation series, dropping escaped
// terms. Every budget grows monotonically under the join, so a dropped term
// can never contribute to an in-window tree later.
inline SeriesTerms join_pieces(const SeriesTerms& prod, const SeriesPieces& pieces,
                               const Bounds& bounds) {
  SeriesTerms out;
  for (const auto& [t, e] : prod)
    for (const auto& [pt, pe] : pieces) {
      DecoratedTree m = tree_product(t, pt);
      if (!bounds.admits(m)) continue;
      DiffExpr v = e * pe;
      if (v.is_zero()) continue;
      auto [it, fresh] = out.try_emplace(m, v);
      if (!fresh) {
        it->second += v;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  return out;
}

// Ordered-multiset walk over Taylor directions. Appending a direction whose
// run length becomes r divides the term by r, so a complete multiset beta
// carries 1/beta!. Every node of the walk is one Taylor term; it contributes
// its derivative times the accumulated piece product.
inline void taylor_walk(const EquationSpec& spec, const std::vector<DiffVar>& vars,
                        const std::vector<SeriesPieces>& dev, std::size_t varIdx,
                        std::uint32_t runLen, std::uint32_t depth, std::uint32_t depthCap,
                        const DiffExpr& deriv, const SeriesTerms& prod, const Bounds& bounds,
                        SeriesTerms& acc) {
  for (const auto& [t, e] : prod) {
    DiffExpr v = deriv * e;
    if (v.is_zero()) continue;
    auto [it, fresh] = acc.try_emplace(t, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero()) acc.erase(it);
    }
  }
  if (depth == depthCap) return;
  for (std::size_t j = varIdx; j < vars.size(); ++j) {
    std::uint32_t run = (j == varIdx) ? runLen + 1 : 1;
    DiffExpr d = d_var(deriv, vars[j], spec) * Scalar(Rat(1, run));
    if (d.is_zero()) continue;
    SeriesTerms p = join_pieces(prod, dev[j], bounds);
    if (p.empty()) continue;
    taylor_walk(spec, vars, dev, j, run, depth + 1, depthCap, d, p, bounds, acc);
  }
}

}  // namespace detail

// Right-hand expansion: for each root channel l of the component, the Taylor
// lift of F_i(R* zeta_l) evaluated on the deviation series, joined with the
// channel tree (the unit for the constant channel). rstar maps a tree to its
// image under the adjoint renormalisation.
template <class RStar>
  requires std::is_invocable_r_v<TreeVec, RStar&, const DecoratedTree&>
inline SeriesTerms noise_expansion(const EquationSpec& spec, std::uint16_t comp, RStar&& rstar,
                                   const std::vector<DecoratedTree>& window, const Bounds& bounds) {
  const Component& c = spec.components.at(comp);
  std::map<DiffVar, SeriesPieces> devCache;
  SeriesTerms out;

  for (std::uint16_t l : c.channels) {
    // Reserve the channel tree's own noise edge up front; with no room for
    // it the channel contributes nothing to the window.
    Bounds eff = bounds;
    DecoratedTree zeta = unit_tree(spec.sig);
    if (l != 0) {
      if (bounds.maxNoises == 0 || bounds.maxEdges == 0) continue;
      eff.maxNoises -= 1;
      eff.maxEdges -= 1;
      zeta = noise_tree(spec.sig, static_cast<std::uint16_t>(l - 1));
    }
    DiffExpr g = upsilon(spec, comp, rstar(zeta));
    if (g.is_zero()) continue;

    // d_var neither adds Z variables nor changes a symbol's dependency set,
    // so the active variables of g stay a valid direction universe for every
    // iterated derivative.
    std::vector<DiffVar> vars;
    for (const auto& v : active_vars(g, spec)) vars.push_back(v);
    std::vector<SeriesPieces> dev;
    dev.reserve(vars.size());
    for (const auto& v : vars) {
      auto it = devCache.find(v);
      if (it == devCache.end()) it = devCache.emplace(v, deviation_series(spec, v, window, eff)).first;
      dev.push_back(it->second);
    }

    // Each piece costs at least one edge or one decoration unit.
    auto depthCap = eff.maxEdges + eff.maxDeco;
    SeriesTerms lift;
    SeriesTerms one;
    one.emplace(unit_tree(spec.sig), DiffExpr(Scalar(1)));
    detail::taylor_walk(spec, vars, dev, 0, 0, 0, depthCap, g, one, eff, lift);

    for (const auto& [t, e] : lift) {
      DecoratedTree m = tree_product(t, zeta);
      if (!bounds.admits(m)) continue;
      auto [it, fresh] = out.try_emplace(m, e);
      if (!fresh) {
        it->second += e;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  }
  return out;
}

struct SeriesReport {
  bool passed = false;
  std::size_t windowSize = 0;  // trees whose coefficients were compared
  std::size_t residual = 0;    // expansion terms outside the component's sector
  std::string counterexample;
};

// Coefficient-by-coefficient comparison of the two series on the safe window:
// the trees conforming for the component within the bounds. Pieces of an
// in-window tree are themselves in-window (every budget is a monotone total),
// so every Taylor term contributing to a compared coefficient was kept.
template <class RStar>
  requires std::is_invocable_r_v<TreeVec, RStar&, const DecoratedTree&>
inline SeriesReport verify_renormalized_series(const EquationSpec& spec, std::uint16_t comp,
                                               RStar&& rstar, const Bounds& bounds) {
  const Component& c = spec.components.at(comp);
  std::vector<DecoratedTree> window = generate_conforming(spec, bounds, false);
  std::vector<DecoratedTree> mine;
  for (const auto& t : window)
    if (conforming(spec, t, c)) mine.push_back(t);
  if (mine.empty())
    throw std::invalid_argument("verify_renormalized_series: no conforming tree in the window");

  SeriesTerms right = noise_expansion(spec, comp, rstar, window, bounds);

  SeriesReport rep;
  rep.passed = true;
  std::set<DecoratedTree, TreeLess> sector(mine.begin(), mine.end());
  for (const auto& [t, e] : right)
    if (!sector.count(t)) ++rep.residual;

  for (const auto& nu : mine) {
    DiffExpr lhs = upsilon(spec, comp, rstar(nu)) * Scalar(Rat(1) / symmetry_factor(nu));
    auto it = right.find(nu);
    DiffExpr rhs = it == right.end() ? DiffExpr() : it->second;
    ++rep.windowSize;
    if (lhs == rhs) continue;
    rep.passed = false;
    rep.counterexample = print_tree(nu, spec.sig) + "\n  series:    " + diff_str(lhs, spec.sig) +
                         "\n  expansion: " + diff_str(rhs, spec.sig);
    break;
  }
  return rep;
}

inline SeriesReport verify_renormalized_series(const EquationSpec& spec, std::uint16_t comp,
                                               const Character& ell, const Bounds& bounds) {
  return verify_renormalized_series(
      spec, comp, [&](const DecoratedTree& t) { return bphz_rstar(ell, t); }, bounds);
}

struct CountertermEntry {
  DecoratedTree tree;
  Scalar weight;   // ell(tau)/S(tau)
  DiffExpr value;  // weight * F_i(tau)
};

struct CountertermReport {
  std::vector<CountertermEntry> entries;  // zero values elided
  DiffExpr combined;                      // F_i((R* - Id) 1)
  bool consistent = false;                // combined equals the entry total
  std::vector<std::string> warnings;      // noises the character fails to fix

  DiffExpr total() const {
    DiffExpr t;
    for (const auto& e : entries) t += e.value;
    return t;
  }
};

// Counterterm table of one component: ell(tau) F_i(tau)/S(tau) over the
// non-unit negative basis. Trees killed by the elementary differential (a
// derivative outside the dependency set, a channel the component lacks) are
// elided. The same quantity computed as F_i((R* - Id) 1) must agree; noises
// moved by the adjoint map are reported, not fatal.
inline CountertermReport counterterms(const EquationSpec& spec, std::uint16_t comp,
                                      const Character& ell) {
  CountertermReport rep;
  for (const auto& tau : ell.domain()) {
    if (is_unit(tau)) continue;
    Scalar c = ell(tau);
    if (c.is_zero()) continue;
    DiffExpr f = upsilon(spec, comp, tau);
    if (f.is_zero()) continue;
    Scalar w = c / symmetry_factor(tau);
    rep.entries.push_back({tau, w, f * w});
  }

  DecoratedTree one = unit_tree(spec.sig);
  TreeVec shifted = bphz_rstar(ell, one);
  shifted.add(one, Scalar(-1));
  rep.combined = upsilon(spec, comp, shifted);
  rep.consistent = rep.combined == rep.total();

  for (std::uint16_t ni = 0; ni < spec.sig.noises().size(); ++ni) {
    DecoratedTree z = noise_tree(spec.sig, ni);
    TreeVec r = bphz_rstar(ell, z);
    r.add(z, Scalar(-1));
    if (r.terms().empty()) continue;
    rep.warnings.push_back("adjoint map moves " + print_tree(z, spec.sig) + " by " +
                           print_vec(r, spec.sig));
  }
  return rep;
}

}  // namespace grove
