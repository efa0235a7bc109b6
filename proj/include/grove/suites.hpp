#pragma once

// Verification suites. Each suite sweeps a family of exact identities over a
// bounded tree universe and returns a VerificationReport; the CLI and the
// test binaries share these entry points. All scans are deterministic: the
// universe is a GradedBasis (canonically ordered) and the first failure in
// index order supplies the counterexample.

#include "grove/basis.hpp"
#include "grove/coproduct.hpp"
#include "grove/diff.hpp"
#include "grove/grafting.hpp"
#include "grove/parse.hpp"
#include "grove/preparation.hpp"
#include "grove/renorm.hpp"
#include "grove/report.hpp"
#include "grove/rules.hpp"
#include "grove/series.hpp"
#include "grove/spanning.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace grove {

namespace detail {

inline std::vector<EdgeLabel> kernel_labels(const Signature& sig, std::uint32_t maxDeriv) {
  std::vector<EdgeLabel> out;
  for (std::uint16_t ki = 0; ki < sig.kernels().size(); ++ki)
    for_each_total_le(sig.dim(), maxDeriv, [&](const MultiIndex& p) {
      out.push_back(EdgeLabel{TypeId{TypeKind::Kernel, ki}, p});
    });
  return out;
}

inline std::vector<MultiIndex> unit_raises(const Signature& sig) {
  std::vector<MultiIndex> out;
  for (std::size_t j = 0; j < sig.dim(); ++j) out.push_back(MultiIndex::unit(sig.dim(), j));
  return out;
}

// Deterministic reduction of a parallel scan: the lowest failing index wins.
struct ScanResult {
  std::uint64_t checked = 0;
  bool passed = true;
  std::string counterexample;
};

inline ScanResult reduce_scan(const std::vector<std::uint8_t>& ok,
                              const std::vector<std::uint64_t>& counts,
                              const std::vector<std::string>& fails) {
  ScanResult r;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    r.checked += counts[i];
    if (!ok[i] && r.passed) {
      r.passed = false;
      r.counterexample = fails[i];
    }
  }
  return r;
}

}  // namespace detail

// Associativity of the grafting product and its duality with the coaction.
inline VerificationReport suite_star(const EquationSpec& spec, const Bounds& bounds) {
  const Signature& sig = spec.sig;
  Stopwatch total;
  VerificationReport rep;
  rep.suite = "star";
  rep.bounds = bounds.str();

  GradedBasis basis(sig, bounds);
  const std::size_t n = basis.size();
  std::vector<std::uint32_t> nn(n), ne(n);
  for (std::size_t i = 0; i < n; ++i) {
    nn[i] = noise_count(basis.tree(i));
    ne[i] = edge_count(basis.tree(i));
  }

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "associativity";
    // (sigma * tau) * mu = sigma * (tau * mu) over triples whose combined
    // noise and edge budgets stay inside the bounds. Both sides are exact
    // vectors, so no truncation enters. The construction admits one noise
    // factor per left forest, so pairs where sigma and tau both carry a root
    // noise lie outside the product's domain: the outer left factor would
    // need two noise factors. Those pairs are counted as skipped; on them
    // the two orders genuinely differ (one noise annihilates against the
    // other at a shared node in one order only).
    std::vector<std::uint8_t> ok(n, 1);
    std::vector<std::uint64_t> counts(n, 0), skips(n, 0);
    std::vector<std::string> fails(n);
    parallel_for(n, [&](std::size_t i) {
      const DecoratedTree& s = basis.tree(i);
      for (std::size_t j = 0; j < n && ok[i]; ++j) {
        if (nn[i] + nn[j] > bounds.maxNoises || ne[i] + ne[j] > bounds.maxEdges) continue;
        const DecoratedTree& t = basis.tree(j);
        if (s.noise && t.noise) {
          ++skips[i];
          continue;
        }
        TreeVec st = star(s, t);
        for (std::size_t k = 0; k < n; ++k) {
          if (nn[i] + nn[j] + nn[k] > bounds.maxNoises ||
              ne[i] + ne[j] + ne[k] > bounds.maxEdges)
            continue;
          const DecoratedTree& u = basis.tree(k);
          ++counts[i];
          if (star(st, u) != star(s, star(t, u))) {
            ok[i] = 0;
            fails[i] = print_tree(s, sig) + " , " + print_tree(t, sig) + " , " + print_tree(u, sig);
            break;
          }
        }
      }
    });
    detail::ScanResult r = detail::reduce_scan(ok, counts, fails);
    id.passed = r.passed;
    id.checked = r.checked;
    id.counterexample = r.counterexample;
    for (std::uint64_t sk : skips) id.skipped += sk;
    id.note = "left-factor pairs with two root noises lie outside the product's one-noise domain";
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "coaction-duality";
    // <sigma * tau, mu> = <tau (x) sigma, coaction(mu)> with sigma in the
    // positive sector. Both sides are tabulated as sparse maps over index
    // triples; triples where both pairings vanish are vacuous.
    std::map<std::array<std::size_t, 3>, Rat> lhs, rhs;
    for (std::size_t i = 0; i < n; ++i) {
      const DecoratedTree& s = basis.tree(i);
      if (!in_positive_sector(s, sig)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (nn[i] + nn[j] > bounds.maxNoises || ne[i] + ne[j] > bounds.maxEdges) continue;
        TreeVec v = star(s, basis.tree(j));
        for (const auto& [t, c] : v.terms()) {
          auto m = basis.find(t);
          if (!m) continue;
          lhs[{i, j, *m}] = c.rational_value() * symmetry_factor(t);
        }
      }
    }
    for (std::size_t m = 0; m < n; ++m) {
      TensorVec d = coproduct(basis.tree(m), sig);
      for (const auto& [pr, c] : d.terms()) {
        auto ri = basis.find(pr.first);
        auto ei = basis.find(pr.second);
        if (!ri || !ei) continue;
        if (!in_positive_sector(pr.second, sig)) continue;
        rhs[{*ei, *ri, m}] = c.rational_value() * symmetry_factor(pr.first) * symmetry_factor(pr.second);
      }
    }
    id.passed = true;
    id.checked = lhs.size();
    for (const auto& [key, val] : lhs) {
      auto it = rhs.find(key);
      Rat other = (it == rhs.end()) ? Rat(0) : it->second;
      if (val != other) {
        id.passed = false;
        id.counterexample = print_tree(basis.tree(key[0]), sig) + " , " +
                            print_tree(basis.tree(key[1]), sig) + " , " +
                            print_tree(basis.tree(key[2]), sig);
        break;
      }
    }
    if (id.passed)
      for (const auto& [key, val] : rhs) {
        if (lhs.count(key)) continue;
        ++id.checked;
        if (!val.is_zero()) {
          id.passed = false;
          id.counterexample = print_tree(basis.tree(key[0]), sig) + " , " +
                              print_tree(basis.tree(key[1]), sig) + " , " +
                              print_tree(basis.tree(key[2]), sig);
          break;
        }
      }
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  rep.seconds = total.seconds();
  return rep;
}

// The compatibility relations between the directional grafting operations,
// plus the certificate that iterated grafts span the conforming sector.
inline VerificationReport suite_prelie(const EquationSpec& spec, const Bounds& bounds,
                                       std::uint32_t maxNodes = 3,
                                       std::uint32_t labelDeriv = 1) {
  const Signature& sig = spec.sig;
  Stopwatch total;
  VerificationReport rep;
  rep.suite = "prelie";
  rep.bounds = bounds.str();

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "multi-pre-lie";
    // The universe keeps internal edge derivatives at the bounds while the
    // grafting directions carry up to labelDeriv, so the deformation paths
    // (derivative lowering against node decorations) are exercised without
    // inflating the cubic scan.
    std::vector<DecoratedTree> trees;
    for (const auto& t : enumerate_basis(sig, bounds))
      if (node_count(t) <= maxNodes) trees.push_back(t);
    std::vector<EdgeLabel> labels = detail::kernel_labels(sig, labelDeriv);
    // Flatten the (tree, direction) pairs; the relation is symmetric under
    // swapping them, so scan unordered pairs only.
    std::vector<std::pair<std::size_t, std::size_t>> sa;
    for (std::size_t i = 0; i < trees.size(); ++i)
      for (std::size_t a = 0; a < labels.size(); ++a) sa.push_back({i, a});
    std::vector<std::uint8_t> ok(sa.size(), 1);
    std::vector<std::uint64_t> counts(sa.size(), 0);
    std::vector<std::string> fails(sa.size());
    parallel_for(sa.size(), [&](std::size_t p) {
      const DecoratedTree& s = trees[sa[p].first];
      const EdgeLabel& a = labels[sa[p].second];
      for (std::size_t q = p + 1; q < sa.size() && ok[p]; ++q) {
        const DecoratedTree& t = trees[sa[q].first];
        const EdgeLabel& b = labels[sa[q].second];
        TreeVec sat = graft(s, a, t);
        TreeVec tbs = graft(t, b, s);
        for (const DecoratedTree& u : trees) {
          ++counts[p];
          TreeVec left = graft(TreeVec(s), a, graft(t, b, u)) - graft(sat, b, TreeVec(u));
          TreeVec right = graft(TreeVec(t), b, graft(s, a, u)) - graft(tbs, a, TreeVec(u));
          if (left != right) {
            ok[p] = 0;
            fails[p] = print_tree(s, sig) + " |" + print_label(a, sig) + "  " +
                       print_tree(t, sig) + " |" + print_label(b, sig) + "  " + print_tree(u, sig);
            break;
          }
        }
      }
    });
    detail::ScanResult r = detail::reduce_scan(ok, counts, fails);
    id.passed = r.passed;
    id.checked = r.checked;
    id.counterexample = r.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "grafting-spans";
    SpanReport sp = check_spanning(spec, bounds);
    id.passed = sp.passed;
    id.checked = sp.conforming;
    id.counterexample = sp.counterexample;
    id.note = std::to_string(sp.spanned) + "/" + std::to_string(sp.conforming) + " spanned, " +
              std::to_string(sp.vectors) + " graft vectors";
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  rep.seconds = total.seconds();
  return rep;
}

// Axioms of the adjoint renormalisation map attached to a character: the
// perturbation shape, the commutation rule, right-multiplicativity against
// every left factor, bounded nilpotency, the two-sided equivalence between
// the last two, and the special planted identities.
inline VerificationReport suite_prep(const EquationSpec& spec, const Bounds& bounds,
                                     const Character& ell, std::uint32_t strengthTauEdges = 2) {
  const Signature& sig = spec.sig;
  Stopwatch total;
  VerificationReport rep;
  rep.suite = "prep";
  rep.bounds = bounds.str();

  TreeMap fwd = memoized(bphz_forward_map(ell, sig));
  TreeMap rst = memoized(bphz_rstar_map(ell));
  TreeMap rstDelta = memoized(bphz_rstar_delta_map(ell));
  GradedBasis basis(sig, bounds);
  const std::vector<DecoratedTree>& taus = basis.trees();
  const unsigned cap = 1 + bounds.maxNoises;

  // Left factors range over the whole window; the scan burden scales with the
  // right argument's size, so right arguments stop at strengthTauEdges edges.
  std::vector<DecoratedTree> rights;
  for (const auto& t : taus)
    if (edge_count(t) <= strengthTauEdges) rights.push_back(t);

  Stopwatch swRec;
  PreparationRecord rec = check_preparation(fwd, rst, rstDelta, rights, taus, sig, 0);
  {
    PreparationRecord full = check_preparation(fwd, rst, rstDelta, taus, {}, sig, cap);
    rec.degreeCondition = full.degreeCondition;
    rec.edgeCondition = full.edgeCondition;
    rec.noiseCondition = full.noiseCondition;
    rec.shapeChecked = full.shapeChecked;
    rec.commutes = full.commutes;
    rec.commuteChecked = full.commuteChecked;
    rec.nilpotency = full.nilpotency;
    if (rec.counterexample.empty()) rec.counterexample = full.counterexample;
  }
  double recSeconds = swRec.seconds();

  {
    IdentityResult id;
    id.name = "perturbation-shape";
    id.passed = rec.degreeCondition && rec.edgeCondition && rec.noiseCondition;
    id.checked = rec.shapeChecked;
    id.counterexample = id.passed ? "" : rec.counterexample;
    rep.identities.push_back(id);
  }
  {
    IdentityResult id;
    id.name = "commutation";
    id.passed = rec.commutes;
    id.checked = rec.commuteChecked;
    id.counterexample = id.passed ? "" : rec.counterexample;
    rep.identities.push_back(id);
  }
  {
    IdentityResult id;
    id.name = "right-star-morphism";
    id.passed = rec.rightMorphism && rec.strong;
    id.checked = rec.strongChecked;
    id.note = std::to_string(taus.size()) + " left factors, " + std::to_string(rights.size()) +
              " right arguments (<= " + std::to_string(strengthTauEdges) + " edges)";
    id.counterexample = id.passed ? "" : rec.counterexample;
    id.seconds = recSeconds;
    rep.identities.push_back(id);
  }
  {
    IdentityResult id;
    id.name = "nilpotency";
    id.passed = rec.nilpotency.has_value() && *rec.nilpotency <= cap;
    if (rec.nilpotency)
      id.note = "order " + std::to_string(*rec.nilpotency) + ", cap " + std::to_string(cap);
    else
      id.note = "no power below cap " + std::to_string(cap) + " vanished";
    id.checked = 1;
    rep.identities.push_back(id);
  }
  {
    // Both sides were already evaluated on the same truncation above, so the
    // two-sided statement reduces to agreement of the verdicts.
    IdentityResult id;
    id.name = "two-sided-equivalence";
    id.passed = rec.commutes == rec.rightMorphism;
    id.checked = rec.commuteChecked + rec.morphismChecked;
    id.note = std::string("commutes=") + (rec.commutes ? "yes" : "no") + " right-morphism=" +
              (rec.rightMorphism ? "yes" : "no");
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "fixes-planted";
    std::string ce;
    id.passed = fixes_planted(fwd, taus, sig, &ce);
    id.checked = taus.size();
    id.counterexample = ce;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "planted-adjoint-identities";
    std::vector<EdgeLabel> labels = detail::kernel_labels(sig, bounds.maxDeriv);
    for (std::uint16_t li = 0; li < sig.noises().size(); ++li)
      labels.push_back(EdgeLabel{TypeId{TypeKind::Noise, li}, MultiIndex(sig.dim())});
    std::vector<MultiIndex> raises = detail::unit_raises(sig);
    // Grafting directions of every size add nothing here: compatibility is
    // local to the graft target, so small hosts already exercise each branch.
    std::vector<DecoratedTree> small;
    for (const auto& t : taus)
      if (node_count(t) <= 3) small.push_back(t);
    SpecialIdentityReport sr = check_special_identities(rstDelta, small, labels, small, raises, sig);
    id.passed = sr.graftCompatible && sr.raiseCompatible;
    id.checked = sr.checked;
    id.counterexample = sr.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  rep.seconds = total.seconds();
  return rep;
}

// The renormalisation matrix attached to a character: its adjoint is a good
// morphism, the interaction with the coaction-side matrix, the planted
// recursion, and (on fully undecorated models) the roundtrip through the
// preparation-map reconstruction.
inline VerificationReport suite_morphism(const EquationSpec& spec, const Bounds& bounds,
                                         const Character& ell) {
  const Signature& sig = spec.sig;
  Stopwatch total;
  VerificationReport rep;
  rep.suite = "morphism";
  rep.bounds = bounds.str();

  TreeMap fwd = memoized(bphz_forward_map(ell, sig));
  TreeMap rst = memoized(bphz_rstar_map(ell));
  GradedBasis basis(sig, bounds);
  std::vector<EdgeLabel> labels = detail::kernel_labels(sig, bounds.maxDeriv);
  std::vector<MultiIndex> raises = detail::unit_raises(sig);

  LinMap m = renorm_matrix(fwd, basis, sig);
  LinMap mc = m_circ_matrix(fwd, basis, sig);
  LinMap a = adjoint(m);
  LinMap ac = adjoint(mc);

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "adjoint-morphism";
    MorphismReport mr = check_good_morphism(a, basis, labels, raises, sig, &rst);
    id.passed = mr.good() && mr.noiseValues;
    id.checked = mr.graftChecked + mr.raiseChecked;
    id.note = std::to_string(mr.graftSkipped + mr.raiseSkipped) + " pairs escaped the window";
    id.counterexample = mr.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "intertwining";
    IntertwiningReport ir = check_intertwining(a, ac, basis, labels, sig);
    id.passed = ir.holds;
    id.checked = ir.checked;
    id.note = std::to_string(ir.skipped) + " pairs escaped the window";
    id.counterexample = ir.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "planted-recursion";
    std::string ce;
    id.passed = mcirc_star_planted_identity(a, ac, basis, sig, &ce);
    id.checked = basis.size();
    id.counterexample = ce;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  if (spec.cutoffs.maxDeco == 0) {
    Stopwatch sw;
    IdentityResult id;
    id.name = "preparation-roundtrip";
    std::vector<DecoratedTree> small;
    for (const auto& t : basis.trees())
      if (node_count(t) <= 4) small.push_back(t);
    GradedBasis rbasis(small);
    RoundTripReport rr = bck_roundtrip(ell, rbasis, sig, labels);
    id.passed = rr.dualRecovered && rr.morphismRecovered && rr.reconstructionIsMorphism;
    id.checked = rr.checked;
    id.counterexample = rr.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  rep.seconds = total.seconds();
  return rep;
}

// The differential side: the factorisation of elementary differentials over
// the grafting product, the closed form for differentials of adjoint images,
// coherence of the renormalised expansion, and the counterterm identity.
inline VerificationReport suite_series(const EquationSpec& spec, const Bounds& bounds,
                                       const Character& ell, std::uint16_t comp = 0) {
  const Signature& sig = spec.sig;
  Stopwatch total;
  VerificationReport rep;
  rep.suite = "series";
  rep.bounds = bounds.str();

  GradedBasis basis(sig, bounds);
  const std::size_t n = basis.size();

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "star-factorisation";
    std::vector<std::size_t> lefts;
    for (std::size_t i = 0; i < n; ++i)
      if (noise_count(basis.tree(i)) == 0) lefts.push_back(i);
    std::vector<std::uint32_t> ne(n);
    for (std::size_t i = 0; i < n; ++i) ne[i] = edge_count(basis.tree(i));
    std::vector<std::uint8_t> ok(lefts.size(), 1);
    std::vector<std::uint64_t> counts(lefts.size(), 0);
    std::vector<std::string> fails(lefts.size());
    parallel_for(lefts.size(), [&](std::size_t p) {
      const DecoratedTree& tau = basis.tree(lefts[p]);
      for (std::size_t j = 0; j < n; ++j) {
        if (ne[lefts[p]] + ne[j] > bounds.maxEdges) continue;
        ++counts[p];
        if (!star_morphism_check(spec, comp, tau, basis.tree(j))) {
          ok[p] = 0;
          fails[p] = print_tree(tau, sig) + " , " + print_tree(basis.tree(j), sig);
          break;
        }
      }
    });
    detail::ScanResult r = detail::reduce_scan(ok, counts, fails);
    id.passed = r.passed;
    id.checked = r.checked;
    id.counterexample = r.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "renormalised-differential";
    TreeMap rst = memoized(bphz_rstar_map(ell));
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (conforming(spec, basis.tree(i), spec.components[comp])) idx.push_back(i);
    std::vector<std::uint8_t> ok(idx.size(), 1);
    std::vector<std::string> fails(idx.size());
    std::vector<std::uint64_t> counts(idx.size(), 1);
    parallel_for(idx.size(), [&](std::size_t p) {
      const DecoratedTree& tau = basis.tree(idx[p]);
      if (!prop_combined_check(spec, comp, tau, rst)) {
        ok[p] = 0;
        fails[p] = print_tree(tau, sig);
      }
    });
    detail::ScanResult r = detail::reduce_scan(ok, counts, fails);
    id.passed = r.passed;
    id.checked = r.checked;
    id.counterexample = r.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "series-coherence";
    SeriesReport sr = verify_renormalized_series(spec, comp, ell, bounds);
    id.passed = sr.passed;
    id.checked = sr.windowSize;
    id.note = std::to_string(sr.residual) + " expansion terms outside the window";
    id.counterexample = sr.counterexample;
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "counterterm-consistency";
    CountertermReport ct = counterterms(spec, comp, ell);
    id.passed = ct.consistent && ct.warnings.empty();
    id.checked = ct.entries.size();
    id.note = std::to_string(ct.entries.size()) + " counterterm entries";
    if (!ct.warnings.empty()) id.counterexample = ct.warnings.front();
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  rep.seconds = total.seconds();
  return rep;
}

// Commutation of coordinate derivatives past the substitution rule, and the
// chain rule for iterated directional derivatives.
inline VerificationReport suite_faa(const EquationSpec& spec, const Bounds& bounds) {
  const Signature& sig = spec.sig;
  Stopwatch total;
  VerificationReport rep;
  rep.suite = "faa";
  rep.bounds = bounds.str();

  std::vector<DiffExpr> gs;
  std::vector<DiffVar> vars;
  for (std::uint16_t i = 0; i < spec.components.size(); ++i) {
    for (std::uint16_t l : spec.components[i].channels) gs.push_back(DiffExpr::symbol(i, l));
    for (const EdgeLabel& dep : spec.components[i].deps) {
      DiffVar v = var_of(dep);
      bool seen = false;
      for (const DiffVar& w : vars)
        if (!(w < v) && !(v < w)) seen = true;
      if (!seen) vars.push_back(v);
    }
  }
  if (!vars.empty() && !gs.empty()) {
    // One composite expression exercises the product rule paths.
    gs.push_back(gs.front() * d_var(gs.front(), vars.front(), spec));
  }

  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "derivative-commutation";
    id.passed = true;
    for (const DiffExpr& g : gs) {
      for (const DiffVar& a : vars) {
        bool stop = false;
        for_each_total_le(sig.dim(), 2, [&](const MultiIndex& m) {
          if (stop || m.is_zero()) return;
          ++id.checked;
          if (!commutation_check(spec, g, a, m)) {
            id.passed = false;
            id.counterexample = "direction " + var_str(a, sig) + " order " + m.str();
            stop = true;
          }
        });
        if (!id.passed) break;
      }
      if (!id.passed) break;
    }
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }
  {
    Stopwatch sw;
    IdentityResult id;
    id.name = "faa-di-bruno";
    id.passed = true;
    std::vector<DiffVar> dirs(vars.begin(), vars.begin() + std::min<std::size_t>(3, vars.size()));
    for (const DiffExpr& g : gs) {
      bool stop = false;
      for_each_total_le(sig.dim(), 3, [&](const MultiIndex& k) {
        if (stop || k.is_zero()) return;
        ++id.checked;
        if (!faa_di_bruno_check(spec, g, dirs, k)) {
          id.passed = false;
          id.counterexample = "order " + k.str();
          stop = true;
        }
      });
      if (!id.passed) break;
    }
    id.seconds = sw.seconds();
    rep.identities.push_back(id);
  }

  rep.seconds = total.seconds();
  return rep;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"star", "prelie", "prep",
                                              "morphism", "series", "faa"};
  return names;
}

inline VerificationReport run_suite(const std::string& name, const EquationSpec& spec,
                                    const Bounds& bounds, const Character& ell,
                                    std::uint16_t comp = 0) {
  if (name == "star") return suite_star(spec, bounds);
  if (name == "prelie") return suite_prelie(spec, bounds);
  if (name == "prep") return suite_prep(spec, bounds, ell);
  if (name == "morphism") return suite_morphism(spec, bounds, ell);
  if (name == "series") return suite_series(spec, bounds, ell, comp);
  if (name == "faa") return suite_faa(spec, bounds);
  throw std::invalid_argument("unknown suite: " + name);
}

}  // namespace grove
