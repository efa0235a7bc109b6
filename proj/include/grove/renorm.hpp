#pragma once

// The multiplicative recursion and the renormalization map built from a
// preparation map:
//
//   M°(1) = 1,   M° multiplicative over the root decomposition,
//   M°(X^k) = X^k,   M°(zeta_l) = zeta_l (or a supplied image),
//   M°(I_a(tau)) = I_a(M°(R tau)),   M := M° R.
//
// The adjoint M* is a morphism for grafting and raising with M* zeta_l =
// R* zeta_l; the adjoint of M° intertwines the two. In the zero-decoration
// sector dual preparation maps and morphisms are both determined by their
// values on single-node trees through graft peeling, giving the round trip
// between the two presentations.

#include "grove/preparation.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace grove {

namespace detail {

inline TreeVec m_circ_impl(const TreeMap& forward, const DecoratedTree& tau, const Signature& sig,
                           const std::map<EdgeLabel, TreeVec>& noiseImages,
                           std::map<DecoratedTree, TreeVec, TreeLess>& memo, unsigned depth,
                           unsigned guard) {
  if (depth > guard)
    throw std::runtime_error("multiplicative recursion exceeded its noise depth bound");
  DecoratedTree t = canonicalize(tau);
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  Decomposition d = decompose(t);
  TreeVec acc;
  auto ni = d.noise ? noiseImages.find(*d.noise) : noiseImages.end();
  if (d.noise && ni != noiseImages.end())
    acc = tree_product(TreeVec(poly_tree(d.k)), ni->second);
  else
    acc = TreeVec(DecoratedTree{d.k, d.noise, {}});
  for (const auto& f : d.factors) {
    TreeVec inner;
    TreeVec fs = forward(f.sub);
    for (const auto& [s, c] : fs.terms())
      inner += m_circ_impl(forward, s, sig, noiseImages, memo, depth + 1, guard) * c;
    TreeVec wrapped;
    for (const auto& [s, c] : inner.terms()) wrapped.add(planted(f.label, s, sig), c);
    acc = tree_product(acc, wrapped);
  }
  memo.emplace(std::move(t), acc);
  return acc;
}

}  // namespace detail

// M° on one tree. Applying R under every planted edge keeps shrinking noise
// content, so the recursion depth is bounded by the tree's own content; the
// guard trips only when the supplied map grows trees.
inline TreeVec m_circ(const TreeMap& forward, const DecoratedTree& tau, const Signature& sig,
                      const std::map<EdgeLabel, TreeVec>& noiseImages = {}) {
  std::map<DecoratedTree, TreeVec, TreeLess> memo;
  unsigned guard = node_count(tau) + noise_count(tau) + 4;
  return detail::m_circ_impl(forward, tau, sig, noiseImages, memo, 0, guard);
}

inline TreeMap m_circ_map(const TreeMap& forward, const Signature& sig,
                          const std::map<EdgeLabel, TreeVec>& noiseImages = {}) {
  return [forward, &sig, noiseImages](const DecoratedTree& t) {
    return m_circ(forward, t, sig, noiseImages);
  };
}

// M = M° R on one tree, and as a matrix on a basis.
inline TreeVec renorm_apply(const TreeMap& forward, const DecoratedTree& tau, const Signature& sig,
                            const std::map<EdgeLabel, TreeVec>& noiseImages = {}) {
  TreeVec out;
  TreeVec ft = forward(canonicalize(tau));
  for (const auto& [s, c] : ft.terms()) out += m_circ(forward, s, sig, noiseImages) * c;
  return out;
}

inline TreeMap renorm_map(const TreeMap& forward, const Signature& sig,
                          const std::map<EdgeLabel, TreeVec>& noiseImages = {}) {
  return [forward, &sig, noiseImages](const DecoratedTree& t) {
    return renorm_apply(forward, t, sig, noiseImages);
  };
}

inline LinMap renorm_matrix(const TreeMap& forward, const GradedBasis& basis, const Signature& sig,
                            const std::map<EdgeLabel, TreeVec>& noiseImages = {}) {
  return LinMap::from_function(
      basis, [&](const DecoratedTree& t) { return renorm_apply(forward, t, sig, noiseImages); },
      "renormalization map");
}

inline LinMap m_circ_matrix(const TreeMap& forward, const GradedBasis& basis, const Signature& sig,
                            const std::map<EdgeLabel, TreeVec>& noiseImages = {}) {
  return LinMap::from_function(
      basis, [&](const DecoratedTree& t) { return m_circ(forward, t, sig, noiseImages); },
      "multiplicative recursion");
}

inline TreeVec truncate_to_basis(const TreeVec& v, const GradedBasis& basis) {
  TreeVec out;
  for (const auto& [t, c] : v.terms())
    if (basis.contains(t)) out.add(t, c);
  return out;
}

// ---------------------------------------------------------------------------
// Morphism checks for a matrix A on a basis: A(sigma graft_a tau) =
// (A sigma) graft_a (A tau) and A(up^k tau) = up^k(A tau), each on the pairs
// whose left-hand side stays inside the basis (the right raise runs over the
// node set of each output tree). When a dual map is supplied, A zeta_l is
// compared with its basis truncation, the unit included.
struct MorphismReport {
  bool graftMorphism = true;
  bool raiseMorphism = true;
  bool noiseValues = true;
  std::size_t graftChecked = 0;
  std::size_t graftSkipped = 0;
  std::size_t raiseChecked = 0;
  std::size_t raiseSkipped = 0;
  std::string counterexample;
  bool good() const { return graftMorphism && raiseMorphism; }
};

inline MorphismReport check_good_morphism(const LinMap& A, const GradedBasis& basis,
                                          const std::vector<EdgeLabel>& labels,
                                          const std::vector<MultiIndex>& raises,
                                          const Signature& sig,
                                          const TreeMap* dualForNoises = nullptr) {
  MorphismReport rep;
  std::uint32_t maxEdges = 0;
  for (const auto& t : basis.trees()) maxEdges = std::max(maxEdges, edge_count(t));
  for (const auto& sigma : basis.trees()) {
    for (const auto& a : labels) {
      if (a.type.kind == TypeKind::Noise && !is_unit(sigma)) continue;
      for (const auto& tau : basis.trees()) {
        if (edge_count(sigma) + edge_count(tau) + 1 > maxEdges) {
          ++rep.graftSkipped;
          continue;
        }
        TreeVec g = graft(sigma, a, tau);
        if (basis.escape(g)) {
          ++rep.graftSkipped;
          continue;
        }
        TreeVec rhs = graft(A.apply(sigma), a, A.apply(tau));
        if (basis.escape(rhs)) {
          // the image product left the window; its dropped terms cannot fold
          // back inside, so the pair is out of scope rather than a failure
          ++rep.graftSkipped;
          continue;
        }
        TreeVec lhs = A.apply(g);
        ++rep.graftChecked;
        if (lhs != rhs) {
          rep.graftMorphism = false;
          detail::note(rep.counterexample,
                       "graft morphism fails at sigma = " + print_tree(sigma, sig) + ", a = " +
                           print_label(a, sig) + ", tau = " + print_tree(tau, sig));
        }
      }
    }
  }
  for (const auto& k : raises) {
    for (const auto& tau : basis.trees()) {
      TreeVec r = raise_all(tau, k);
      if (basis.escape(r)) {
        ++rep.raiseSkipped;
        continue;
      }
      TreeVec rhs = raise_all(A.apply(tau), k);
      if (basis.escape(rhs)) {
        ++rep.raiseSkipped;
        continue;
      }
      TreeVec lhs = A.apply(r);
      ++rep.raiseChecked;
      if (lhs != rhs) {
        rep.raiseMorphism = false;
        detail::note(rep.counterexample,
                     "raise morphism fails at k = " + k.str() + ", tau = " + print_tree(tau, sig));
      }
    }
  }
  if (dualForNoises) {
    std::vector<DecoratedTree> generators{unit_tree(sig)};
    for (std::uint16_t l = 0; l < sig.noises().size(); ++l) generators.push_back(noise_tree(sig, l));
    for (const auto& zeta : generators) {
      if (!basis.contains(zeta)) continue;
      TreeVec lhs = A.apply(zeta);
      TreeVec rhs = truncate_to_basis((*dualForNoises)(zeta), basis);
      if (lhs != rhs) {
        rep.noiseValues = false;
        detail::note(rep.counterexample, "dual map value differs at " + print_tree(zeta, sig));
      }
    }
  }
  return rep;
}

// (M°)*(sigma graft_a tau) = (M* sigma) graft_a ((M°)* tau) on in-basis pairs.
struct IntertwiningReport {
  bool holds = true;
  std::size_t checked = 0;
  std::size_t skipped = 0;
  std::string counterexample;
};

inline IntertwiningReport check_intertwining(const LinMap& mStar, const LinMap& mCircStar,
                                             const GradedBasis& basis,
                                             const std::vector<EdgeLabel>& labels,
                                             const Signature& sig) {
  IntertwiningReport rep;
  std::uint32_t maxEdges = 0;
  for (const auto& t : basis.trees()) maxEdges = std::max(maxEdges, edge_count(t));
  for (const auto& sigma : basis.trees()) {
    for (const auto& a : labels) {
      if (a.type.kind == TypeKind::Noise && !is_unit(sigma)) continue;
      for (const auto& tau : basis.trees()) {
        if (edge_count(sigma) + edge_count(tau) + 1 > maxEdges) {
          ++rep.skipped;
          continue;
        }
        TreeVec g = graft(sigma, a, tau);
        if (basis.escape(g)) {
          ++rep.skipped;
          continue;
        }
        TreeVec rhs = graft(mStar.apply(sigma), a, mCircStar.apply(tau));
        if (basis.escape(rhs)) {
          ++rep.skipped;
          continue;
        }
        TreeVec lhs = mCircStar.apply(g);
        ++rep.checked;
        if (lhs != rhs) {
          rep.holds = false;
          detail::note(rep.counterexample,
                       "intertwining fails at sigma = " + print_tree(sigma, sig) + ", a = " +
                           print_label(a, sig) + ", tau = " + print_tree(tau, sig));
        }
      }
    }
  }
  return rep;
}

// (M°)* I_a(sigma) = I_a(M* sigma) on planted basis trees whose bodies also
// lie in the basis.
inline bool mcirc_star_planted_identity(const LinMap& mStar, const LinMap& mCircStar,
                                        const GradedBasis& basis, const Signature& sig,
                                        std::string* counterexample = nullptr) {
  for (const auto& t : basis.trees()) {
    if (!is_planted_tree(t)) continue;
    const Child& c = t.children.front();
    if (!basis.contains(c.sub)) continue;
    TreeVec rhs;
    TreeVec ms = mStar.apply(c.sub);
    for (const auto& [s, w] : ms.terms()) rhs.add(planted(c.label, s, sig), w);
    if (basis.escape(rhs)) continue;  // wrapped image leaves the window
    TreeVec lhs = mCircStar.apply(t);
    if (lhs != rhs) {
      if (counterexample) *counterexample = print_tree(t, sig);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Graft-peeling extensions in the zero-decoration sector. There the graft
// sigma graft_a tau' contains the root attachment with coefficient one and
// otherwise only trees with fewer root branches, so a value assigned on
// single-node trees extends uniquely along
//
//   V(sigma graft_a tau') = step(sigma) graft_a V(tau'),
//
// with step(sigma) = sigma for the dual-preparation extension and
// step(sigma) = V(sigma) for the morphism extension.

namespace detail {

inline TreeVec graft_extend(const DecoratedTree& tau,
                            const std::map<DecoratedTree, TreeVec, TreeLess>& seeds, bool mapLeft,
                            const Signature& sig,
                            std::map<DecoratedTree, TreeVec, TreeLess>& memo, unsigned depth) {
  if (depth > 64) throw std::logic_error("graft peeling recursion ran away");
  DecoratedTree t = canonicalize(tau);
  if (auto it = memo.find(t); it != memo.end()) return it->second;
  if (deco_total(t) != 0 || deriv_total(t) != 0)
    throw std::invalid_argument("graft peeling needs the zero-decoration sector");
  TreeVec out;
  if (t.children.empty()) {
    auto it = seeds.find(t);
    if (it == seeds.end())
      throw std::invalid_argument("graft peeling has no seed for " + print_tree(t, sig));
    out = it->second;
  } else {
    DecoratedTree body = t;
    Child branch = body.children.back();
    body.children.pop_back();
    body = canonicalize(body);
    TreeVec left = mapLeft ? graft_extend(branch.sub, seeds, mapLeft, sig, memo, depth + 1)
                           : TreeVec(branch.sub);
    TreeVec right = graft_extend(body, seeds, mapLeft, sig, memo, depth + 1);
    out = graft(left, branch.label, right);
    TreeVec raw = graft(branch.sub, branch.label, body);
    for (const auto& [mu, c] : raw.terms()) {
      if (cmp(mu, t) == 0) continue;
      out -= graft_extend(mu, seeds, mapLeft, sig, memo, depth + 1) * c;
    }
  }
  memo.emplace(std::move(t), out);
  return out;
}

}  // namespace detail

inline TreeMap dual_from_seeds(const std::map<DecoratedTree, TreeVec, TreeLess>& seeds,
                               const Signature& sig) {
  return [seeds, &sig](const DecoratedTree& t) {
    std::map<DecoratedTree, TreeVec, TreeLess> memo;
    return detail::graft_extend(t, seeds, false, sig, memo, 0);
  };
}

inline TreeMap morphism_from_seeds(const std::map<DecoratedTree, TreeVec, TreeLess>& seeds,
                                   const Signature& sig) {
  return [seeds, &sig](const DecoratedTree& t) {
    std::map<DecoratedTree, TreeVec, TreeLess> memo;
    return detail::graft_extend(t, seeds, true, sig, memo, 0);
  };
}

// Forward matrix of a dual map on a basis closed under content removal: only
// in-basis coefficients of the dual columns matter for the transposition.
inline LinMap forward_from_dual(const TreeMap& dual, const GradedBasis& basis) {
  LinMap columns(&basis);
  for (std::size_t j = 0; j < basis.size(); ++j)
    columns.set_column(j, truncate_to_basis(dual(basis.tree(j)), basis));
  return adjoint(columns);
}

// ---------------------------------------------------------------------------
// Round trips between the two presentations in the zero-decoration sector.
struct RoundTripReport {
  bool dualRecovered = true;       // dual -> M -> M* -> peel recovers the dual map
  bool morphismRecovered = true;   // the reconstructed M* matches the one peeled from
  bool reconstructionIsMorphism = true;
  std::size_t checked = 0;
  std::string counterexample;
};

// Starting from the character family: R* -> M -> A = M*, peel A's generator
// values back into a dual map, rebuild M from it, and compare both ways.
inline RoundTripReport bck_roundtrip(const Character& ell, const GradedBasis& basis,
                                     const Signature& sig,
                                     const std::vector<EdgeLabel>& labels) {
  RoundTripReport rep;
  TreeMap rstar = bphz_rstar_map(ell);
  TreeMap forward = bphz_forward_map(ell, sig);
  LinMap M = renorm_matrix(forward, basis, sig);
  LinMap A = adjoint(M);

  std::map<DecoratedTree, TreeVec, TreeLess> seeds;
  for (const auto& t : basis.trees())
    if (t.children.empty()) seeds.emplace(t, A.apply(t));
  TreeMap peeled = dual_from_seeds(seeds, sig);

  for (const auto& t : basis.trees()) {
    ++rep.checked;
    if (truncate_to_basis(peeled(t), basis) != truncate_to_basis(rstar(t), basis)) {
      rep.dualRecovered = false;
      detail::note(rep.counterexample, "peeled dual map differs at " + print_tree(t, sig));
    }
  }

  LinMap forward2 = forward_from_dual(peeled, basis);
  LinMap M2 = renorm_matrix([&](const DecoratedTree& t) { return forward2.apply(t); }, basis, sig);
  LinMap A2 = adjoint(M2);
  if (!(A2 == A)) {
    rep.morphismRecovered = false;
    detail::note(rep.counterexample, "rebuilt adjoint differs from the original");
  }

  std::vector<MultiIndex> raises{MultiIndex(sig.dim())};
  rep.reconstructionIsMorphism =
      check_good_morphism(A2, basis, labels, raises, sig, &peeled).good();
  return rep;
}

// Starting from an arbitrary single-node assignment: peel a dual map out of
// it, rebuild M, and require its adjoint to be a good morphism that agrees
// with the morphism extension of the same seeds.
inline RoundTripReport bck_seed_roundtrip(const std::map<DecoratedTree, TreeVec, TreeLess>& seeds,
                                          const GradedBasis& basis, const Signature& sig,
                                          const std::vector<EdgeLabel>& labels) {
  RoundTripReport rep;
  TreeMap dual = dual_from_seeds(seeds, sig);
  LinMap forward = forward_from_dual(dual, basis);
  LinMap M = renorm_matrix([&](const DecoratedTree& t) { return forward.apply(t); }, basis, sig);
  LinMap A = adjoint(M);

  std::vector<MultiIndex> raises{MultiIndex(sig.dim())};
  rep.reconstructionIsMorphism = check_good_morphism(A, basis, labels, raises, sig, &dual).good();

  TreeMap extension = morphism_from_seeds(seeds, sig);
  for (const auto& t : basis.trees()) {
    ++rep.checked;
    if (A.apply(t) != truncate_to_basis(extension(t), basis)) {
      rep.morphismRecovered = false;
      detail::note(rep.counterexample,
                   "adjoint differs from the morphism extension at " + print_tree(t, sig));
    }
  }
  return rep;
}

}  // namespace grove
