#pragma once

// Preparation maps: perturbations R of the identity whose off-diagonal terms
// have no smaller degree, strictly fewer edges and strictly fewer noises, and
// which commute with the coproduct. The distinguished family subtracts
// character-weighted negative content through the star product,
//
//   R*_ell(tau) = sum_{sigma in B^-} ell(sigma)/S(sigma) . tau * sigma,
//
// the sigma = 1 term contributing tau itself. The forward map is the dual:
// its entry at (tau', tau) is S(tau)/S(tau') times the coefficient of tau in
// R*(tau'). It is evaluated without any ambient basis by reversing content
// extraction: candidates come from capped cuts of tau whose reduced part lies
// in the support of ell, with the exact weight recovered from the duality
// pairing exactly as for the coproduct.

#include "grove/character.hpp"
#include "grove/coproduct.hpp"
#include "grove/linmap.hpp"
#include "grove/parallel.hpp"
#include "grove/parse.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace grove {

// A linear map given pointwise on trees, extended linearly on demand.
using TreeMap = std::function<TreeVec(const DecoratedTree&)>;

inline TreeVec apply_map(const TreeMap& f, const TreeVec& v) {
  TreeVec out;
  for (const auto& [t, c] : v.terms()) out += f(t) * c;
  return out;
}

inline TreeMap identity_map() {
  return [](const DecoratedTree& t) { return TreeVec(canonicalize(t)); };
}

// Caches results per tree.  Worth it whenever the same map is applied across
// overlapping products; a duplicate compute under contention is harmless.
// Insertion stops at maxEntries so scans over huge products stay in memory;
// later misses simply recompute.
inline TreeMap memoized(TreeMap f, std::size_t maxEntries = std::size_t{1} << 17) {
  auto cache = std::make_shared<std::map<DecoratedTree, TreeVec, TreeLess>>();
  auto guard = std::make_shared<std::mutex>();
  return [f = std::move(f), cache, guard, maxEntries](const DecoratedTree& t) {
    {
      std::scoped_lock lock(*guard);
      auto it = cache->find(t);
      if (it != cache->end()) return it->second;
    }
    TreeVec v = f(t);
    std::scoped_lock lock(*guard);
    if (cache->size() < maxEntries) return cache->emplace(t, std::move(v)).first->second;
    return v;
  };
}

// ---------------------------------------------------------------------------
// The character-driven family.

// Perturbation part alone: bphz_rstar minus the identity.
inline TreeVec bphz_rstar_delta(const Character& ell, const DecoratedTree& tau) {
  TreeVec out;
  for (const auto& [sigma, value] : ell.values()) {
    if (is_unit(sigma) || value.is_zero()) continue;
    out += star(tau, sigma) * (value / symmetry_factor(sigma));
  }
  return out;
}

inline TreeVec bphz_rstar_delta(const Character& ell, const TreeVec& v) {
  TreeVec out;
  for (const auto& [sigma, value] : ell.values()) {
    if (is_unit(sigma) || value.is_zero()) continue;
    out += star(v, sigma) * (value / symmetry_factor(sigma));
  }
  return out;
}

inline TreeVec bphz_rstar(const Character& ell, const DecoratedTree& tau) {
  TreeVec out{canonicalize(tau)};
  out += bphz_rstar_delta(ell, tau);
  return out;
}

inline TreeVec bphz_rstar(const Character& ell, const TreeVec& v) {
  TreeVec out;
  for (const auto& [t, c] : v.terms()) out += bphz_rstar(ell, t) * c;
  return out;
}

inline TreeMap bphz_rstar_map(const Character& ell) {
  return [ell](const DecoratedTree& t) { return bphz_rstar(ell, t); };
}

inline TreeMap bphz_rstar_delta_map(const Character& ell) {
  return [ell](const DecoratedTree& t) { return bphz_rstar_delta(ell, t); };
}

// Dual forward map. Every output tree arises by cutting the support tree's
// content out of tau; shifts on cut edges and on a handed-over noise are
// bounded by the support's decoration totals, since a deformed attachment
// consumes exactly that much decoration.
inline TreeVec bphz_forward(const Character& ell, const DecoratedTree& tau, const Signature& sig) {
  DecoratedTree t = canonicalize(tau);
  std::map<DecoratedTree, Scalar, TreeLess> supp;
  std::uint32_t cap = 0;
  for (const auto& [sigma, value] : ell.values()) {
    if (is_unit(sigma) || value.is_zero()) continue;
    supp.emplace(sigma, value);
    cap = std::max<std::uint32_t>(cap, static_cast<std::uint32_t>(deco_total(sigma)));
  }
  TreeVec out{t};
  if (supp.empty()) return out;
  for (const auto& [red, ext] : split_candidates(t, sig, cap)) {
    auto it = supp.find(red);
    if (it == supp.end()) continue;
    Scalar pairing = inner_product(star(ext, red), t);
    if (pairing.is_zero()) continue;
    Rat denom = symmetry_factor(ext) * symmetry_factor(red);
    out += TreeVec(ext) * (it->second * (pairing / denom));
  }
  return out;
}

inline TreeMap bphz_forward_map(const Character& ell, const Signature& sig) {
  return [ell, &sig](const DecoratedTree& t) { return bphz_forward(ell, t, sig); };
}

// ---------------------------------------------------------------------------
// Axiom checks.

struct PreparationRecord {
  bool degreeCondition = true;   // off-diagonal terms have degree >= the input's
  bool edgeCondition = true;     // ... strictly fewer edges
  bool noiseCondition = true;    // ... strictly fewer noises
  bool commutes = true;          // (R (x) id) Delta = Delta R
  bool rightMorphism = true;     // R*(sigma * tau) = sigma * R*(tau), sigma in the positive sector
  bool strong = true;            // the same for every left factor
  std::size_t shapeChecked = 0;
  std::size_t commuteChecked = 0;
  std::size_t morphismChecked = 0;
  std::size_t strongChecked = 0;
  std::optional<unsigned> nilpotency;  // least n with (R - Id)^n = 0 on the checked trees
  std::string counterexample;          // first failing instance
  bool preparation() const {
    return degreeCondition && edgeCondition && noiseCondition && commutes;
  }
};

// A preparation map is carried around as its forward matrix plus the record
// earned on the basis it was certified on.
struct PreparationMap {
  LinMap forward;
  PreparationRecord record;
};

namespace detail {
inline void note(std::string& slot, const std::string& msg) {
  if (slot.empty()) slot = msg;
}
}  // namespace detail

inline void check_perturbation_shape(const TreeMap& forward, const std::vector<DecoratedTree>& taus,
                                     const Signature& sig, PreparationRecord& rec) {
  for (const auto& tau : taus) {
    TreeVec diff = forward(tau);
    diff.add(tau, Scalar(-1));
    Rat d = degree(tau, sig);
    for (const auto& [t, c] : diff.terms()) {
      (void)c;
      if (degree(t, sig) < d) {
        rec.degreeCondition = false;
        detail::note(rec.counterexample,
                     "degree drops from " + print_tree(tau, sig) + " to " + print_tree(t, sig));
      }
      if (!(edge_count(t) < edge_count(tau))) {
        rec.edgeCondition = false;
        detail::note(rec.counterexample,
                     "edge count does not drop from " + print_tree(tau, sig) + " to " + print_tree(t, sig));
      }
      if (!(noise_count(t) < noise_count(tau))) {
        rec.noiseCondition = false;
        detail::note(rec.counterexample,
                     "noise count does not drop from " + print_tree(tau, sig) + " to " + print_tree(t, sig));
      }
    }
    ++rec.shapeChecked;
  }
}

inline bool commutation_holds(const TreeMap& forward, const DecoratedTree& mu, const Signature& sig) {
  TensorVec lhs;
  TensorVec dmu = coproduct(mu, sig);
  for (const auto& [pair, c] : dmu.terms()) {
    TreeVec mapped = forward(pair.first);
    for (const auto& [t, w] : mapped.terms()) lhs.add(t, pair.second, c * w);
  }
  TensorVec rhs = coproduct(forward(mu), sig);
  return lhs == rhs;
}

inline bool right_morphism_holds(const TreeMap& rstar, const DecoratedTree& sigma,
                                 const DecoratedTree& tau) {
  TreeVec lhs = apply_map(rstar, star(sigma, tau));
  TreeVec rhs = star(sigma, rstar(tau));
  return lhs == rhs;
}

// Perturbation part of an arbitrary pointwise family.
inline TreeMap delta_of(const TreeMap& rstar) {
  return [rstar](const DecoratedTree& t) {
    TreeVec v = rstar(t);
    v -= TreeVec(canonicalize(t));
    return v;
  };
}

// Same condition with the identity parts cancelled: both sides of the
// morphism equation contain the bare product once, so only the perturbation
// images need comparing.  Far cheaper when most product terms die under the
// perturbation.
inline bool right_morphism_holds_delta(const TreeMap& delta, const DecoratedTree& sigma,
                                       const DecoratedTree& tau, const TreeVec& deltaTau) {
  TreeVec lhs = apply_map(delta, star(sigma, tau));
  TreeVec rhs = star(sigma, deltaTau);
  return lhs == rhs;
}

// Least n <= cap with (R - Id)^n tau = 0 for every supplied tau, computed
// functionally so no basis closure is needed.
inline std::optional<unsigned> preparation_nilpotency(const TreeMap& forward,
                                                      const std::vector<DecoratedTree>& taus,
                                                      unsigned cap) {
  unsigned worst = 1;
  for (const auto& tau : taus) {
    TreeVec v{canonicalize(tau)};
    unsigned n = 0;
    while (!v.is_zero()) {
      if (n >= cap) return std::nullopt;
      TreeVec next = apply_map(forward, v);
      next -= v;
      v = next;
      ++n;
    }
    worst = std::max(worst, n);
  }
  return worst;
}

// Full certified-axiom record: shape on every tau, commutation on every tau,
// right-morphism over lefts restricted to the positive sector, strength over
// all lefts, plus the functional nilpotency order (the noise condition makes
// (R - Id) kill one noise per application, so the order is at most
// 1 + max noise count when the axioms hold).
inline PreparationRecord check_preparation(const TreeMap& forward, const TreeMap& rstar,
                                           const TreeMap& rstarDelta,
                                           const std::vector<DecoratedTree>& taus,
                                           const std::vector<DecoratedTree>& lefts,
                                           const Signature& sig, unsigned nilpotencyCap = 0) {
  (void)rstar;
  PreparationRecord rec;
  check_perturbation_shape(forward, taus, sig, rec);

  std::vector<std::uint8_t> ok(taus.size(), 1);
  parallel_for(taus.size(), [&](std::size_t i) { ok[i] = commutation_holds(forward, taus[i], sig); });
  for (std::size_t i = 0; i < taus.size(); ++i) {
    ++rec.commuteChecked;
    if (!ok[i]) {
      rec.commutes = false;
      detail::note(rec.counterexample, "coproduct commutation fails at " + print_tree(taus[i], sig));
    }
  }

  std::vector<TreeVec> deltaTaus(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) { deltaTaus[i] = rstarDelta(taus[i]); });
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t s = 0; s < lefts.size(); ++s)
    for (std::size_t t = 0; t < taus.size(); ++t) pairs.emplace_back(s, t);
  std::vector<std::uint8_t> pok(pairs.size(), 1);
  parallel_for(pairs.size(), [&](std::size_t i) {
    pok[i] = right_morphism_holds_delta(rstarDelta, lefts[pairs[i].first], taus[pairs[i].second],
                                        deltaTaus[pairs[i].second]);
  });
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const DecoratedTree& sigma = lefts[pairs[i].first];
    const DecoratedTree& tau = taus[pairs[i].second];
    bool positive = in_positive_sector(sigma, sig);
    if (positive) ++rec.morphismChecked;
    ++rec.strongChecked;
    if (!pok[i]) {
      rec.strong = false;
      if (positive) {
        rec.rightMorphism = false;
        detail::note(rec.counterexample, "right star morphism fails at sigma = " +
                                             print_tree(sigma, sig) + ", tau = " + print_tree(tau, sig));
      }
    }
  }

  if (nilpotencyCap > 0) rec.nilpotency = preparation_nilpotency(forward, taus, nilpotencyCap);
  return rec;
}

inline PreparationRecord check_preparation(const TreeMap& forward, const TreeMap& rstar,
                                           const std::vector<DecoratedTree>& taus,
                                           const std::vector<DecoratedTree>& lefts,
                                           const Signature& sig, unsigned nilpotencyCap = 0) {
  return check_preparation(forward, rstar, delta_of(rstar), taus, lefts, sig, nilpotencyCap);
}

// ---------------------------------------------------------------------------
// Two-sided equivalence: the coproduct commutation and the adjoint right
// morphism stand or fall together; the report keeps both verdicts so that
// the agreement itself can be asserted, on honest maps and on broken ones.
struct CommutationEquivalence {
  bool commutes = true;
  bool rightMorphism = true;
  std::size_t checked = 0;
  bool agree() const { return commutes == rightMorphism; }
};

inline CommutationEquivalence commutation_equivalence(const TreeMap& forward, const TreeMap& rstar,
                                                      const std::vector<DecoratedTree>& taus,
                                                      const std::vector<DecoratedTree>& lefts,
                                                      const Signature& sig) {
  CommutationEquivalence eq;
  for (const auto& mu : taus) {
    if (!commutation_holds(forward, mu, sig)) eq.commutes = false;
    ++eq.checked;
  }
  for (const auto& sigma : lefts) {
    if (!in_positive_sector(sigma, sig)) continue;
    for (const auto& tau : taus) {
      if (!right_morphism_holds(rstar, sigma, tau)) eq.rightMorphism = false;
      ++eq.checked;
    }
  }
  return eq;
}

// ---------------------------------------------------------------------------
// Graft and raise compatibility of the dual map: R*(sigma graft_a tau) =
// sigma graft_a (R* tau), and R*(up^k tau) = up^k (R* tau) where the left
// raise runs over the nodes of tau and the right raise over the node set of
// each output tree separately.
struct SpecialIdentityReport {
  bool graftCompatible = true;
  bool raiseCompatible = true;
  std::size_t checked = 0;
  std::string counterexample;
};

inline SpecialIdentityReport check_special_identities(const TreeMap& rstarDelta,
                                                      const std::vector<DecoratedTree>& sigmas,
                                                      const std::vector<EdgeLabel>& labels,
                                                      const std::vector<DecoratedTree>& taus,
                                                      const std::vector<MultiIndex>& raises,
                                                      const Signature& sig) {
  // Grafts and raises are linear, so the identity part of the family drops
  // out of both sides and only the perturbation images are compared.
  SpecialIdentityReport rep;
  std::vector<TreeVec> deltaTaus(taus.size());
  parallel_for(taus.size(), [&](std::size_t i) { deltaTaus[i] = rstarDelta(taus[i]); });
  for (const auto& sigma : sigmas) {
    for (const auto& a : labels) {
      if (a.type.kind == TypeKind::Noise && !is_unit(sigma)) continue;
      for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        const DecoratedTree& tau = taus[ti];
        TreeVec lhs = apply_map(rstarDelta, graft(sigma, a, tau));
        TreeVec rhs = graft(TreeVec(sigma), a, deltaTaus[ti]);
        ++rep.checked;
        if (lhs != rhs) {
          rep.graftCompatible = false;
          detail::note(rep.counterexample,
                       "graft compatibility fails at sigma = " + print_tree(sigma, sig) + ", a = " +
                           print_label(a, sig) + ", tau = " + print_tree(tau, sig));
        }
      }
    }
  }
  for (const auto& k : raises) {
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
      const DecoratedTree& tau = taus[ti];
      TreeVec lhs = apply_map(rstarDelta, raise_all(tau, k));
      TreeVec rhs = raise_all(deltaTaus[ti], k);
      ++rep.checked;
      if (lhs != rhs) {
        rep.raiseCompatible = false;
        detail::note(rep.counterexample, "raise compatibility fails at k = " + k.str() +
                                             ", tau = " + print_tree(tau, sig));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Rank-one bumps, used for negative controls and the search below. The
// adjoint carries the transposed pairing weight: for P = c e_{to,from},
// P* to = c S(to)/S(from) from.
inline TreeMap add_rank_one(const TreeMap& base, const DecoratedTree& from, const DecoratedTree& to,
                            const Scalar& coeff) {
  DecoratedTree f = canonicalize(from), t = canonicalize(to);
  return [base, f, t, coeff](const DecoratedTree& in) {
    TreeVec v = base(in);
    if (cmp(canonicalize(in), f) == 0) v.add(t, coeff);
    return v;
  };
}

inline TreeMap add_rank_one_adjoint(const TreeMap& base, const DecoratedTree& from,
                                    const DecoratedTree& to, const Scalar& coeff) {
  DecoratedTree f = canonicalize(from), t = canonicalize(to);
  Rat ratio = symmetry_factor(t) / symmetry_factor(f);
  return [base, f, t, coeff, ratio](const DecoratedTree& in) {
    TreeVec v = base(in);
    if (cmp(canonicalize(in), t) == 0) v.add(f, coeff * ratio);
    return v;
  };
}

// R tau = tau on planted and polynomial trees. Holds for the character family
// when every support tree carries a noise at its root, since extraction then
// cannot leave a bare-rooted tree behind.
inline bool is_planted_tree(const DecoratedTree& t) {
  return !t.noise && t.deco.is_zero() && t.children.size() == 1;
}
inline bool is_polynomial_tree(const DecoratedTree& t) { return !t.noise && t.children.empty(); }

inline bool fixes_planted(const TreeMap& forward, const std::vector<DecoratedTree>& taus,
                          const Signature& sig, std::string* counterexample = nullptr) {
  for (const auto& tau : taus) {
    if (!is_planted_tree(tau) && !is_polynomial_tree(tau)) continue;
    if (forward(tau) != TreeVec(canonicalize(tau))) {
      if (counterexample) *counterexample = print_tree(tau, sig);
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Search harness over rank-one perturbations of the identity with a formal
// coefficient: tallies which candidates satisfy the preparation axioms on the
// supplied window and which of those are strong there. Whether non-strong
// preparation maps exist is open; this reports findings and asserts nothing.
struct NonStrongSearchResult {
  std::size_t candidates = 0;
  std::size_t preparations = 0;
  std::size_t strongOnes = 0;
  std::vector<std::string> nonStrongWitnesses;
};

inline NonStrongSearchResult search_non_strong(const std::vector<DecoratedTree>& window,
                                               const Signature& sig,
                                               std::size_t maxCandidates = 200) {
  NonStrongSearchResult res;
  Scalar lambda = Scalar::symbol("lambda");
  for (const auto& from : window) {
    for (const auto& to : window) {
      if (cmp(from, to) == 0) continue;
      if (!(edge_count(to) < edge_count(from))) continue;
      if (!(noise_count(to) < noise_count(from))) continue;
      if (degree(to, sig) < degree(from, sig)) continue;
      if (res.candidates >= maxCandidates) return res;
      ++res.candidates;
      TreeMap fwd = add_rank_one(identity_map(), from, to, lambda);
      TreeMap rst = add_rank_one_adjoint(identity_map(), from, to, lambda);
      bool commutes = true;
      for (const auto& mu : window)
        if (!commutation_holds(fwd, mu, sig)) {
          commutes = false;
          break;
        }
      if (!commutes) continue;
      ++res.preparations;
      bool strong = true;
      std::string witness;
      for (const auto& sigma : window) {
        for (const auto& tau : window) {
          if (!right_morphism_holds(rst, sigma, tau)) {
            strong = false;
            witness = "bump " + print_tree(from, sig) + " -> " + print_tree(to, sig) +
                      " breaks strength at sigma = " + print_tree(sigma, sig) +
                      ", tau = " + print_tree(tau, sig);
            break;
          }
        }
        if (!strong) break;
      }
      if (strong)
        ++res.strongOnes;
      else
        res.nonStrongWitnesses.push_back(witness);
    }
  }
  return res;
}

}  // namespace grove
