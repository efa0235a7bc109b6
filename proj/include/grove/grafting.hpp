#pragma once

// Deformed grafting and the star product.
//
//   graft(sigma, a, tau)  =  sum_{v in N_tau} sum_m binom(n_v, m)
//                            [sigma attached at v by edge a - m, n_v lowered by m]
//
// Terms where a - m would go negative are dropped, as are terms that would put
// a second noise edge on a node. Noise-typed labels require sigma = 1 and set
// the node's noise field.
//
//   multi_graft(F, tau)   grafts every pair of F onto the *original* nodes of
//                         tau, independently (equal to iterated single grafts
//                         restricted to attachment points in the original tau;
//                         simultaneous lowerings at one node compose to the
//                         multinomial).
//
//   star(sigma, tau)      = raise_{N_tau}^k ( multi_graft(factors(sigma), tau) )
//                         for sigma = X^k zeta_l prod I_{a_i}(sigma_i); the
//                         noise factor joins the planted forest, and the raise
//                         runs over the original tau nodes only. Associative.
//
// All operations are pure and extend bilinearly to TreeVec.

#include "grove/scalar.hpp"
#include "grove/signature.hpp"
#include "grove/tree.hpp"
#include "grove/treevec.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace grove {

// Planted forest: the (a_i, sigma_i) factors of a star/multi-graft left hand
// side. At most one noise-typed pair, and it must carry the trivial tree.
using PlantedForest = std::vector<Child>;

inline void validate_forest(const PlantedForest& f) {
  std::size_t noise_pairs = 0;
  for (const auto& p : f) {
    if (p.label.type.kind == TypeKind::Noise) {
      ++noise_pairs;
      DecoratedTree leaf{MultiIndex(p.label.deriv.dim()), std::nullopt, {}};
      if (cmp(p.sub, leaf) != 0)
        throw std::invalid_argument("planted forest: noise-typed pair must carry the trivial tree");
    }
  }
  if (noise_pairs > 1) throw std::invalid_argument("planted forest: more than one noise-typed pair");
}

namespace detail {

// Planar working copy of a tree. The original nodes ("skeleton") stay at fixed
// indices in canonical preorder (root = 0) while grafted branches accumulate
// in extras; canonical form is restored only on rebuild.
struct WorkTree {
  struct Node {
    MultiIndex deco;
    std::optional<EdgeLabel> noise;
    std::vector<std::pair<EdgeLabel, std::size_t>> skel;  // original children
    std::vector<Child> extras;                            // grafted branches
  };
  std::vector<Node> nodes;

  static WorkTree flatten(const DecoratedTree& t) {
    WorkTree w;
    w.push(t);
    return w;
  }

  std::size_t push(const DecoratedTree& t) {
    std::size_t idx = nodes.size();
    nodes.push_back(Node{t.deco, t.noise, {}, {}});
    for (const auto& c : t.children) {
      std::size_t ci = push(c.sub);
      nodes[idx].skel.emplace_back(c.label, ci);
    }
    return idx;
  }

  DecoratedTree rebuild(std::size_t idx = 0) const {
    const Node& n = nodes[idx];
    DecoratedTree t{n.deco, n.noise, {}};
    t.children.reserve(n.skel.size() + n.extras.size());
    for (const auto& [lab, ci] : n.skel) t.children.push_back(Child{lab, rebuild(ci)});
    for (const auto& e : n.extras) t.children.push_back(e);
    std::sort(t.children.begin(), t.children.end(),
              [](const Child& a, const Child& b) { return cmp(a, b) < 0; });
    return t;
  }
};

// Places every factor at every (node, lowering) choice, then distributes the
// raise k over the skeleton. Grafted subtrees must already be canonical.
inline void star_core(const PlantedForest& factors, const DecoratedTree& tau, const MultiIndex& k,
                      TreeVec& out, const Scalar& weight) {
  WorkTree base = WorkTree::flatten(tau);
  std::function<void(std::size_t, WorkTree&, const Rat&)> place = [&](std::size_t fi, WorkTree& w, const Rat& coeff) {
    if (fi == factors.size()) {
      // raise^k over the original node set, with the composition multinomial
      for_each_composition(k, w.nodes.size(), [&](const std::vector<MultiIndex>& parts) {
        WorkTree raised = w;
        Int mult = k.fact();
        for (std::size_t v = 0; v < parts.size(); ++v) {
          raised.nodes[v].deco = raised.nodes[v].deco + parts[v];
          mult /= parts[v].fact();
        }
        out.add(raised.rebuild(), weight * Scalar(coeff * Rat(mult)));
      });
      return;
    }
    const Child& f = factors[fi];
    for (std::size_t v = 0; v < w.nodes.size(); ++v) {
      for_each_below(w.nodes[v].deco, [&](const MultiIndex& m) {
        if (!m.leq(f.label.deriv)) return;  // a - m would be negative
        Int b = w.nodes[v].deco.binom(m);
        EdgeLabel lowered{f.label.type, f.label.deriv - m};
        WorkTree next = w;
        next.nodes[v].deco = next.nodes[v].deco - m;
        if (f.label.type.kind == TypeKind::Noise) {
          if (next.nodes[v].noise) return;  // second noise on one node: term drops
          next.nodes[v].noise = lowered;
        } else {
          next.nodes[v].extras.push_back(Child{lowered, f.sub});
        }
        place(fi + 1, next, coeff * Rat(b));
      });
    }
  };
  WorkTree w = base;
  place(0, w, Rat(1));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// raise: up^k_B tau = sum over k = sum_{v in B} k_v, with multinomial weight
// k!/prod k_v!, of the tree with n(v) raised by k_v. The weight is what makes
// X^k star X^m = X^{k+m} associate with multi-node right factors. B holds
// canonical preorder indices into tau. Empty B with k != 0 gives the zero
// vector; k = 0 gives tau itself.
inline TreeVec raise(const DecoratedTree& tau, const std::vector<std::size_t>& B, const MultiIndex& k) {
  detail::WorkTree w = detail::WorkTree::flatten(tau);
  for (auto v : B)
    if (v >= w.nodes.size()) throw std::out_of_range("raise: node index out of range");
  TreeVec out;
  for_each_composition(k, B.size(), [&](const std::vector<MultiIndex>& parts) {
    detail::WorkTree raised = w;
    Int mult = k.fact();
    for (std::size_t i = 0; i < B.size(); ++i) {
      raised.nodes[B[i]].deco = raised.nodes[B[i]].deco + parts[i];
      mult /= parts[i].fact();
    }
    out.add(raised.rebuild(), Scalar(Rat(mult)));
  });
  return out;
}

// up^k over all nodes of tau.
inline TreeVec raise_all(const DecoratedTree& tau, const MultiIndex& k) {
  std::vector<std::size_t> B(node_count(tau));
  for (std::size_t i = 0; i < B.size(); ++i) B[i] = i;
  return raise(tau, B, k);
}

// Per-tree up^k_{N_t} extended linearly.
inline TreeVec raise_all(const TreeVec& v, const MultiIndex& k) {
  TreeVec out;
  for (const auto& [t, c] : v.terms()) out += raise_all(t, k) * c;
  return out;
}

// ---------------------------------------------------------------------------
// Deformed graft of a single tree along a.
inline TreeVec graft(const DecoratedTree& sigma, const EdgeLabel& a, const DecoratedTree& tau) {
  PlantedForest f{Child{a, sigma}};
  validate_forest(f);
  TreeVec out;
  detail::star_core(f, tau, MultiIndex(a.deriv.dim()), out, Scalar(1));
  return out;
}

inline TreeVec graft(const TreeVec& sigma, const EdgeLabel& a, const TreeVec& tau) {
  TreeVec out;
  for (const auto& [s, cs] : sigma.terms())
    for (const auto& [t, ct] : tau.terms()) out += graft(s, a, t) * (cs * ct);
  return out;
}

// Independent grafts of a whole planted forest onto the original tau nodes.
inline TreeVec multi_graft(const PlantedForest& factors, const DecoratedTree& tau) {
  validate_forest(factors);
  TreeVec out;
  detail::star_core(factors, tau, MultiIndex(tau.deco.dim()), out, Scalar(1));
  return out;
}

// ---------------------------------------------------------------------------
// Star product.
inline TreeVec star(const DecoratedTree& sigma, const DecoratedTree& tau) {
  Decomposition d = decompose(sigma);
  PlantedForest factors = d.factors;
  if (d.noise) {
    // Factor order does not change the sum (per-node budget binomials are
    // symmetric under reordering), but a colliding noise factor placed first
    // kills dead branches before any kernel placement is enumerated.
    DecoratedTree leaf{MultiIndex(d.k.dim()), std::nullopt, {}};
    factors.insert(factors.begin(), Child{*d.noise, leaf});
  }
  TreeVec out;
  detail::star_core(factors, tau, d.k, out, Scalar(1));
  return out;
}

inline TreeVec star(const TreeVec& sigma, const TreeVec& tau) {
  TreeVec out;
  for (const auto& [s, cs] : sigma.terms())
    for (const auto& [t, ct] : tau.terms()) out += star(s, t) * (cs * ct);
  return out;
}

inline TreeVec star(const TreeVec& sigma, const DecoratedTree& tau) { return star(sigma, TreeVec(tau)); }
inline TreeVec star(const DecoratedTree& sigma, const TreeVec& tau) { return star(TreeVec(sigma), tau); }

}  // namespace grove
