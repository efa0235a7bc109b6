#pragma once

// Decorated rooted trees. Non-planar: equality is equality of canonical forms,
// and every constructor in this header returns canonical trees (children
// sorted by edge label, then recursively by subtree).
//
// A node carries a polynomial decoration n(v) and at most one noise edge,
// which always leads to a bare leaf and is stored as the node's noise field.
// Kernel-typed children carry an edge label (type, derivative) and a subtree.
//
// Every tree factors uniquely as X^k * zeta_l * prod_j I_{a_j}(tau_j); the
// unit 1 is the single undecorated node (zeta_0 = 1 by convention).

#include "grove/multiindex.hpp"
#include "grove/rational.hpp"
#include "grove/signature.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace grove {

struct Child;

struct DecoratedTree {
  MultiIndex deco;                   // n(root)
  std::optional<EdgeLabel> noise;    // the root's noise edge, if any
  std::vector<Child> children;       // kernel-typed branches, canonical order
};

struct Child {
  EdgeLabel label;
  DecoratedTree sub;
};

inline int cmp(const DecoratedTree& a, const DecoratedTree& b);

inline int cmp(const EdgeLabel& a, const EdgeLabel& b) {
  if (a.type != b.type) return a.type < b.type ? -1 : 1;
  if (a.deriv != b.deriv) return a.deriv < b.deriv ? -1 : 1;
  return 0;
}

inline int cmp(const Child& a, const Child& b) {
  if (int c = cmp(a.label, b.label)) return c;
  return cmp(a.sub, b.sub);
}

inline int cmp(const DecoratedTree& a, const DecoratedTree& b) {
  if (a.deco != b.deco) return a.deco < b.deco ? -1 : 1;
  if (a.noise.has_value() != b.noise.has_value()) return a.noise.has_value() ? 1 : -1;
  if (a.noise && b.noise)
    if (int c = cmp(*a.noise, *b.noise)) return c;
  if (a.children.size() != b.children.size()) return a.children.size() < b.children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (int c = cmp(a.children[i], b.children[i])) return c;
  return 0;
}

inline bool operator==(const DecoratedTree& a, const DecoratedTree& b) { return cmp(a, b) == 0; }
inline bool operator!=(const DecoratedTree& a, const DecoratedTree& b) { return cmp(a, b) != 0; }

struct TreeLess {
  bool operator()(const DecoratedTree& a, const DecoratedTree& b) const { return cmp(a, b) < 0; }
};

// Sorts children at every node; the representative-independent normal form.
// Idempotent, and invariant under permuting children of any input node.
inline DecoratedTree canonicalize(DecoratedTree t) {
  for (auto& c : t.children) c.sub = canonicalize(std::move(c.sub));
  std::sort(t.children.begin(), t.children.end(), [](const Child& a, const Child& b) { return cmp(a, b) < 0; });
  return t;
}

// Checks all multi-index dimensions and structural invariants against sig.
inline void validate(const DecoratedTree& t, const Signature& sig) {
  if (t.deco.dim() != sig.dim()) throw std::invalid_argument("tree: node decoration dimension mismatch");
  if (t.noise) {
    if (t.noise->type.kind != TypeKind::Noise) throw std::invalid_argument("tree: noise field with kernel type");
    if (t.noise->deriv.dim() != sig.dim()) throw std::invalid_argument("tree: noise derivative dimension mismatch");
    sig.type(t.noise->type);
  }
  for (const auto& c : t.children) {
    if (c.label.type.kind != TypeKind::Kernel) throw std::invalid_argument("tree: child edge with noise type");
    if (c.label.deriv.dim() != sig.dim()) throw std::invalid_argument("tree: edge derivative dimension mismatch");
    sig.type(c.label.type);
    validate(c.sub, sig);
  }
}

inline bool is_canonical(const DecoratedTree& t) {
  for (std::size_t i = 0; i + 1 < t.children.size(); ++i)
    if (cmp(t.children[i], t.children[i + 1]) > 0) return false;
  for (const auto& c : t.children)
    if (!is_canonical(c.sub)) return false;
  return true;
}

// --- constructors ---------------------------------------------------------

inline DecoratedTree unit_tree(const Signature& sig) {
  return DecoratedTree{sig.zero_index(), std::nullopt, {}};
}

inline DecoratedTree poly_tree(const MultiIndex& k) { return DecoratedTree{k, std::nullopt, {}}; }

inline bool is_unit(const DecoratedTree& t) {
  return !t.noise && t.deco.is_zero() && t.children.empty();
}

inline DecoratedTree noise_tree(const Signature& sig, std::uint16_t noiseIndex) {
  return DecoratedTree{sig.zero_index(), EdgeLabel{TypeId{TypeKind::Noise, noiseIndex}, sig.zero_index()}, {}};
}

inline DecoratedTree planted(const EdgeLabel& a, DecoratedTree sub, const Signature& sig) {
  if (a.type.kind == TypeKind::Noise) {
    // A planted noise edge is the noise factor itself and requires a bare sub.
    DecoratedTree leaf{sig.zero_index(), std::nullopt, {}};
    if (cmp(sub, leaf) != 0) throw std::invalid_argument("planted: noise edge must carry the trivial tree");
    return DecoratedTree{sig.zero_index(), a, {}};
  }
  DecoratedTree t{sig.zero_index(), std::nullopt, {}};
  t.children.push_back(Child{a, std::move(sub)});
  return t;
}

// --- structural measures ---------------------------------------------------

inline std::uint32_t noise_count(const DecoratedTree& t) {
  std::uint32_t n = t.noise ? 1 : 0;
  for (const auto& c : t.children) n += noise_count(c.sub);
  return n;
}

// Edges of the formal tree: kernel edges and noise edges both count.
inline std::uint32_t edge_count(const DecoratedTree& t) {
  std::uint32_t n = t.noise ? 1 : 0;
  for (const auto& c : t.children) n += 1 + edge_count(c.sub);
  return n;
}

inline std::uint32_t node_count(const DecoratedTree& t) {
  std::uint32_t n = 1;
  for (const auto& c : t.children) n += node_count(c.sub);
  return n;
}

inline std::uint64_t deco_total(const DecoratedTree& t) {
  std::uint64_t n = t.deco.total();
  for (const auto& c : t.children) n += deco_total(c.sub);
  return n;
}

inline std::uint64_t deriv_total(const DecoratedTree& t) {
  std::uint64_t n = t.noise ? t.noise->deriv.total() : 0;
  for (const auto& c : t.children) n += c.label.deriv.total() + deriv_total(c.sub);
  return n;
}

// deg(tau) = sum_v |n(v)|_s + sum_e (|t(e)|_s - |p(e)|_s), noise edges included.
inline Rat degree(const DecoratedTree& t, const Signature& sig) {
  Rat d = sig.weighted(t.deco);
  if (t.noise) d += sig.edge_degree(*t.noise);
  for (const auto& c : t.children) d += sig.edge_degree(c.label) + degree(c.sub, sig);
  return d;
}

// S(tau) = k! * prod_j S(tau_j)^{beta_j} * beta_j!, grouping equal branches
// (a_j, tau_j). The noise edge contributes no factor. Requires canonical form
// so that equal branches are adjacent.
inline Rat symmetry_factor(const DecoratedTree& t) {
  Rat s(t.deco.fact());
  std::size_t i = 0;
  while (i < t.children.size()) {
    std::size_t j = i;
    while (j < t.children.size() && cmp(t.children[i], t.children[j]) == 0) ++j;
    const auto beta = static_cast<unsigned>(j - i);
    Rat sub = symmetry_factor(t.children[i].sub);
    for (unsigned b = 0; b < beta; ++b) s *= sub;
    s *= Rat(factorial_int(beta));
    i = j;
  }
  return s;
}

// --- product and decomposition --------------------------------------------

// Root-join product: adds decorations, merges branch multisets. At most one
// noise per node, so two noised roots do not multiply.
inline DecoratedTree tree_product(const DecoratedTree& a, const DecoratedTree& b) {
  if (a.noise && b.noise) throw std::invalid_argument("tree_product: both factors carry a root noise");
  DecoratedTree r;
  r.deco = a.deco + b.deco;
  r.noise = a.noise ? a.noise : b.noise;
  r.children.reserve(a.children.size() + b.children.size());
  r.children.insert(r.children.end(), a.children.begin(), a.children.end());
  r.children.insert(r.children.end(), b.children.begin(), b.children.end());
  std::sort(r.children.begin(), r.children.end(), [](const Child& x, const Child& y) { return cmp(x, y) < 0; });
  return r;
}

struct Decomposition {
  MultiIndex k;                      // polynomial part X^k
  std::optional<EdgeLabel> noise;    // zeta factor, if any
  std::vector<Child> factors;        // planted factors I_{a_j}(tau_j)
};

// The unique factorization X^k * zeta_l * prod I_{a_j}(tau_j) of the root.
inline Decomposition decompose(const DecoratedTree& t) {
  return Decomposition{t.deco, t.noise, t.children};
}

inline DecoratedTree recompose(const Decomposition& d) {
  DecoratedTree t{d.k, d.noise, d.factors};
  std::sort(t.children.begin(), t.children.end(), [](const Child& x, const Child& y) { return cmp(x, y) < 0; });
  return t;
}

}  // namespace grove
