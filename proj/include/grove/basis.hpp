#pragma once

// Bounded enumeration of all canonical trees and the graded bases used for
// matrix representations of linear maps.
//
// Bounds are totals over the whole tree. Noise edges count toward maxEdges
// (they are edges of the formal tree, with their own degree contribution).
// Every subtree of an in-bounds tree is in-bounds, so bases are closed under
// taking subtrees and branch removal.

#include "grove/signature.hpp"
#include "grove/tree.hpp"
#include "grove/treevec.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace grove {

struct Bounds {
  std::uint32_t maxNoises = 0;
  std::uint32_t maxEdges = 0;
  std::uint32_t maxDeco = 0;   // total |n(v)| over all nodes
  std::uint32_t maxDeriv = 0;  // total |p(e)| over all edges

  std::string str() const {
    return "noises<=" + std::to_string(maxNoises) + " edges<=" + std::to_string(maxEdges) +
           " deco<=" + std::to_string(maxDeco) + " deriv<=" + std::to_string(maxDeriv);
  }

  bool admits(const DecoratedTree& t) const {
    return noise_count(t) <= maxNoises && edge_count(t) <= maxEdges && deco_total(t) <= maxDeco &&
           deriv_total(t) <= maxDeriv;
  }

  Bounds enlarged() const { return Bounds{maxNoises, maxEdges + 1, maxDeco + 1, maxDeriv + 1}; }
};

// All canonical trees within the bounds, sorted. The enumeration composes a
// root decoration, an optional noise edge and a non-decreasing multiset of
// planted pieces whose subtrees come from the lower edge stratum. sizeCap
// guards against bound explosions.
inline std::vector<DecoratedTree> enumerate_basis(const Signature& sig, const Bounds& b,
                                                  std::size_t sizeCap = 2000000) {
  struct Cost {
    std::uint32_t edges, noises, deco, deriv;
  };
  auto cost_of = [&](const DecoratedTree& t) {
    return Cost{edge_count(t), noise_count(t), static_cast<std::uint32_t>(deco_total(t)),
                static_cast<std::uint32_t>(deriv_total(t))};
  };

  // Stratum 0: bare decorated nodes.
  std::set<DecoratedTree, TreeLess> all;
  for_each_total_le(sig.dim(), b.maxDeco, [&](const MultiIndex& k) { all.insert(poly_tree(k)); });

  std::vector<EdgeLabel> kernel_labels;
  for (std::size_t ki = 0; ki < sig.kernels().size(); ++ki)
    for_each_total_le(sig.dim(), b.maxDeriv, [&](const MultiIndex& p) {
      kernel_labels.push_back(EdgeLabel{TypeId{TypeKind::Kernel, static_cast<std::uint16_t>(ki)}, p});
    });
  std::vector<EdgeLabel> noise_labels;
  for (std::size_t ni = 0; ni < sig.noises().size(); ++ni)
    for_each_total_le(sig.dim(), b.maxDeriv, [&](const MultiIndex& p) {
      noise_labels.push_back(EdgeLabel{TypeId{TypeKind::Noise, static_cast<std::uint16_t>(ni)}, p});
    });

  for (std::uint32_t stratum = 1; stratum <= b.maxEdges; ++stratum) {
    // Pieces whose whole cost (edge included) fits the bounds.
    std::vector<std::pair<Child, Cost>> pieces;
    for (const auto& sub : all)
      for (const auto& lab : kernel_labels) {
        Cost c = cost_of(sub);
        Cost pc{c.edges + 1, c.noises, c.deco,
                c.deriv + static_cast<std::uint32_t>(lab.deriv.total())};
        if (pc.edges <= stratum && pc.noises <= b.maxNoises && pc.deco <= b.maxDeco && pc.deriv <= b.maxDeriv)
          pieces.push_back({Child{lab, sub}, pc});
      }
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b2) { return cmp(a.first, b2.first) < 0; });

    std::set<DecoratedTree, TreeLess> next = all;
    // Root options: decoration k, optional noise edge.
    for_each_total_le(sig.dim(), b.maxDeco, [&](const MultiIndex& k) {
      std::vector<std::optional<EdgeLabel>> noise_opts{std::nullopt};
      for (const auto& nl : noise_labels) noise_opts.emplace_back(nl);
      for (const auto& no : noise_opts) {
        Cost used{no ? 1u : 0u, no ? 1u : 0u, static_cast<std::uint32_t>(k.total()),
                  no ? static_cast<std::uint32_t>(no->deriv.total()) : 0u};
        if (used.noises > b.maxNoises || used.deriv > b.maxDeriv || used.edges > stratum) continue;
        DecoratedTree root{k, no, {}};
        // Non-decreasing piece sequences within the leftover budget.
        std::function<void(std::size_t, Cost, DecoratedTree&)> choose = [&](std::size_t minIdx, Cost acc,
                                                                            DecoratedTree& cur) {
          if (next.size() > sizeCap) throw std::length_error("enumerate_basis: size cap exceeded");
          next.insert(canonicalize(cur));
          for (std::size_t i = minIdx; i < pieces.size(); ++i) {
            const auto& [piece, pc] = pieces[i];
            Cost tot{acc.edges + pc.edges, acc.noises + pc.noises, acc.deco + pc.deco, acc.deriv + pc.deriv};
            if (tot.edges > stratum || tot.noises > b.maxNoises || tot.deco > b.maxDeco ||
                tot.deriv > b.maxDeriv)
              continue;
            cur.children.push_back(piece);
            choose(i, tot, cur);
            cur.children.pop_back();
          }
        };
        choose(0, used, root);
      }
    });
    all = std::move(next);
  }

  return std::vector<DecoratedTree>(all.begin(), all.end());
}

// A linear map's output left the basis span.
class EscapeError : public std::runtime_error {
 public:
  EscapeError(DecoratedTree t, const std::string& msg) : std::runtime_error(msg), tree_(std::move(t)) {}
  const DecoratedTree& tree() const { return tree_; }

 private:
  DecoratedTree tree_;
};

class GradedBasis {
 public:
  GradedBasis() = default;
  GradedBasis(const Signature& sig, const Bounds& b) : bounds_(b) { assign(enumerate_basis(sig, b)); }
  explicit GradedBasis(std::vector<DecoratedTree> trees) { assign(std::move(trees)); }

  std::size_t size() const { return trees_.size(); }
  const DecoratedTree& tree(std::size_t i) const { return trees_.at(i); }
  const std::vector<DecoratedTree>& trees() const { return trees_; }
  const Bounds& bounds() const { return bounds_; }

  std::optional<std::size_t> find(const DecoratedTree& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(const DecoratedTree& t) const { return index_.count(t) != 0; }

  // First tree of v outside the span, if any.
  std::optional<DecoratedTree> escape(const TreeVec& v) const {
    for (const auto& [t, c] : v.terms())
      if (!contains(t)) return t;
    return std::nullopt;
  }

  void require_in_span(const TreeVec& v, const std::string& context) const {
    if (auto esc = escape(v)) throw EscapeError(*esc, context + ": output escapes the basis span");
  }

 private:
  void assign(std::vector<DecoratedTree> trees) {
    trees_ = std::move(trees);
    std::sort(trees_.begin(), trees_.end(), [](const DecoratedTree& a, const DecoratedTree& b) { return cmp(a, b) < 0; });
    trees_.erase(std::unique(trees_.begin(), trees_.end(),
                             [](const DecoratedTree& a, const DecoratedTree& b) { return cmp(a, b) == 0; }),
                 trees_.end());
    for (std::size_t i = 0; i < trees_.size(); ++i) index_.emplace(trees_[i], i);
  }

  std::vector<DecoratedTree> trees_;
  std::map<DecoratedTree, std::size_t, TreeLess> index_;
  Bounds bounds_;
};

}  // namespace grove
