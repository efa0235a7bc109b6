#pragma once

// Coproduct extracted from the star product by duality, never by a separate
// combinatorial formula:
//
//   Delta mu = sum over candidate pairs (tau, sigma) of
//              <sigma * tau, mu> / (S(tau) S(sigma)) . tau (x) sigma.
//
// Candidates come from antichain cuts of mu: each kernel child edge is either
// kept (recursing into its subtree) or cut with an extra derivative shift
// m >= 0 subject to deg I_{b+m}(branch) > 0, and each kept node donates part
// of its (raised) decoration to the polynomial part of sigma. Noise edges are
// never cut; a cut noise branch would have negative degree. Completeness:
// any sigma with <sigma * tau, mu> != 0 reattaches its factors along such a
// cut with exactly these derivative and decoration books.

#include "grove/basis.hpp"
#include "grove/grafting.hpp"
#include "grove/treevec.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace grove {

struct TreePairLess {
  bool operator()(const std::pair<DecoratedTree, DecoratedTree>& a,
                  const std::pair<DecoratedTree, DecoratedTree>& b) const {
    int c = cmp(a.first, b.first);
    if (c != 0) return c < 0;
    return cmp(a.second, b.second) < 0;
  }
};

// Finite tensor combination, keyed by (left, right) canonical trees.
class TensorVec {
 public:
  void add(const DecoratedTree& l, const DecoratedTree& r, const Scalar& c) {
    if (c.is_zero()) return;
    auto key = std::make_pair(canonicalize(l), canonicalize(r));
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Scalar coeff(const DecoratedTree& l, const DecoratedTree& r) const {
    auto it = terms_.find(std::make_pair(canonicalize(l), canonicalize(r)));
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const std::map<std::pair<DecoratedTree, DecoratedTree>, Scalar, TreePairLess>& terms() const {
    return terms_;
  }
  bool operator==(const TensorVec& o) const { return terms_ == o.terms_; }
  bool operator!=(const TensorVec& o) const { return !(*this == o); }

 private:
  std::map<std::pair<DecoratedTree, DecoratedTree>, Scalar, TreePairLess> terms_;
};

// All m with |m|_s < margin.
inline void for_each_weighted_below(const Signature& sig, const Rat& margin,
                                    const std::function<void(const MultiIndex&)>& fn) {
  if (!(margin > 0)) return;
  std::vector<std::uint32_t> comp(sig.dim(), 0);
  std::function<void(std::size_t, Rat)> rec = [&](std::size_t i, Rat left) {
    if (i == sig.dim()) {
      fn(MultiIndex(comp));
      return;
    }
    Rat step = Rat(sig.scaling()[i]);
    for (std::uint32_t v = 0;; ++v) {
      Rat used = step * v;
      if (!(used < left)) break;
      comp[i] = v;
      rec(i + 1, left - used);
    }
    comp[i] = 0;
  };
  rec(0, margin);
}

namespace detail {

// One way of splitting the subtree rooted at a node: the reduced subtree that
// stays behind, the factors cut away (with shifted derivative labels), the
// total decoration donated to the extracted side's polynomial part, and at
// most one node noise handed over as the extracted side's root noise.
struct CutPiece {
  DecoratedTree reduced;
  std::vector<Child> factors;
  MultiIndex donated;
  std::optional<EdgeLabel> noiseOut;
};

// Derivative shifts on cut edges range over |m|_s < positivity margin when
// shiftCap is absent (coproduct candidates), else over |m| <= shiftCap
// (content-extraction candidates, where the shift is bounded by the removed
// labels' derivative orders).
inline std::vector<CutPiece> cut_pieces(const DecoratedTree& mu, const Signature& sig,
                                        const std::optional<std::uint32_t>& shiftCap) {
  // Per-child alternatives.
  struct Option {
    bool cut = false;
    Child factor;              // when cut
    MultiIndex m;              // derivative shift when cut
    CutPiece kept;             // when kept
  };
  std::vector<std::vector<Option>> menu(mu.children.size());
  for (std::size_t ci = 0; ci < mu.children.size(); ++ci) {
    const Child& ch = mu.children[ci];
    for (auto& sub : cut_pieces(ch.sub, sig, shiftCap)) {
      Option o;
      o.kept = std::move(sub);
      menu[ci].push_back(std::move(o));
    }
    auto add_cut = [&](const MultiIndex& m) {
      Option o;
      o.cut = true;
      o.m = m;
      o.factor = Child{EdgeLabel{ch.label.type, ch.label.deriv + m}, ch.sub};
      menu[ci].push_back(std::move(o));
    };
    if (shiftCap) {
      for_each_total_le(sig.dim(), *shiftCap, add_cut);
    } else {
      Rat margin = sig.edge_degree(ch.label) + degree(ch.sub, sig);
      for_each_weighted_below(sig, margin, add_cut);
    }
  }

  std::vector<CutPiece> out;
  std::vector<const Option*> pick(mu.children.size());
  std::function<void(std::size_t)> walk = [&](std::size_t ci) {
    if (ci < mu.children.size()) {
      for (const auto& o : menu[ci]) {
        pick[ci] = &o;
        walk(ci + 1);
      }
      return;
    }
    MultiIndex raisedHere = mu.deco;
    std::vector<Child> keptChildren;
    std::vector<Child> factors;
    MultiIndex donatedBelow(sig.dim());
    std::optional<EdgeLabel> noiseBelow;
    bool clash = false;
    for (std::size_t i = 0; i < pick.size(); ++i) {
      const Option& o = *pick[i];
      if (o.cut) {
        raisedHere = raisedHere + o.m;
        factors.push_back(o.factor);
      } else {
        keptChildren.push_back(Child{mu.children[i].label, o.kept.reduced});
        for (const auto& f : o.kept.factors) factors.push_back(f);
        donatedBelow = donatedBelow + o.kept.donated;
        if (o.kept.noiseOut) {
          if (noiseBelow) clash = true;  // the extracted side has one noise slot
          noiseBelow = o.kept.noiseOut;
        }
      }
    }
    if (clash) return;
    auto emit = [&](const MultiIndex& extraRaise, const std::optional<EdgeLabel>& keptNoise,
                    const std::optional<EdgeLabel>& movedNoise) {
      if (movedNoise && noiseBelow) return;
      MultiIndex raised = raisedHere + extraRaise;
      for_each_below(raised, [&](const MultiIndex& k) {
        CutPiece piece;
        piece.reduced = DecoratedTree{raised - k, keptNoise, keptChildren};
        piece.factors = factors;
        piece.donated = donatedBelow + k;
        piece.noiseOut = movedNoise ? movedNoise : noiseBelow;
        out.push_back(std::move(piece));
      });
    };
    emit(MultiIndex(sig.dim()), mu.noise, std::nullopt);
    // Extraction mode may also hand this node's noise over, undoing a deformed
    // noise attachment: the extracted label is the node's shifted by m.
    if (shiftCap && mu.noise) {
      for_each_total_le(sig.dim(), *shiftCap, [&](const MultiIndex& m) {
        emit(m, std::nullopt, EdgeLabel{mu.noise->type, mu.noise->deriv + m});
      });
    }
  };
  walk(0);
  return out;
}

}  // namespace detail

// Candidate (reduced, extracted) pairs from admissible cuts of mu.  The exact
// weight of any pair is recovered later through the duality pairing, so a
// deduplicated set is enough.
inline std::set<std::pair<DecoratedTree, DecoratedTree>, TreePairLess> split_candidates(
    const DecoratedTree& mu, const Signature& sig,
    const std::optional<std::uint32_t>& shiftCap = std::nullopt) {
  std::set<std::pair<DecoratedTree, DecoratedTree>, TreePairLess> out;
  for (const auto& piece : detail::cut_pieces(mu, sig, shiftCap)) {
    DecoratedTree tau = canonicalize(piece.reduced);
    DecoratedTree sigma = canonicalize(DecoratedTree{piece.donated, piece.noiseOut, piece.factors});
    out.insert({std::move(tau), std::move(sigma)});
  }
  return out;
}

// Candidate (tau, sigma) pairs for the coproduct of mu.
inline std::set<std::pair<DecoratedTree, DecoratedTree>, TreePairLess> coproduct_candidates(
    const DecoratedTree& mu, const Signature& sig) {
  return split_candidates(mu, sig);
}

inline TensorVec coproduct(const DecoratedTree& mu, const Signature& sig) {
  DecoratedTree m = canonicalize(mu);
  TensorVec out;
  for (const auto& [tau, sigma] : coproduct_candidates(m, sig)) {
    Scalar pairing = inner_product(star(sigma, tau), m);
    if (pairing.is_zero()) continue;
    Rat denom = symmetry_factor(tau) * symmetry_factor(sigma);
    out.add(tau, sigma, pairing / denom);
  }
  return out;
}

inline TensorVec coproduct(const TreeVec& v, const Signature& sig) {
  TensorVec out;
  for (const auto& [t, c] : v.terms()) {
    TensorVec dt = coproduct(t, sig);
    for (const auto& [pair, w] : dt.terms()) out.add(pair.first, pair.second, c * w);
  }
  return out;
}

// Membership in the product sector: no root noise and every root branch of
// positive degree.
inline bool in_positive_sector(const DecoratedTree& t, const Signature& sig) {
  if (t.noise) return false;
  for (const auto& ch : t.children)
    if (!(sig.edge_degree(ch.label) + degree(ch.sub, sig) > 0)) return false;
  return true;
}

}  // namespace grove
