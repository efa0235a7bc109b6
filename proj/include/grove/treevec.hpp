#pragma once

// Finite linear combinations of canonical trees with Scalar coefficients,
// normalized (no zero coefficients, no duplicate keys). All algebra modules
// return TreeVec and extend tree-level operations bilinearly.

#include "grove/scalar.hpp"
#include "grove/tree.hpp"

#include <map>
#include <stdexcept>
#include <utility>

namespace grove {

class TreeVec {
 public:
  using Map = std::map<DecoratedTree, Scalar, TreeLess>;

  TreeVec() = default;
  explicit TreeVec(const DecoratedTree& t) { add(t, Scalar(1)); }

  static TreeVec zero() { return TreeVec(); }

  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  const Map& terms() const { return terms_; }

  void add(const DecoratedTree& t, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(t);
    if (it == terms_.end()) {
      terms_.emplace(t, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Scalar coeff(const DecoratedTree& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  TreeVec& operator+=(const TreeVec& o) {
    for (const auto& [t, c] : o.terms_) add(t, c);
    return *this;
  }
  TreeVec& operator-=(const TreeVec& o) {
    for (const auto& [t, c] : o.terms_) add(t, -c);
    return *this;
  }
  TreeVec operator+(const TreeVec& o) const {
    TreeVec r = *this;
    r += o;
    return r;
  }
  TreeVec operator-(const TreeVec& o) const {
    TreeVec r = *this;
    r -= o;
    return r;
  }
  TreeVec operator*(const Scalar& s) const {
    TreeVec r;
    if (s.is_zero()) return r;
    for (const auto& [t, c] : terms_) r.add(t, c * s);
    return r;
  }

  bool operator==(const TreeVec& o) const { return terms_ == o.terms_; }
  bool operator!=(const TreeVec& o) const { return terms_ != o.terms_; }

 private:
  Map terms_;
};

inline TreeVec operator*(const Scalar& s, const TreeVec& v) { return v * s; }

// <sigma, tau> = S(tau) 1_{sigma = tau} on trees; bilinear on combinations.
inline Scalar inner_product(const DecoratedTree& a, const DecoratedTree& b) {
  if (cmp(a, b) != 0) return Scalar(0);
  return Scalar(symmetry_factor(a));
}

inline Scalar inner_product(const TreeVec& v, const DecoratedTree& b) {
  return v.coeff(b) * Scalar(symmetry_factor(b));
}

inline Scalar inner_product(const TreeVec& v, const TreeVec& w) {
  Scalar s(0);
  for (const auto& [t, c] : w.terms()) s += v.coeff(t) * c * Scalar(symmetry_factor(t));
  return s;
}

// Tensor extension <s1 (x) s2, t1 (x) t2> = <s1,t1><s2,t2> is provided by the
// coproduct module through paired calls on TensorVec entries.

// Bilinear extension of the root-join product. Inherits the tree-level error
// on colliding root noises: silent dropping would mask malformed inputs.
inline TreeVec tree_product(const TreeVec& a, const TreeVec& b) {
  TreeVec r;
  for (const auto& [ta, ca] : a.terms())
    for (const auto& [tb, cb] : b.terms()) r.add(tree_product(ta, tb), ca * cb);
  return r;
}

}  // namespace grove
