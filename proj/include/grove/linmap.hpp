#pragma once

// Linear maps represented by their columns on a graded basis, plus the
// symmetry-weighted adjoint. With the pairing <s,t> = S(t) 1_{s=t}, the
// adjoint of A has coefficients
//
//   coeff_t(A* s) = (S(s) / S(t)) coeff_s(A t),
//
// so transposition only needs the diagonal symmetry factors.

#include "grove/basis.hpp"
#include "grove/parallel.hpp"
#include "grove/treevec.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace grove {

class LinMap {
 public:
  LinMap() = default;
  explicit LinMap(const GradedBasis* basis) : basis_(basis), cols_(basis->size()) {}

  // Builds columns by evaluating fn on each basis tree. Outputs must stay in
  // the span; an escape raises EscapeError naming the offending tree.
  static LinMap from_function(const GradedBasis& basis,
                              const std::function<TreeVec(const DecoratedTree&)>& fn,
                              const std::string& context = "linear map") {
    LinMap m(&basis);
    parallel_for(basis.size(), [&](std::size_t i) {
      TreeVec col = fn(basis.tree(i));
      basis.require_in_span(col, context);
      m.cols_[i] = std::move(col);
    });
    return m;
  }

  static LinMap identity(const GradedBasis& basis) {
    LinMap m(&basis);
    for (std::size_t i = 0; i < basis.size(); ++i) m.cols_[i].add(basis.tree(i), Scalar(1));
    return m;
  }

  const GradedBasis& basis() const { return *basis_; }
  const TreeVec& column(std::size_t i) const { return cols_.at(i); }
  void set_column(std::size_t i, TreeVec v) { cols_.at(i) = std::move(v); }

  TreeVec apply(const DecoratedTree& t) const {
    auto idx = basis_->find(t);
    if (!idx) throw std::invalid_argument("LinMap::apply: tree outside the basis");
    return cols_[*idx];
  }

  TreeVec apply(const TreeVec& v) const {
    TreeVec out;
    for (const auto& [t, c] : v.terms()) {
      auto idx = basis_->find(t);
      if (!idx) throw std::invalid_argument("LinMap::apply: vector outside the basis");
      out += cols_[*idx] * c;
    }
    return out;
  }

  // this after other: (this∘other)(t) = this(other(t)).
  LinMap compose(const LinMap& other) const {
    if (basis_ != other.basis_) throw std::invalid_argument("LinMap::compose: basis mismatch");
    LinMap m(basis_);
    for (std::size_t i = 0; i < cols_.size(); ++i) m.cols_[i] = apply(other.cols_[i]);
    return m;
  }

  LinMap operator+(const LinMap& o) const {
    LinMap m(basis_);
    for (std::size_t i = 0; i < cols_.size(); ++i) m.cols_[i] = cols_[i] + o.cols_[i];
    return m;
  }
  LinMap operator-(const LinMap& o) const {
    LinMap m(basis_);
    for (std::size_t i = 0; i < cols_.size(); ++i) m.cols_[i] = cols_[i] - o.cols_[i];
    return m;
  }

  bool operator==(const LinMap& o) const { return cols_ == o.cols_; }
  bool operator!=(const LinMap& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& c : cols_)
      if (!c.is_zero()) return false;
    return true;
  }

  LinMap power(unsigned n) const {
    LinMap acc = identity(*basis_);
    for (unsigned i = 0; i < n; ++i) acc = compose(acc);
    return acc;
  }

 private:
  const GradedBasis* basis_ = nullptr;
  std::vector<TreeVec> cols_;
};

inline LinMap adjoint(const LinMap& a) {
  const GradedBasis& basis = a.basis();
  std::vector<Rat> sym(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) sym[i] = symmetry_factor(basis.tree(i));
  std::vector<TreeVec> cols(basis.size());
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (const auto& [s, c] : a.column(j).terms()) {
      std::size_t i = *basis.find(s);
      Rat ratio = sym[i] / sym[j];
      cols[i].add(basis.tree(j), c * ratio);
    }
  LinMap m(&basis);
  for (std::size_t i = 0; i < basis.size(); ++i) m.set_column(i, std::move(cols[i]));
  return m;
}

// Smallest n <= maxOrder with a^n = 0, or nullopt.
inline std::optional<unsigned> nilpotency_order(const LinMap& a, unsigned maxOrder) {
  LinMap acc = LinMap::identity(a.basis());
  for (unsigned n = 1; n <= maxOrder; ++n) {
    acc = a.compose(acc);
    if (acc.is_zero()) return n;
  }
  return std::nullopt;
}

// Builds a map whose defining evaluation may escape a too-small basis: on
// escape the bounds are enlarged once and the build retried; a second escape
// propagates.
inline LinMap build_with_retry(const Signature& sig, Bounds bounds,
                               const std::function<TreeVec(const DecoratedTree&)>& fn,
                               GradedBasis& basisOut, const std::string& context = "linear map") {
  basisOut = GradedBasis(sig, bounds);
  try {
    return LinMap::from_function(basisOut, fn, context);
  } catch (const EscapeError&) {
    basisOut = GradedBasis(sig, bounds.enlarged());
    return LinMap::from_function(basisOut, fn, context + " (retry on enlarged basis)");
  }
}

}  // namespace grove
