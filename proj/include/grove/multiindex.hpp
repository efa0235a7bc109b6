#pragma once

// Multi-indices over d+1 directions (component 0 is time by convention).
// Plain tuples of naturals with componentwise arithmetic; the weighted size
// |k|_s takes the scaling vector from the ambient signature.

#include "grove/rational.hpp"

#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace grove {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : c_(dim, 0) {}
  explicit MultiIndex(std::vector<std::uint32_t> c) : c_(std::move(c)) {}

  static MultiIndex unit(std::size_t dim, std::size_t j) {
    MultiIndex m(dim);
    m.c_.at(j) = 1;
    return m;
  }

  std::size_t dim() const { return c_.size(); }
  std::uint32_t operator[](std::size_t i) const { return c_.at(i); }
  std::uint32_t& at(std::size_t i) { return c_.at(i); }
  const std::vector<std::uint32_t>& components() const { return c_; }

  bool is_zero() const {
    for (auto v : c_)
      if (v) return false;
    return true;
  }

  // Unweighted total |k|.
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto v : c_) t += v;
    return t;
  }

  bool operator==(const MultiIndex& o) const { return c_ == o.c_; }
  bool operator!=(const MultiIndex& o) const { return c_ != o.c_; }
  bool operator<(const MultiIndex& o) const { return c_ < o.c_; }

  // Componentwise order; only a partial order.
  bool leq(const MultiIndex& o) const {
    check_dim(o);
    for (std::size_t i = 0; i < c_.size(); ++i)
      if (c_[i] > o.c_[i]) return false;
    return true;
  }

  MultiIndex operator+(const MultiIndex& o) const {
    check_dim(o);
    MultiIndex r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    return r;
  }

  // Partial subtraction; requires o ≤ *this.
  MultiIndex operator-(const MultiIndex& o) const {
    check_dim(o);
    MultiIndex r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (o.c_[i] > r.c_[i]) throw std::invalid_argument("MultiIndex: negative component in subtraction");
      r.c_[i] -= o.c_[i];
    }
    return r;
  }

  Int fact() const {
    Int f = 1;
    for (auto v : c_) f *= factorial_int(v);
    return f;
  }

  // Componentwise product of binomials; zero when m ≰ *this.
  Int binom(const MultiIndex& m) const {
    check_dim(m);
    Int b = 1;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      b *= binomial_int(c_[i], m.c_[i]);
      if (b == 0) return 0;
    }
    return b;
  }

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(c_[i]);
    }
    s += ")";
    return s;
  }

 private:
  void check_dim(const MultiIndex& o) const {
    if (c_.size() != o.c_.size()) throw std::invalid_argument("MultiIndex: dimension mismatch");
  }
  std::vector<std::uint32_t> c_;
};

// All m with m ≤ n componentwise, in lexicographic order.
inline void for_each_below(const MultiIndex& n, const std::function<void(const MultiIndex&)>& fn) {
  MultiIndex m(n.dim());
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == n.dim()) {
      fn(m);
      return;
    }
    for (std::uint32_t v = 0; v <= n[i]; ++v) {
      m.at(i) = v;
      rec(i + 1);
    }
    m.at(i) = 0;
  };
  rec(0);
}

// All m with unweighted total ≤ cap, in lexicographic order.
inline void for_each_total_le(std::size_t dim, std::uint32_t cap,
                              const std::function<void(const MultiIndex&)>& fn) {
  MultiIndex m(dim);
  std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t left) {
    if (i == dim) {
      fn(m);
      return;
    }
    for (std::uint32_t v = 0; v <= left; ++v) {
      m.at(i) = v;
      rec(i + 1, left - v);
    }
    m.at(i) = 0;
  };
  rec(0, cap);
}

// All ordered splittings k = k_1 + ... + k_parts (componentwise compositions).
inline void for_each_composition(const MultiIndex& k, std::size_t parts,
                                 const std::function<void(const std::vector<MultiIndex>&)>& fn) {
  if (parts == 0) {
    if (k.is_zero()) fn({});
    return;
  }
  std::vector<MultiIndex> out(parts, MultiIndex(k.dim()));
  std::function<void(std::size_t, MultiIndex)> rec = [&](std::size_t i, MultiIndex left) {
    if (i + 1 == parts) {
      out[i] = left;
      fn(out);
      return;
    }
    for_each_below(left, [&](const MultiIndex& piece) {
      out[i] = piece;
      rec(i + 1, left - piece);
    });
  };
  rec(0, k);
}

}  // namespace grove
