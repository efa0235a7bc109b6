#pragma once

// Coefficient ring for all linear combinations: exact rationals extended by
// named formal symbols (character values such as c_1 may be symbolic, and
// everything downstream stays polynomial in them). A Scalar is a multivariate
// polynomial over Rat with nonnegative integer exponents.

#include "grove/rational.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace grove {

class Scalar {
 public:
  using Mono = std::map<std::string, std::uint32_t>;  // symbol -> exponent

  Scalar() = default;
  Scalar(int n) : Scalar(Rat(n)) {}  // NOLINT: implicit by design
  Scalar(const Rat& r) {             // NOLINT: implicit by design
    if (r != 0) terms_[Mono{}] = r;
  }

  static Scalar symbol(const std::string& name) {
    Scalar s;
    s.terms_[Mono{{name, 1}}] = 1;
    return s;
  }

  bool is_zero() const { return terms_.empty(); }

  bool is_rational() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
  }

  // Requires is_rational().
  Rat rational_value() const {
    if (terms_.empty()) return Rat(0);
    if (!is_rational()) throw std::logic_error("Scalar: not a pure rational");
    return terms_.begin()->second;
  }

  bool operator==(const Scalar& o) const { return terms_ == o.terms_; }
  bool operator!=(const Scalar& o) const { return terms_ != o.terms_; }
  bool operator<(const Scalar& o) const { return terms_ < o.terms_; }

  Scalar operator-() const {
    Scalar r = *this;
    for (auto& [m, c] : r.terms_) c = -c;
    return r;
  }

  Scalar& operator+=(const Scalar& o) {
    for (const auto& [m, c] : o.terms_) {
      auto it = terms_.find(m);
      if (it == terms_.end()) {
        terms_.emplace(m, c);
      } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
      }
    }
    return *this;
  }
  Scalar& operator-=(const Scalar& o) { return *this += -o; }

  Scalar operator+(const Scalar& o) const {
    Scalar r = *this;
    r += o;
    return r;
  }
  Scalar operator-(const Scalar& o) const {
    Scalar r = *this;
    r -= o;
    return r;
  }

  Scalar operator*(const Scalar& o) const {
    Scalar r;
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) {
        Mono m = ma;
        for (const auto& [name, e] : mb) m[name] += e;
        auto it = r.terms_.find(m);
        if (it == r.terms_.end()) {
          r.terms_.emplace(std::move(m), ca * cb);
        } else {
          it->second += ca * cb;
          if (it->second == 0) r.terms_.erase(it);
        }
      }
    return r;
  }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  // Division is only defined by a nonzero pure rational; symbolic divisors
  // never arise in the algebra (inner products and symmetry factors are
  // rational).
  Scalar operator/(const Rat& q) const {
    if (q == 0) throw std::invalid_argument("Scalar: division by zero");
    Scalar r = *this;
    for (auto& [m, c] : r.terms_) c /= q;
    return r;
  }

  const std::map<Mono, Rat>& terms() const { return terms_; }

  // Deterministic rendering: monomials in map order, "3/2*c1*c2^2" style;
  // callers wrap in parentheses when the context needs it.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      std::string t;
      if (m.empty()) {
        t = rat_str(c);
      } else {
        if (c == -1) {
          t = "-";
        } else if (c != 1) {
          t = rat_str(c) + "*";
        }
        bool fs = true;
        for (const auto& [name, e] : m) {
          if (!fs) t += "*";
          fs = false;
          t += name;
          if (e != 1) t += "^" + std::to_string(e);
        }
      }
      if (first) {
        out = t;
      } else if (!t.empty() && t[0] == '-') {
        out += " - " + t.substr(1);
      } else {
        out += " + " + t;
      }
      first = false;
    }
    return out;
  }

  // One multiplicative factor or a parenthesized sum, for use inside products.
  std::string factor_str() const {
    if (terms_.size() <= 1) return str();
    return "(" + str() + ")";
  }

 private:
  std::map<Mono, Rat> terms_;
};

inline Scalar operator*(const Rat& r, const Scalar& s) { return Scalar(r) * s; }
inline Scalar operator*(const Int& n, const Scalar& s) { return Scalar(Rat(n)) * s; }

}  // namespace grove
