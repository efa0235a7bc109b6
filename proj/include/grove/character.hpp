#pragma once

// Characters on the negative sector: a value per tree of the negative basis,
// extended by ell(1) = 1. Values live in the coefficient ring, so a character
// can carry named formal symbols; evaluation anywhere else is an error, not a
// silent zero.

#include "grove/parse.hpp"
#include "grove/scalar.hpp"
#include "grove/tree.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace grove {

// Parses "3/2*c1*c2^2 - xi + 4" style linear combinations of symbol products.
inline Scalar scalar_parse(const std::string& s) {
  std::size_t i = 0;
  auto skip = [&] { while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i; };
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("scalar_parse: " + msg + " at position " + std::to_string(i) + " in '" + s + "'");
  };
  Scalar total(0);
  skip();
  if (i == s.size()) fail("empty input");
  bool first = true;
  while (true) {
    skip();
    if (i == s.size()) {
      if (first) fail("empty input");
      break;
    }
    Rat sign = 1;
    if (s[i] == '+' || s[i] == '-') {
      if (s[i] == '-') sign = -1;
      ++i;
    } else if (!first) {
      fail("expected + or -");
    }
    first = false;
    skip();
    Scalar term(1);
    bool sawFactor = false;
    while (true) {
      skip();
      if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])))) {
        std::size_t j = i;
        while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '/')) ++j;
        term = term * Scalar(rat_parse(s.substr(i, j - i)));
        i = j;
        sawFactor = true;
      } else if (i < s.size() && (std::isalpha(static_cast<unsigned char>(s[i])) || s[i] == '_')) {
        std::size_t j = i;
        while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
        std::string name = s.substr(i, j - i);
        i = j;
        std::uint32_t pow = 1;
        if (i < s.size() && s[i] == '^') {
          ++i;
          if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail("expected exponent");
          pow = 0;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) pow = pow * 10 + (s[i++] - '0');
        }
        for (std::uint32_t k = 0; k < pow; ++k) term = term * Scalar::symbol(name);
        sawFactor = true;
      } else {
        fail("expected a number or symbol");
      }
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        continue;
      }
      break;
    }
    if (!sawFactor) fail("empty term");
    total += sign * term;
  }
  return total;
}

class Character {
 public:
  Character() = default;
  explicit Character(std::vector<DecoratedTree> domain) {
    for (auto& t : domain) domain_.insert(canonicalize(t));
  }

  // One formal symbol per non-unit domain tree, in canonical order.
  static Character formal(const std::vector<DecoratedTree>& negBasis, const std::string& prefix = "c") {
    Character ell(negBasis);
    std::size_t n = 0;
    for (const auto& t : ell.domain_) {
      if (is_unit(t)) continue;
      ell.values_[t] = Scalar::symbol(prefix + std::to_string(++n));
    }
    return ell;
  }

  void set(const DecoratedTree& t, const Scalar& v) {
    DecoratedTree c = canonicalize(t);
    if (!domain_.count(c)) throw std::domain_error("Character::set: tree outside the negative basis");
    if (v.is_zero())
      values_.erase(c);
    else
      values_[c] = v;
  }

  Scalar operator()(const DecoratedTree& t) const {
    DecoratedTree c = canonicalize(t);
    if (is_unit(c)) return Scalar(1);
    auto it = values_.find(c);
    if (it != values_.end()) return it->second;
    if (!domain_.count(c)) throw std::domain_error("Character: value requested outside the negative basis");
    return Scalar(0);
  }

  const std::set<DecoratedTree, TreeLess>& domain() const { return domain_; }
  const std::map<DecoratedTree, Scalar, TreeLess>& values() const { return values_; }

 private:
  std::set<DecoratedTree, TreeLess> domain_;
  std::map<DecoratedTree, Scalar, TreeLess> values_;
};

inline nlohmann::json character_to_json(const Character& ell, const Signature& sig) {
  nlohmann::json vals = nlohmann::json::object();
  for (const auto& [t, v] : ell.values()) vals[print_tree(t, sig)] = v.str();
  return nlohmann::json{{"values", vals}};
}

inline Character character_from_json(const nlohmann::json& j, const Signature& sig,
                                     const std::vector<DecoratedTree>& domain) {
  Character ell(domain);
  for (const auto& [key, val] : j.at("values").items())
    ell.set(parse_tree(key, sig), scalar_parse(val.get<std::string>()));
  return ell;
}

inline Character character_from_file(const std::string& path, const Signature& sig,
                                     const std::vector<DecoratedTree>& domain) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open character file: " + path);
  nlohmann::json j;
  in >> j;
  return character_from_json(j, sig, domain);
}

}  // namespace grove
