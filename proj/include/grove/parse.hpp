#pragma once

// Text form of trees:
//
//   tree    := factor ( "*" factor )*
//   factor  := "1" | "X[" mindex "]" | NOISE | "I[" NAME "," mindex "](" tree ")"
//   mindex  := "(" INT ("," INT)* ")"
//
// NOISE is a bare noise-type name (e.g. xi_1), shorthand for the derivative-0
// noise edge; I[xi_1,(p)](1) spells a noise edge with derivative p. Whitespace
// is insignificant. print_tree emits canonical order and round-trips through
// parse_tree exactly.

#include "grove/signature.hpp"
#include "grove/tree.hpp"
#include "grove/treevec.hpp"

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace grove {

// Parse failure with the offending position; what() carries a caret diagnostic.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& input, std::size_t pos, const std::string& msg)
      : std::runtime_error(render(input, pos, msg)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  static std::string render(const std::string& input, std::size_t pos, const std::string& msg) {
    std::string out = msg + " at position " + std::to_string(pos) + "\n  " + input + "\n  ";
    for (std::size_t i = 0; i < pos && i < input.size() + 1; ++i) out += ' ';
    out += '^';
    return out;
  }
  std::size_t pos_;
};

namespace detail {

class TreeParser {
 public:
  TreeParser(const std::string& s, const Signature& sig) : s_(s), sig_(sig) {}

  DecoratedTree parse() {
    DecoratedTree t = parse_tree();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return canonicalize(std::move(t));
  }

 private:
  DecoratedTree parse_tree() {
    DecoratedTree t = parse_factor();
    while (true) {
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '*') {
        ++pos_;
        DecoratedTree f = parse_factor();
        if (t.noise && f.noise) fail("two noise factors on one node");
        t = tree_product(t, f);
      } else {
        break;
      }
    }
    return t;
  }

  DecoratedTree parse_factor() {
    skip_ws();
    if (pos_ >= s_.size()) fail("expected factor");
    char c = s_[pos_];
    if (c == '1') {
      ++pos_;
      return unit_tree(sig_);
    }
    if (c == 'X' && peek(1) == '[') {
      pos_ += 2;
      MultiIndex k = parse_mindex();
      expect(']');
      return poly_tree(k);
    }
    if (c == 'I' && peek(1) == '[') {
      pos_ += 2;
      std::size_t name_pos = pos_;
      std::string name = parse_name();
      TypeId type;
      if (!sig_.find_type(name, type)) fail_at(name_pos, "unknown type '" + name + "'");
      expect(',');
      MultiIndex p = parse_mindex();
      expect(']');
      expect('(');
      DecoratedTree sub = parse_tree();
      expect(')');
      std::size_t at = pos_;
      try {
        return planted(EdgeLabel{type, p}, std::move(sub), sig_);
      } catch (const std::invalid_argument& e) {
        fail_at(at, e.what());
      }
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t name_pos = pos_;
      std::string name = parse_name();
      TypeId type;
      if (!sig_.find_type(name, type)) fail_at(name_pos, "unknown factor '" + name + "'");
      if (type.kind != TypeKind::Noise) fail_at(name_pos, "bare kernel name; use I[" + name + ",(...)](...)");
      return noise_tree(sig_, type.index);
    }
    fail("expected factor");
  }

  MultiIndex parse_mindex() {
    skip_ws();
    expect('(');
    std::vector<std::uint32_t> comps;
    while (true) {
      comps.push_back(parse_int());
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    expect(')');
    if (comps.size() != sig_.dim())
      fail("multi-index has " + std::to_string(comps.size()) + " components, signature needs " +
           std::to_string(sig_.dim()));
    return MultiIndex(std::move(comps));
  }

  std::uint32_t parse_int() {
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("expected integer");
    std::uint64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + static_cast<std::uint64_t>(s_[pos_] - '0');
      if (v > 1'000'000) fail("integer too large");
      ++pos_;
    }
    return static_cast<std::uint32_t>(v);
  }

  std::string parse_name() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected name");
    return s_.substr(start, pos_ - start);
  }

  char peek(std::size_t ahead) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(s_, pos_, msg); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& msg) const { throw ParseError(s_, pos, msg); }

  const std::string& s_;
  const Signature& sig_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline DecoratedTree parse_tree(const std::string& s, const Signature& sig) {
  return detail::TreeParser(s, sig).parse();
}

inline std::string print_tree(const DecoratedTree& t, const Signature& sig) {
  std::string out;
  auto push = [&out](const std::string& f) {
    if (!out.empty()) out += " * ";
    out += f;
  };
  if (!t.deco.is_zero()) push("X[" + t.deco.str() + "]");
  if (t.noise) {
    const auto& name = sig.type(t.noise->type).name;
    if (t.noise->deriv.is_zero())
      push(name);
    else
      push("I[" + name + "," + t.noise->deriv.str() + "](1)");
  }
  for (const auto& c : t.children)
    push("I[" + sig.type(c.label.type).name + "," + c.label.deriv.str() + "](" + print_tree(c.sub, sig) + ")");
  return out.empty() ? "1" : out;
}

inline std::string print_label(const EdgeLabel& a, const Signature& sig) {
  return "I[" + sig.type(a.type).name + "," + a.deriv.str() + "]";
}

// "I[t1,(0,1)]" or a bare noise name; accepts the same forms print_label emits.
inline EdgeLabel parse_label(const std::string& s, const Signature& sig) {
  std::string str = s;
  // Trim whitespace.
  while (!str.empty() && std::isspace(static_cast<unsigned char>(str.front()))) str.erase(str.begin());
  while (!str.empty() && std::isspace(static_cast<unsigned char>(str.back()))) str.pop_back();
  if (str.size() >= 2 && str[0] == 'I' && str[1] == '[') {
    std::string inner = str + "(1)";
    DecoratedTree t = parse_tree(inner, sig);
    if (t.noise) return *t.noise;
    if (t.children.size() == 1) return t.children[0].label;
    throw ParseError(s, 0, "expected edge label");
  }
  TypeId type;
  if (sig.find_type(str, type) && type.kind == TypeKind::Noise)
    return EdgeLabel{type, sig.zero_index()};
  throw ParseError(s, 0, "expected edge label like I[t1,(0,0)] or a noise name");
}

inline std::string print_vec(const TreeVec& v, const Signature& sig) {
  if (v.is_zero()) return "0";
  std::string out;
  for (const auto& [t, c] : v.terms()) {
    if (!out.empty()) out += " + ";
    if (c == Scalar(1))
      out += print_tree(t, sig);
    else
      out += c.factor_str() + " " + print_tree(t, sig);
  }
  return out;
}

}  // namespace grove
