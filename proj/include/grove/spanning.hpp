#pragma once

// Span certification for the grafting family: every conforming tree inside
// the bounds is a linear combination of iterated kernel graftings of the bare
// generators X^k zeta_l (including l = 0, the pure polynomials). Grafting
// adds exactly one edge to every term, so span vectors built from an edge
// stratum live entirely inside that stratum and one pass per stratum is
// complete. Vectors enter the row space only when both graft factors are
// already certified, so a pass is sound; a failure can only understate the
// span.

#include "grove/basis.hpp"
#include "grove/grafting.hpp"
#include "grove/rules.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace grove {

namespace detail {

using SparseRow = std::map<std::size_t, Rat>;

// Reduce v against the pivot rows in place. Returns true when v vanished.
inline bool reduce_row(SparseRow& v, const std::map<std::size_t, SparseRow>& rows) {
  while (!v.empty()) {
    std::size_t lead = v.begin()->first;
    auto it = rows.find(lead);
    if (it == rows.end()) return false;
    Rat f = v.begin()->second;
    for (const auto& [j, c] : it->second) {
      auto vj = v.find(j);
      if (vj == v.end()) {
        v.emplace(j, -f * c);
      } else {
        vj->second -= f * c;
        if (vj->second == 0) v.erase(vj);
      }
    }
  }
  return true;
}

// Insert v as a new pivot row if independent.
inline void insert_row(SparseRow v, std::map<std::size_t, SparseRow>& rows) {
  if (reduce_row(v, rows)) return;
  Rat lead = v.begin()->second;
  for (auto& [j, c] : v) c /= lead;
  std::size_t pivot = v.begin()->first;
  rows.emplace(pivot, std::move(v));
}

}  // namespace detail

struct SpanReport {
  bool passed = false;
  std::size_t conforming = 0;  // conforming trees inside the bounds
  std::size_t spanned = 0;     // of those, certified inside the span
  std::size_t vectors = 0;     // span vectors inserted
  std::string counterexample;
};

// Certify the conforming trees within bounds as spanned by iterated grafts.
inline SpanReport check_spanning(const EquationSpec& spec, const Bounds& bounds) {
  const Signature& sig = spec.sig;
  GradedBasis basis(sig, bounds);

  std::vector<std::vector<std::size_t>> strata(bounds.maxEdges + 1);
  for (std::size_t i = 0; i < basis.size(); ++i) strata[edge_count(basis.tree(i))].push_back(i);

  std::vector<char> certified(basis.size(), 0);
  std::map<std::size_t, detail::SparseRow> rows;
  SpanReport rep;

  auto row_of = [&](const TreeVec& v, detail::SparseRow& out) {
    out.clear();
    for (const auto& [t, c] : v.terms()) {
      auto idx = basis.find(t);
      if (!idx) return false;  // factors too large for the window, skip
      Rat r = c.rational_value();
      if (r != 0) out.emplace(*idx, r);
    }
    return true;
  };

  for (const auto& stratum : strata) {
    for (std::size_t i : stratum) {
      const DecoratedTree& t = basis.tree(i);
      if (!t.children.empty()) continue;
      if (t.noise && !t.noise->deriv.is_zero()) continue;
      certified[i] = 1;  // generator X^k zeta_l
      detail::SparseRow unit{{i, Rat(1)}};
      detail::insert_row(std::move(unit), rows);
      ++rep.vectors;
    }
    for (std::size_t i : stratum) {
      const DecoratedTree& t = basis.tree(i);
      if (t.children.empty()) continue;
      for (std::size_t ci = 0; ci < t.children.size(); ++ci) {
        if (ci > 0 && cmp(t.children[ci], t.children[ci - 1]) == 0) continue;
        auto sIdx = basis.find(t.children[ci].sub);
        if (!sIdx || !certified[*sIdx]) continue;
        DecoratedTree rest = t;
        rest.children.erase(rest.children.begin() + static_cast<std::ptrdiff_t>(ci));
        auto rIdx = basis.find(canonicalize(rest));
        if (!rIdx || !certified[*rIdx]) continue;
        TreeVec g = graft(t.children[ci].sub, t.children[ci].label, rest);
        detail::SparseRow row;
        if (!row_of(g, row) || row.empty()) continue;
        detail::insert_row(std::move(row), rows);
        ++rep.vectors;
      }
    }
    for (std::size_t i : stratum) {
      if (certified[i]) continue;
      detail::SparseRow unit{{i, Rat(1)}};
      if (detail::reduce_row(unit, rows)) certified[i] = 1;
    }
  }

  rep.passed = true;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (!conforming(spec, basis.tree(i))) continue;
    ++rep.conforming;
    if (certified[i]) {
      ++rep.spanned;
    } else if (rep.passed) {
      rep.passed = false;
      rep.counterexample = print_tree(basis.tree(i), sig);
    }
  }
  return rep;
}

}  // namespace grove
