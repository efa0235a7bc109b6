#pragma once

// Equation systems: which kernel each unknown component inverts, which
// derivative variables its right-hand side may read, and which noise channels
// it carries. A tree conforms when every node describes a term the right-hand
// side can actually produce:
//
//   - the node's channel (0 = constant part, l >= 1 = l-th noise, derivative
//     free) is declared for its component,
//   - every child edge label is a declared variable of the component,
//   - a nonzero node decoration needs at least one declared variable
//     (otherwise the total derivative of the node symbol vanishes).
//
// Generation is constructive over these local shapes; the test suite checks
// it against a generate-everything-then-filter oracle.

#include "grove/basis.hpp"
#include "grove/parse.hpp"
#include "grove/signature.hpp"
#include "grove/tree.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace grove {

struct Component {
  std::string name;
  std::uint16_t kernel = 0;            // index into Signature::kernels
  std::vector<EdgeLabel> deps;         // kernel-typed derivative variables
  std::vector<std::uint16_t> channels; // 0 = constant channel, l >= 1 = noise l-1

  bool has_dep(const EdgeLabel& a) const {
    return std::find(deps.begin(), deps.end(), a) != deps.end();
  }
  bool has_channel(std::uint16_t l) const {
    return std::find(channels.begin(), channels.end(), l) != channels.end();
  }
};

struct Cutoffs {
  Rat gamma;                    // keep trees of degree < gamma
  std::uint32_t maxNoises = 0;
  std::uint32_t maxDeco = 0;    // total node decoration
  std::uint32_t maxDeriv = 0;   // total edge derivative
};

class EquationSpec {
 public:
  std::string name;
  Signature sig;
  std::vector<Component> components;
  Cutoffs cutoffs;

  EquationSpec(std::string n, Signature s, std::vector<Component> comps, Cutoffs c)
      : name(std::move(n)), sig(std::move(s)), components(std::move(comps)), cutoffs(std::move(c)) {
    for (const auto& comp : components) {
      if (comp.kernel >= sig.kernels().size())
        throw std::invalid_argument("EquationSpec: component kernel out of range: " + comp.name);
      for (const auto& d : comp.deps)
        if (d.type.kind != TypeKind::Kernel || d.type.index >= sig.kernels().size())
          throw std::invalid_argument("EquationSpec: dependency must be a kernel label: " + comp.name);
      for (auto l : comp.channels)
        if (l > sig.noises().size())
          throw std::invalid_argument("EquationSpec: channel out of range: " + comp.name);
    }
  }

  const Component* component_for_kernel(std::uint16_t kernelIdx) const {
    for (const auto& c : components)
      if (c.kernel == kernelIdx) return &c;
    return nullptr;
  }

  std::optional<std::size_t> component_index(const std::string& n) const {
    for (std::size_t i = 0; i < components.size(); ++i)
      if (components[i].name == n) return i;
    return std::nullopt;
  }
};

// Channel of a node: 0 without noise, l for noise index l-1. A noise edge
// with a derivative fits no channel.
inline std::optional<std::uint16_t> node_channel(const DecoratedTree& t) {
  if (!t.noise) return 0;
  if (!t.noise->deriv.is_zero()) return std::nullopt;
  return static_cast<std::uint16_t>(t.noise->type.index + 1);
}

inline bool conforming(const EquationSpec& spec, const DecoratedTree& t, const Component& comp) {
  auto l = node_channel(t);
  if (!l || !comp.has_channel(*l)) return false;
  if (!t.deco.is_zero() && comp.deps.empty()) return false;
  for (const auto& ch : t.children) {
    if (!comp.has_dep(ch.label)) return false;
    const Component* sub = spec.component_for_kernel(ch.label.type.index);
    if (!sub || !conforming(spec, ch.sub, *sub)) return false;
  }
  return true;
}

inline bool conforming(const EquationSpec& spec, const DecoratedTree& t) {
  for (const auto& comp : spec.components)
    if (conforming(spec, t, comp)) return true;
  return false;
}

// Edge budget implied by gamma: noise edges are capped by maxNoises, kernel
// edges with a positive degree gain are capped by how many such gains fit
// under gamma once every possible negative contribution is granted, and
// zero-or-negative-gain edges each consume derivative budget.
inline std::uint32_t conforming_edge_cap(const EquationSpec& spec) {
  const Signature& sig = spec.sig;
  Rat worstNoise = 0;
  for (const auto& n : sig.noises()) worstNoise = std::min(worstNoise, n.degree);
  Rat slack = spec.cutoffs.gamma - Rat(spec.cutoffs.maxNoises) * worstNoise;
  Rat minGain = 0;
  bool haveGain = false;
  for (const auto& comp : spec.components)
    for (const auto& d : comp.deps) {
      Rat g = sig.edge_degree(d);
      if (g > 0 && (!haveGain || g < minGain)) {
        minGain = g;
        haveGain = true;
      } else if (!(g > 0)) {
        slack -= g;  // grant the negative contribution once per deriv unit
      }
    }
  std::uint32_t posCap = 0;
  if (haveGain && slack > 0) {
    Rat q = slack / minGain;
    posCap = static_cast<std::uint32_t>(numerator(q) / denominator(q));
  }
  return spec.cutoffs.maxNoises + posCap + spec.cutoffs.maxDeriv;
}

inline Bounds conforming_window(const EquationSpec& spec) {
  return Bounds{spec.cutoffs.maxNoises, conforming_edge_cap(spec), spec.cutoffs.maxDeco,
                spec.cutoffs.maxDeriv};
}

// All conforming trees inside the bounds, built constructively from the
// admissible local shapes. With filterGamma, keep only degree < gamma; the
// builder then also drops every partial tree whose degree cannot come back
// under gamma with the remaining noise and edge budget, which keeps the
// search linear in the answer instead of in the full window.
inline std::vector<DecoratedTree> generate_conforming(const EquationSpec& spec, const Bounds& b,
                                                      bool filterGamma = true) {
  const Signature& sig = spec.sig;
  std::size_t nc = spec.components.size();
  std::vector<std::set<DecoratedTree, TreeLess>> byComp(nc);

  Rat floorNoise = 0;
  for (const auto& n : sig.noises()) floorNoise = std::min(floorNoise, n.degree);
  Rat floorGain = 0;
  for (const auto& comp : spec.components)
    for (const auto& d : comp.deps) floorGain = std::min(floorGain, sig.edge_degree(d));

  // No completion of t can reach degree < gamma once this fails.
  auto rescuable = [&](const DecoratedTree& t) {
    if (!filterGamma) return true;
    Rat floor = degree(t, sig);
    floor += Rat(b.maxNoises - noise_count(t)) * floorNoise;
    floor += Rat(b.maxEdges - edge_count(t)) * floorGain;
    return floor < spec.cutoffs.gamma;
  };

  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t ci = 0; ci < nc; ++ci) {
      const Component& comp = spec.components[ci];
      // Pieces: declared variables over previously built subtrees.
      std::vector<Child> pieces;
      for (const auto& dep : comp.deps) {
        const Component* subComp = spec.component_for_kernel(dep.type.index);
        if (!subComp) continue;
        std::size_t si = static_cast<std::size_t>(subComp - spec.components.data());
        for (const auto& sub : byComp[si]) pieces.push_back(Child{dep, sub});
      }
      std::sort(pieces.begin(), pieces.end(), [](const Child& a, const Child& c) { return cmp(a, c) < 0; });
      pieces.erase(std::unique(pieces.begin(), pieces.end(),
                               [](const Child& a, const Child& c) { return cmp(a, c) == 0; }),
                   pieces.end());

      for_each_total_le(sig.dim(), b.maxDeco, [&](const MultiIndex& k) {
        if (!k.is_zero() && comp.deps.empty()) return;
        for (std::uint16_t l : comp.channels) {
          std::optional<EdgeLabel> noise;
          if (l >= 1) noise = EdgeLabel{TypeId{TypeKind::Noise, static_cast<std::uint16_t>(l - 1)}, sig.zero_index()};
          DecoratedTree root{k, noise, {}};
          if (noise_count(root) > b.maxNoises || deco_total(root) > b.maxDeco) continue;
          std::function<void(std::size_t, DecoratedTree&)> choose = [&](std::size_t minIdx, DecoratedTree& cur) {
            DecoratedTree canon = canonicalize(cur);
            if (b.admits(canon) && byComp[ci].insert(canon).second) grew = true;
            for (std::size_t i = minIdx; i < pieces.size(); ++i) {
              cur.children.push_back(pieces[i]);
              if (edge_count(cur) <= b.maxEdges && noise_count(cur) <= b.maxNoises &&
                  deco_total(cur) <= b.maxDeco && deriv_total(cur) <= b.maxDeriv && rescuable(cur))
                choose(i, cur);
              cur.children.pop_back();
            }
          };
          if (rescuable(root)) choose(0, root);
        }
      });
    }
  }

  std::set<DecoratedTree, TreeLess> all;
  for (const auto& s : byComp)
    for (const auto& t : s)
      if (!filterGamma || degree(t, sig) < spec.cutoffs.gamma) all.insert(t);
  return std::vector<DecoratedTree>(all.begin(), all.end());
}

inline std::vector<DecoratedTree> generate_conforming(const EquationSpec& spec) {
  return generate_conforming(spec, conforming_window(spec), true);
}

// The unit together with every conforming tree of negative degree.
inline std::vector<DecoratedTree> negative_basis(const EquationSpec& spec) {
  std::vector<DecoratedTree> out{unit_tree(spec.sig)};
  for (const auto& t : generate_conforming(spec))
    if (degree(t, spec.sig) < 0) out.push_back(t);
  std::sort(out.begin(), out.end(), [](const DecoratedTree& a, const DecoratedTree& b) { return cmp(a, b) < 0; });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const DecoratedTree& a, const DecoratedTree& b) { return cmp(a, b) == 0; }),
            out.end());
  return out;
}

// ---- JSON serialization ----

inline nlohmann::json spec_to_json(const EquationSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["dimension"] = spec.sig.dim();
  j["scaling"] = spec.sig.scaling();
  auto types = [](const std::vector<EdgeType>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : v) arr.push_back({{"name", t.name}, {"degree", rat_str(t.degree)}});
    return arr;
  };
  j["kernels"] = types(spec.sig.kernels());
  j["noises"] = types(spec.sig.noises());
  j["components"] = nlohmann::json::array();
  for (const auto& c : spec.components) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["kernel"] = spec.sig.kernels()[c.kernel].name;
    jc["deps"] = nlohmann::json::array();
    for (const auto& d : c.deps)
      jc["deps"].push_back(
          nlohmann::json::array({spec.sig.type(d.type).name, d.deriv.components()}));
    jc["noises"] = c.channels;
    j["components"].push_back(jc);
  }
  j["cutoffs"] = {{"gamma", rat_str(spec.cutoffs.gamma)},
                  {"maxNoises", spec.cutoffs.maxNoises},
                  {"maxNodeDeco", spec.cutoffs.maxDeco},
                  {"maxEdgeDeriv", spec.cutoffs.maxDeriv}};
  return j;
}

inline EquationSpec spec_from_json(const nlohmann::json& j) {
  auto types = [](const nlohmann::json& arr) {
    std::vector<EdgeType> v;
    for (const auto& t : arr) v.push_back(EdgeType{t.at("name").get<std::string>(), rat_parse(t.at("degree").get<std::string>())});
    return v;
  };
  Signature sig(j.at("dimension").get<std::size_t>(), j.at("scaling").get<std::vector<std::uint32_t>>(),
                types(j.at("kernels")), types(j.at("noises")));
  std::vector<Component> comps;
  for (const auto& jc : j.at("components")) {
    Component c;
    c.name = jc.at("name").get<std::string>();
    TypeId kid;
    if (!sig.find_type(jc.at("kernel").get<std::string>(), kid) || kid.kind != TypeKind::Kernel)
      throw std::invalid_argument("spec_from_json: unknown component kernel");
    c.kernel = kid.index;
    for (const auto& d : jc.at("deps")) {
      TypeId did;
      if (!sig.find_type(d.at(0).get<std::string>(), did) || did.kind != TypeKind::Kernel)
        throw std::invalid_argument("spec_from_json: dependency names an unknown kernel");
      c.deps.push_back(EdgeLabel{did, MultiIndex(d.at(1).get<std::vector<std::uint32_t>>())});
    }
    c.channels = jc.at("noises").get<std::vector<std::uint16_t>>();
    comps.push_back(std::move(c));
  }
  const auto& co = j.at("cutoffs");
  Cutoffs cut{rat_parse(co.at("gamma").get<std::string>()), co.at("maxNoises").get<std::uint32_t>(),
              co.at("maxNodeDeco").get<std::uint32_t>(), co.at("maxEdgeDeriv").get<std::uint32_t>()};
  return EquationSpec(j.at("name").get<std::string>(), std::move(sig), std::move(comps), std::move(cut));
}

inline EquationSpec spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  nlohmann::json j;
  in >> j;
  return spec_from_json(j);
}

}  // namespace grove
