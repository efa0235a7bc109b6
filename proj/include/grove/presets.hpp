#pragma once

// Built-in equation systems. Noise degrees sit a small rational offset kappa
// below the critical exponent so every degree comparison is exact and no tree
// lands on a degree-zero boundary.

#include "grove/rules.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace grove {

inline std::vector<std::string> preset_names() { return {"gkpz", "gpam2d", "phi4like", "bck"}; }

inline EquationSpec make_preset(const std::string& name) {
  auto kernel_label = [](const Signature&, std::vector<std::uint32_t> p) {
    return EdgeLabel{TypeId{TypeKind::Kernel, 0}, MultiIndex(std::vector<std::uint32_t>(p))};
  };

  if (name == "gkpz") {
    // One space dimension, parabolic scaling, noise just below -3/2.
    Signature sig(2, {2, 1}, {{"t1", Rat(2)}}, {{"xi_1", Rat(-151) / 100}});
    Component u{"u", 0,
                {kernel_label(sig, {0, 0}), kernel_label(sig, {0, 1})},
                {0, 1}};
    return EquationSpec("gkpz", sig, {u}, Cutoffs{Rat(2), 3, 2, 1});
  }
  if (name == "gpam2d") {
    // Two space dimensions, noise just below -1; purely multiplicative noise.
    Signature sig(3, {2, 1, 1}, {{"t1", Rat(2)}}, {{"xi_1", Rat(-101) / 100}});
    Component u{"u", 0, {kernel_label(sig, {0, 0, 0})}, {1}};
    return EquationSpec("gpam2d", sig, {u}, Cutoffs{Rat(2), 3, 2, 1});
  }
  if (name == "phi4like") {
    // Three space dimensions, noise just below -5/2.
    Signature sig(4, {2, 1, 1, 1}, {{"t1", Rat(2)}}, {{"xi_1", Rat(-251) / 100}});
    Component u{"u", 0, {kernel_label(sig, {0, 0, 0, 0})}, {0, 1}};
    return EquationSpec("phi4like", sig, {u}, Cutoffs{Rat(2), 3, 1, 0});
  }
  if (name == "bck") {
    // One variable, unit scaling, two noises just below -1/2; every node
    // carries a noise, so the only analytical freedom of a consistent
    // counterterm map is its value on bare noises.
    Signature sig(1, {1}, {{"t1", Rat(1)}}, {{"xi_1", Rat(-51) / 100}, {"xi_2", Rat(-51) / 100}});
    Component u{"u", 0, {kernel_label(sig, {0})}, {1, 2}};
    return EquationSpec("bck", sig, {u}, Cutoffs{Rat(2), 4, 0, 0});
  }
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace grove
