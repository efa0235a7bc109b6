#pragma once

// Type data shared by every tree operation: the space-time dimension d+1, the
// scaling vector s, and the named edge types. Noise types have degree < 0 and
// may only label edges to leaves; kernel types have degree > 0.

#include "grove/multiindex.hpp"
#include "grove/rational.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace grove {

enum class TypeKind : std::uint8_t { Kernel = 0, Noise = 1 };

struct TypeId {
  TypeKind kind = TypeKind::Kernel;
  std::uint16_t index = 0;  // into Signature::kernels / Signature::noises

  bool operator==(const TypeId& o) const { return kind == o.kind && index == o.index; }
  bool operator!=(const TypeId& o) const { return !(*this == o); }
  bool operator<(const TypeId& o) const {
    if (kind != o.kind) return kind < o.kind;
    return index < o.index;
  }
};

// Edge decoration (t, p): type plus derivative multi-index.
struct EdgeLabel {
  TypeId type;
  MultiIndex deriv;

  bool operator==(const EdgeLabel& o) const { return type == o.type && deriv == o.deriv; }
  bool operator!=(const EdgeLabel& o) const { return !(*this == o); }
  bool operator<(const EdgeLabel& o) const {
    if (type != o.type) return type < o.type;
    return deriv < o.deriv;
  }
};

struct EdgeType {
  std::string name;
  Rat degree;
};

class Signature {
 public:
  Signature(std::size_t dim, std::vector<std::uint32_t> scaling, std::vector<EdgeType> kernels,
            std::vector<EdgeType> noises)
      : dim_(dim), scaling_(std::move(scaling)), kernels_(std::move(kernels)), noises_(std::move(noises)) {
    if (dim_ == 0) throw std::invalid_argument("Signature: dimension must be positive");
    if (scaling_.size() != dim_) throw std::invalid_argument("Signature: scaling size != dimension");
    for (auto s : scaling_)
      if (s == 0) throw std::invalid_argument("Signature: scaling components must be positive");
    for (const auto& k : kernels_)
      if (!(k.degree > 0)) throw std::invalid_argument("Signature: kernel degree must be > 0: " + k.name);
    for (const auto& n : noises_)
      if (!(n.degree < 0)) throw std::invalid_argument("Signature: noise degree must be < 0: " + n.name);
  }

  std::size_t dim() const { return dim_; }
  const std::vector<std::uint32_t>& scaling() const { return scaling_; }
  const std::vector<EdgeType>& kernels() const { return kernels_; }
  const std::vector<EdgeType>& noises() const { return noises_; }

  const EdgeType& type(TypeId id) const {
    const auto& v = (id.kind == TypeKind::Kernel) ? kernels_ : noises_;
    if (id.index >= v.size()) throw std::out_of_range("Signature: unknown type index");
    return v[id.index];
  }

  Rat degree_of(TypeId id) const { return type(id).degree; }

  // Weighted size |p|_s = sum_i s_i p_i.
  Rat weighted(const MultiIndex& p) const {
    if (p.dim() != dim_) throw std::invalid_argument("Signature: multi-index dimension mismatch");
    Int t = 0;
    for (std::size_t i = 0; i < dim_; ++i) t += Int(scaling_[i]) * p[i];
    return Rat(t);
  }

  // Degree contribution |t|_s - |p|_s of one edge.
  Rat edge_degree(const EdgeLabel& e) const { return degree_of(e.type) - weighted(e.deriv); }

  // Name lookups used by the parser; returns false when absent.
  bool find_type(const std::string& name, TypeId& out) const {
    for (std::size_t i = 0; i < kernels_.size(); ++i)
      if (kernels_[i].name == name) {
        out = TypeId{TypeKind::Kernel, static_cast<std::uint16_t>(i)};
        return true;
      }
    for (std::size_t i = 0; i < noises_.size(); ++i)
      if (noises_[i].name == name) {
        out = TypeId{TypeKind::Noise, static_cast<std::uint16_t>(i)};
        return true;
      }
    return false;
  }

  MultiIndex zero_index() const { return MultiIndex(dim_); }

 private:
  std::size_t dim_;
  std::vector<std::uint32_t> scaling_;
  std::vector<EdgeType> kernels_;
  std::vector<EdgeType> noises_;
};

}  // namespace grove
