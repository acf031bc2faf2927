#pragma once

#include <array>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "drdmf/netdata/case.hpp"

namespace drdmf {

/// Decision-variable families. Declaration order is the column order.
enum class VarKind : int {
  kC,      // parent-child arc indicator, per arc
  kF,      // fictitious flow, per arc
  kSvTp,   // disconnection slack, per node
  kVCl,    // close action, per edge
  kVOp,    // open action, per edge
  kPG,     // DG active output, per DG
  kQG,     // DG reactive output, per DG
  kSp,     // served active load, per node
  kSq,     // served reactive load, per node
  kPF,     // active line flow from_node -> to_node, per edge
  kQF,     // reactive line flow, per edge
  kV,      // voltage magnitude, per node
  kDelta,  // voltage-drop relaxation, per edge
  kU,      // line survives (1) or failed (0), per edge
  kCount
};

inline constexpr int kNumVarKinds = static_cast<int>(VarKind::kCount);

inline const char* kind_name(VarKind k) {
  static constexpr std::array<const char*, kNumVarKinds> names{
      "c", "f", "sv_tp", "v_cl", "v_op", "PG", "QG", "S_p", "S_q", "PF", "QF", "V", "delta", "u"};
  return names.at(static_cast<int>(k));
}

inline bool is_first_stage(VarKind k) { return static_cast<int>(k) <= static_cast<int>(VarKind::kVOp); }
inline bool is_second_stage(VarKind k) {
  return static_cast<int>(k) >= static_cast<int>(VarKind::kPG) &&
         static_cast<int>(k) <= static_cast<int>(VarKind::kDelta);
}

namespace detail {
inline int checked_mul(long long a, long long b) {
  const long long r = a * b;
  if (a < 0 || b < 0 || (a != 0 && r / a != b) || r > std::numeric_limits<int>::max())
    throw std::overflow_error("variable index overflow");
  return static_cast<int>(r);
}
inline int checked_add(long long a, long long b) {
  const long long r = a + b;
  if (r > std::numeric_limits<int>::max()) throw std::overflow_error("variable index overflow");
  return static_cast<int>(r);
}
}  // namespace detail

/// Dense column numbering: column(kind, element, t) = offset(kind) + element*T + t.
class VariableIndex {
 public:
  VariableIndex() = default;

  VariableIndex(int num_nodes, int num_edges, int num_dgs, int horizon) : horizon_(horizon) {
    if (horizon < 1 || num_nodes < 0 || num_edges < 0 || num_dgs < 0)
      throw std::invalid_argument("invalid dimensions for variable index");
    int off = 0;
    for (int k = 0; k < kNumVarKinds; ++k) {
      const auto kind = static_cast<VarKind>(k);
      int elems = 0;
      switch (kind) {
        case VarKind::kC:
        case VarKind::kF: elems = detail::checked_mul(2, num_edges); break;
        case VarKind::kSvTp:
        case VarKind::kSp:
        case VarKind::kSq:
        case VarKind::kV: elems = num_nodes; break;
        case VarKind::kPG:
        case VarKind::kQG: elems = num_dgs; break;
        default: elems = num_edges;
      }
      elements_[k] = elems;
      offset_[k] = off;
      off = detail::checked_add(off, detail::checked_mul(elems, horizon));
    }
    total_ = off;
  }

  static VariableIndex build(const Topology& topo) {
    return VariableIndex(topo.num_nodes, topo.num_edges, topo.num_dgs, topo.horizon);
  }

  [[nodiscard]] int col(VarKind kind, int element, int t) const {
    const int k = static_cast<int>(kind);
    if (element < 0 || element >= elements_[k] || t < 0 || t >= horizon_)
      throw std::out_of_range(std::string("variable ") + kind_name(kind) + " subscript out of range");
    return offset_[k] + element * horizon_ + t;
  }

  /// Inverse of col().
  [[nodiscard]] std::tuple<VarKind, int, int> decode(int column) const {
    if (column < 0 || column >= total_) throw std::out_of_range("column out of range");
    int k = kNumVarKinds - 1;
    while (offset_[k] > column || elements_[k] == 0) --k;
    const int local = column - offset_[k];
    return {static_cast<VarKind>(k), local / horizon_, local % horizon_};
  }

  [[nodiscard]] int offset(VarKind kind) const { return offset_[static_cast<int>(kind)]; }
  [[nodiscard]] int elements(VarKind kind) const { return elements_[static_cast<int>(kind)]; }
  [[nodiscard]] int count(VarKind kind) const { return elements(kind) * horizon_; }
  [[nodiscard]] int total() const { return total_; }
  [[nodiscard]] int horizon() const { return horizon_; }

  [[nodiscard]] std::string name(int column) const {
    const auto [kind, e, t] = decode(column);
    return std::string(kind_name(kind)) + "_" + std::to_string(e) + "_" + std::to_string(t);
  }

  bool operator==(const VariableIndex&) const = default;

 private:
  int horizon_ = 1;
  int total_ = 0;
  std::array<int, kNumVarKinds> offset_{};
  std::array<int, kNumVarKinds> elements_{};
};

inline VariableIndex index_variables(const CaseData& c) {
  return VariableIndex::build(Topology::build(c));
}

}  // namespace drdmf
