#pragma once

#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "bir/error.hpp"
#include "bir/uuid.hpp"

namespace bir {

enum class EdgeKind : std::uint8_t {
  Fallthrough = 0,
  Branch = 1,
  Call = 2,
  Return = 3,
  Syscall = 4,
  Sysret = 5,
};

const char* edgeKindName(EdgeKind kind);

/// Three-dimensional edge label: conditional/unconditional, direct/indirect,
/// and control-flow kind.
struct EdgeLabel {
  bool conditional = false;
  bool direct = true;
  EdgeKind kind = EdgeKind::Fallthrough;

  auto operator<=>(const EdgeLabel&) const = default;
};

/// Packs a label into one byte: bit0 = conditional, bit1 = direct,
/// bits 2-4 = kind ordinal. All 24 label combinations are encodable.
std::uint8_t edgeLabelCode(EdgeLabel label);
Result<EdgeLabel> decodeEdgeLabel(std::uint8_t code);

struct Edge {
  Uuid source;
  Uuid target;
  EdgeLabel label;

  auto operator<=>(const Edge&) const = default;
};

/// Canonical edge order: (source, target, label code).
struct EdgeLess {
  bool operator()(const Edge& a, const Edge& b) const {
    if (a.source != b.source) return a.source < b.source;
    if (a.target != b.target) return a.target < b.target;
    return edgeLabelCode(a.label) < edgeLabelCode(b.label);
  }
};

/// The interprocedural CFG: one graph for the entire IR. Vertices are block
/// UUIDs and outlive their edges; edges form a duplicate-free multiset of
/// (source, target, label) triples.
///
/// This container performs no endpoint-type checking; use addCfgEdge (ir.hpp)
/// to insert edges with the endpoint and fallthrough rules enforced.
class Ipcfg {
 public:
  const std::set<Uuid>& vertices() const { return vertices_; }
  const std::set<Edge, EdgeLess>& edges() const { return edges_; }

  void insertVertex(Uuid v) { vertices_.insert(v); }

  /// Unchecked insert; returns false when the triple is already present.
  /// Endpoints are added to the vertex set either way.
  bool insertEdge(const Edge& e);

  /// Removes one edge; vertices stay even when isolated.
  bool removeEdge(const Edge& e);

  /// Removes a vertex together with every incident edge.
  void removeVertex(Uuid v);

  bool hasEdge(const Edge& e) const { return edges_.count(e) != 0; }

  /// Edges leaving `v`, in canonical order. Unknown vertices yield an empty
  /// sequence.
  std::vector<Edge> outEdges(Uuid v) const;
  std::vector<Edge> inEdges(Uuid v) const;

  bool hasOutgoingFallthrough(Uuid v) const;

  /// Least fixed point of successor expansion from `entries` through edges
  /// accepted by `follow`. Entries are always included.
  std::set<Uuid> reachable(const std::set<Uuid>& entries,
                           const std::function<bool(const EdgeLabel&)>& follow) const;

 private:
  std::set<Uuid> vertices_;
  std::set<Edge, EdgeLess> edges_;
};

}  // namespace bir
