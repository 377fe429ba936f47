#include "bir/cfg.hpp"

#include <deque>
#include <iterator>

#include "bir/ir.hpp"

namespace bir {

const char* edgeKindName(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::Fallthrough: return "Fallthrough";
    case EdgeKind::Branch: return "Branch";
    case EdgeKind::Call: return "Call";
    case EdgeKind::Return: return "Return";
    case EdgeKind::Syscall: return "Syscall";
    case EdgeKind::Sysret: return "Sysret";
  }
  return "?";
}

std::uint8_t edgeLabelCode(EdgeLabel label) {
  return static_cast<std::uint8_t>((label.conditional ? 1 : 0) | (label.direct ? 2 : 0) |
                                   (static_cast<unsigned>(label.kind) << 2));
}

Result<EdgeLabel> decodeEdgeLabel(std::uint8_t code) {
  if (code >= 24)
    return Error(Errc::InvalidEdgeLabel,
                 "label code " + std::to_string(code) + " has no valid kind ordinal");
  EdgeLabel label;
  label.conditional = (code & 1) != 0;
  label.direct = (code & 2) != 0;
  label.kind = static_cast<EdgeKind>(code >> 2);
  return label;
}

bool Ipcfg::insertEdge(const Edge& e) {
  vertices_.insert(e.source);
  vertices_.insert(e.target);
  return edges_.insert(e).second;
}

bool Ipcfg::removeEdge(const Edge& e) { return edges_.erase(e) != 0; }

void Ipcfg::removeVertex(Uuid v) {
  for (auto it = edges_.begin(); it != edges_.end();)
    it = (it->source == v || it->target == v) ? edges_.erase(it) : std::next(it);
  vertices_.erase(v);
}

std::vector<Edge> Ipcfg::outEdges(Uuid v) const {
  std::vector<Edge> out;
  Edge lo{v, Uuid{}, EdgeLabel{false, false, EdgeKind::Fallthrough}};
  for (auto it = edges_.lower_bound(lo); it != edges_.end() && it->source == v; ++it)
    out.push_back(*it);
  return out;
}

std::vector<Edge> Ipcfg::inEdges(Uuid v) const {
  std::vector<Edge> in;
  for (const Edge& e : edges_)
    if (e.target == v) in.push_back(e);
  return in;
}

bool Ipcfg::hasOutgoingFallthrough(Uuid v) const {
  for (const Edge& e : outEdges(v))
    if (e.label.kind == EdgeKind::Fallthrough) return true;
  return false;
}

std::set<Uuid> Ipcfg::reachable(const std::set<Uuid>& entries,
                                const std::function<bool(const EdgeLabel&)>& follow) const {
  std::set<Uuid> seen = entries;
  std::deque<Uuid> work(entries.begin(), entries.end());
  while (!work.empty()) {
    Uuid v = work.front();
    work.pop_front();
    for (const Edge& e : outEdges(v)) {
      if (!follow(e.label)) continue;
      if (seen.insert(e.target).second) work.push_back(e.target);
    }
  }
  return seen;
}

Result<Edge> addCfgEdge(Ir& ir, Uuid source, Uuid target, EdgeLabel label) {
  for (Uuid end : {source, target}) {
    if (!ir.isCfgNode(end))
      return Error(Errc::EndpointNotCodeOrProxy,
                   "edge endpoint must be a code block or proxy block")
          .entity(end);
  }
  if (label.kind == EdgeKind::Fallthrough && (label.conditional || !label.direct))
    return Error(Errc::InvalidEdgeLabel, "a fallthrough edge is unconditional and direct");
  Edge e{source, target, label};
  if (ir.cfg().hasEdge(e))
    return Error(Errc::DuplicateEdge, "edge triple already present").entity(source);
  if (label.kind == EdgeKind::Fallthrough && ir.cfg().hasOutgoingFallthrough(source))
    return Error(Errc::SecondFallthrough, "source already has an outgoing fallthrough")
        .entity(source);
  ir.cfg().insertEdge(e);
  return e;
}

}  // namespace bir
