#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <vector>

#include "bir/auxdata.hpp"
#include "bir/rewrite.hpp"
#include "bir/validate.hpp"
#include "bir/wire.hpp"

namespace bir::cli {

namespace {

std::optional<Bytes> readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) return std::nullopt;
  return bytes;
}

bool writeFile(const std::string& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  return out.good();
}

/// Loads a .bir file, printing the failure to `err`. Null means exit 2.
std::unique_ptr<Ir> loadOrComplain(const std::string& path, std::ostream& err) {
  auto bytes = readFile(path);
  if (!bytes) {
    err << "cannot read " << path << "\n";
    return nullptr;
  }
  auto ir = load(*bytes);
  if (!ir) {
    err << path << ": " << ir.error().describe() << "\n";
    return nullptr;
  }
  return std::move(ir).value();
}

std::string hex(std::uint64_t x) {
  std::ostringstream s;
  s << "0x" << std::hex << x;
  return s.str();
}

std::string flagNames(SectionFlagSet flags) {
  std::string out;
  for (int f = 0; f < kSectionFlagCount; ++f)
    if (flags.contains(static_cast<SectionFlag>(f))) {
      if (!out.empty()) out += "|";
      out += sectionFlagName(static_cast<SectionFlag>(f));
    }
  return out.empty() ? "none" : out;
}

std::string signedSuffix(std::int64_t x) {
  if (x == 0) return "";
  return x > 0 ? "+" + std::to_string(x) : std::to_string(x);
}

/// Symbol name for rendering; falls back to the UUID when the expression
/// references something that is not a symbol.
std::string symbolName(const Ir& ir, Uuid id) {
  const Symbol* sym = ir.findSymbol(id);
  return sym ? sym->name : id.str();
}

std::string renderExpr(const Ir& ir, const SymbolicExpression& expr) {
  if (const auto* c = std::get_if<SymAddrConst>(&expr))
    return symbolName(ir, c->symbol) + signedSuffix(c->offset);
  const auto& d = std::get<SymAddrAddr>(expr);
  std::string out =
      "(" + symbolName(ir, d.minuend) + "-" + symbolName(ir, d.subtrahend) + ")";
  if (d.scale != 1) out += "/" + std::to_string(d.scale);
  return out + signedSuffix(d.offset);
}

std::string edgeLabelText(EdgeLabel label) {
  std::string out = edgeKindName(label.kind);
  if (label.conditional) out += ",cond";
  if (!label.direct) out += ",indirect";
  return out;
}

/// Gathers every `comments` entry of the IR and its modules, keyed by the
/// commented element. IR-level entries come before module-level ones.
std::map<Uuid, std::vector<std::pair<std::uint64_t, std::string>>> gatherComments(
    const Ir& ir) {
  std::map<Uuid, std::vector<std::pair<std::uint64_t, std::string>>> out;
  auto consume = [&](const AuxDataMap& aux) {
    auto table = getTable(aux, "comments", *sanctionedSchema("comments"));
    if (!table || !table.value()) return;
    for (const auto& [k, v] : *table.value()->asPairs()) {
      const Offset& at = *k.asOffset();
      out[at.element].emplace_back(at.displacement, *v.asString());
    }
  };
  consume(ir.auxData());
  for (const auto& m : ir.modules()) consume(m->auxData);
  for (auto& [element, notes] : out)
    std::stable_sort(notes.begin(), notes.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::string hexBytes(const Bytes& bytes, std::size_t limit) {
  std::ostringstream s;
  s << std::hex << std::setfill('0');
  std::size_t n = std::min(bytes.size(), limit);
  for (std::size_t i = 0; i < n; ++i) {
    if (i) s << " ";
    s << std::setw(2) << static_cast<unsigned>(bytes[i]);
  }
  if (bytes.size() > limit) s << " ..";
  return s.str();
}

}  // namespace

int runValidate(const std::string& path, std::ostream& out, std::ostream& err) {
  auto ir = loadOrComplain(path, err);
  if (!ir) return 2;
  auto violations = validate(*ir);
  for (const Violation& v : violations) out << v.describe() << "\n";
  return violations.empty() ? 0 : 1;
}

int runStats(const std::string& path, std::ostream& out, std::ostream& err) {
  auto ir = loadOrComplain(path, err);
  if (!ir) return 2;
  std::uint64_t sections = 0, intervals = 0, codeBlocks = 0, dataBlocks = 0, proxies = 0,
                symbols = 0, exprs = 0;
  for (const auto& m : ir->modules()) {
    sections += m->sections.size();
    symbols += m->symbols.size();
    proxies += m->proxyBlocks.size();
    for (const auto& s : m->sections) {
      intervals += s->intervals.size();
      for (const auto& bi : s->intervals) {
        exprs += bi->symExprs.size();
        for (const auto& b : bi->blocks)
          (b->kind == BlockKind::Code ? codeBlocks : dataBlocks) += 1;
      }
    }
  }
  out << "modules: " << ir->modules().size() << "\n";
  out << "sections: " << sections << "\n";
  out << "intervals: " << intervals << "\n";
  out << "code blocks: " << codeBlocks << "\n";
  out << "data blocks: " << dataBlocks << "\n";
  out << "proxy blocks: " << proxies << "\n";
  out << "symbols: " << symbols << "\n";
  out << "sym exprs: " << exprs << "\n";
  out << "edges: " << ir->cfg().edges().size() << "\n";
  std::map<EdgeKind, std::uint64_t> byKind;
  for (const Edge& e : ir->cfg().edges()) ++byKind[e.label.kind];
  for (int k = 0; k <= static_cast<int>(EdgeKind::Sysret); ++k) {
    EdgeKind kind = static_cast<EdgeKind>(k);
    out << "  " << edgeKindName(kind) << ": " << byKind[kind] << "\n";
  }
  std::uint64_t tables = ir->auxData().size();
  for (const auto& m : ir->modules()) tables += m->auxData.size();
  out << "aux tables: " << tables << "\n";
  auto printAux = [&](const std::string& scope, const AuxDataMap& aux) {
    for (const auto& [label, entry] : aux) {
      out << "  " << scope << " \"" << label << "\": " << entry.bytes.size() << " bytes";
      if (!sanctionedSchema(label)) out << " [unsanctioned]";
      out << "\n";
    }
  };
  printAux("ir", ir->auxData());
  for (std::size_t i = 0; i < ir->modules().size(); ++i)
    printAux("module[" + std::to_string(i) + "]", ir->modules()[i]->auxData);
  return 0;
}

int runDump(const std::string& path, std::ostream& out, std::ostream& err) {
  auto ir = loadOrComplain(path, err);
  if (!ir) return 2;
  auto comments = gatherComments(*ir);
  auto printComments = [&](Uuid element, const std::string& indent) {
    auto it = comments.find(element);
    if (it == comments.end()) return;
    for (const auto& [displacement, text] : it->second)
      out << indent << "+" << displacement << ": " << text << "\n";
  };
  out << "ir " << ir->uuid().str() << " version " << ir->version() << "\n";
  for (const auto& m : ir->modules()) {
    out << "module " << m->uuid.str() << " \"" << m->name << "\" isa " << isaName(m->isa)
        << " format " << fileFormatName(m->fileFormat);
    if (m->preferredBase) out << " base " << hex(*m->preferredBase);
    out << "\n";
    for (const auto& s : m->sections) {
      out << "  section " << s->uuid.str() << " \"" << s->name << "\" flags "
          << flagNames(s->flags) << "\n";
      for (const auto& bi : s->intervals) {
        out << "    interval " << bi->uuid.str() << " ";
        if (bi->address)
          out << "addr " << hex(*bi->address);
        else
          out << "unplaced";
        out << " size " << bi->size << "\n";
        printComments(bi->uuid, "      ");
        for (const auto& b : bi->blocks) {
          out << "      block " << b->uuid.str() << " "
              << (b->kind == BlockKind::Code ? "code" : "data") << " offset " << b->offset
              << " size " << b->size << "\n";
          if (b->size > 0) {
            auto bytes = ir->blockBytes(b->uuid);
            if (bytes) out << "        bytes: " << hexBytes(bytes.value(), 16) << "\n";
          }
          printComments(b->uuid, "        ");
        }
        for (const auto& [offset, expr] : bi->symExprs)
          out << "      symexpr +" << offset << ": " << renderExpr(*ir, expr) << "\n";
      }
    }
    for (const auto& sym : m->symbols) {
      out << "  symbol " << sym->uuid.str() << " \"" << sym->name << "\" ";
      if (sym->hasValue())
        out << "= " << std::get<std::int64_t>(sym->payload);
      else if (sym->hasReferent())
        out << "-> " << std::get<Uuid>(sym->payload).str();
      else
        out << "undefined";
      out << "\n";
    }
    for (const auto& p : m->proxyBlocks) out << "  proxy " << p->uuid.str() << "\n";
  }
  return 0;
}

int runCfgDot(const std::string& path, std::ostream& out, std::ostream& err) {
  auto ir = loadOrComplain(path, err);
  if (!ir) return 2;
  struct NodeInfo {
    bool proxy;
  };
  std::map<Uuid, NodeInfo> nodes;
  for (const auto& m : ir->modules()) {
    for (const auto& s : m->sections)
      for (const auto& bi : s->intervals)
        for (const auto& b : bi->blocks)
          if (b->kind == BlockKind::Code) nodes.emplace(b->uuid, NodeInfo{false});
    for (const auto& p : m->proxyBlocks) nodes.emplace(p->uuid, NodeInfo{true});
  }
  out << "digraph cfg {\n";
  for (const auto& [id, info] : nodes) {
    out << "  \"" << id.str() << "\" [shape=box";
    if (info.proxy) out << ",style=dashed";
    out << "];\n";
  }
  for (const Edge& e : ir->cfg().edges())
    out << "  \"" << e.source.str() << "\" -> \"" << e.target.str() << "\" [label=\""
        << edgeLabelText(e.label) << "\"];\n";
  out << "}\n";
  return 0;
}

namespace {

/// Field-by-field entity comparison feeding deterministic report lines.
class Differ {
 public:
  Differ(const Ir& a, const Ir& b, std::ostream& out) : a_(a), b_(b), out_(out) {}

  int run() {
    if (a_.uuid() != b_.uuid())
      changed("ir", a_.uuid(), "uuid " + a_.uuid().str() + " -> " + b_.uuid().str());
    if (a_.version() != b_.version())
      changed("ir", a_.uuid(),
              "version " + std::to_string(a_.version()) + " -> " +
                  std::to_string(b_.version()));
    diffModules();
    diffCfg();
    diffAux("ir", a_.auxData(), b_.auxData());
    return count_ == 0 ? 0 : 1;
  }

 private:
  void line(const std::string& kind, const std::string& what, Uuid id,
            const std::string& detail) {
    ++count_;
    out_ << kind << " " << what << " " << id.str();
    if (!detail.empty()) out_ << ": " << detail;
    out_ << "\n";
  }
  void added(const std::string& what, Uuid id, const std::string& detail = "") {
    line("Added", what, id, detail);
  }
  void removed(const std::string& what, Uuid id, const std::string& detail = "") {
    line("Removed", what, id, detail);
  }
  void changed(const std::string& what, Uuid id, const std::string& detail) {
    line("Changed", what, id, detail);
  }

  template <typename T>
  static std::map<Uuid, const T*> byUuid(const std::vector<std::unique_ptr<T>>& items) {
    std::map<Uuid, const T*> out;
    for (const auto& item : items) out.emplace(item->uuid, item.get());
    return out;
  }

  /// Walks two UUID-keyed maps in byte order, reporting one-sided entries
  /// and invoking `both` on shared ones.
  template <typename T, typename Fn>
  void diffKeyed(const std::string& what, const std::map<Uuid, const T*>& left,
                 const std::map<Uuid, const T*>& right, Fn&& both) {
    for (const auto& [id, item] : left) {
      auto it = right.find(id);
      if (it == right.end())
        removed(what, id);
      else
        both(id, *item, *it->second);
    }
    for (const auto& [id, item] : right)
      if (!left.count(id)) added(what, id);
  }

  template <typename T>
  void diffOrder(const std::string& what, Uuid parent,
                 const std::vector<std::unique_ptr<T>>& left,
                 const std::vector<std::unique_ptr<T>>& right) {
    // Stored order is canonical; a pure reordering of the same children is a
    // structural change even though the keyed comparison sees no edits.
    std::vector<Uuid> l, r;
    for (const auto& item : left) l.push_back(item->uuid);
    for (const auto& item : right) r.push_back(item->uuid);
    std::vector<Uuid> ls = l, rs = r;
    std::sort(ls.begin(), ls.end());
    std::sort(rs.begin(), rs.end());
    if (ls == rs && l != r) changed(what, parent, "child order differs");
  }

  void diffModules() {
    diffOrder("ir", a_.uuid(), a_.modules(), b_.modules());
    diffKeyed<Module>("module", byUuid(a_.modules()), byUuid(b_.modules()),
                      [&](Uuid id, const Module& ma, const Module& mb) {
                        if (ma.name != mb.name)
                          changed("module", id, "name \"" + ma.name + "\" -> \"" + mb.name + "\"");
                        if (ma.isa != mb.isa)
                          changed("module", id, std::string("isa ") + isaName(ma.isa) + " -> " +
                                                    isaName(mb.isa));
                        if (ma.fileFormat != mb.fileFormat)
                          changed("module", id, std::string("format ") +
                                                    fileFormatName(ma.fileFormat) + " -> " +
                                                    fileFormatName(mb.fileFormat));
                        if (ma.preferredBase != mb.preferredBase)
                          changed("module", id, "preferred base differs");
                        diffOrder("module", id, ma.sections, mb.sections);
                        diffKeyed<Section>("section", byUuid(ma.sections), byUuid(mb.sections),
                                           [&](Uuid sid, const Section& sa, const Section& sb) {
                                             diffSection(sid, sa, sb);
                                           });
                        diffKeyed<Symbol>("symbol", byUuid(ma.symbols), byUuid(mb.symbols),
                                          [&](Uuid sid, const Symbol& sa, const Symbol& sb) {
                                            if (sa.name != sb.name)
                                              changed("symbol", sid,
                                                      "name \"" + sa.name + "\" -> \"" +
                                                          sb.name + "\"");
                                            if (sa.payload != sb.payload)
                                              changed("symbol", sid, "payload differs");
                                          });
                        diffKeyed<ProxyBlock>("proxy", byUuid(ma.proxyBlocks),
                                              byUuid(mb.proxyBlocks),
                                              [](Uuid, const ProxyBlock&, const ProxyBlock&) {});
                        diffAux("module " + id.str(), ma.auxData, mb.auxData);
                      });
  }

  void diffSection(Uuid id, const Section& sa, const Section& sb) {
    if (sa.name != sb.name)
      changed("section", id, "name \"" + sa.name + "\" -> \"" + sb.name + "\"");
    if (sa.flags != sb.flags)
      changed("section", id, "flags " + flagNames(sa.flags) + " -> " + flagNames(sb.flags));
    diffOrder("section", id, sa.intervals, sb.intervals);
    diffKeyed<ByteInterval>(
        "interval", byUuid(sa.intervals), byUuid(sb.intervals),
        [&](Uuid iid, const ByteInterval& ia, const ByteInterval& ib) {
          diffInterval(iid, ia, ib);
        });
  }

  void diffInterval(Uuid id, const ByteInterval& ia, const ByteInterval& ib) {
    if (ia.address != ib.address) changed("interval", id, "address differs");
    if (ia.size != ib.size)
      changed("interval", id,
              "size " + std::to_string(ia.size) + " -> " + std::to_string(ib.size));
    if (ia.contents != ib.contents) changed("interval", id, "contents differ");
    diffOrder("interval", id, ia.blocks, ib.blocks);
    diffKeyed<ByteBlock>("block", byUuid(ia.blocks), byUuid(ib.blocks),
                         [&](Uuid bid, const ByteBlock& ba, const ByteBlock& bb) {
                           if (ba.kind != bb.kind) changed("block", bid, "kind differs");
                           if (ba.offset != bb.offset)
                             changed("block", bid,
                                     "offset " + std::to_string(ba.offset) + " -> " +
                                         std::to_string(bb.offset));
                           if (ba.size != bb.size)
                             changed("block", bid,
                                     "size " + std::to_string(ba.size) + " -> " +
                                         std::to_string(bb.size));
                         });
    for (const auto& [offset, expr] : ia.symExprs) {
      auto it = ib.symExprs.find(offset);
      if (it == ib.symExprs.end())
        removed("symexpr", id, "+" + std::to_string(offset));
      else if (!(expr == it->second))
        changed("symexpr", id, "+" + std::to_string(offset));
    }
    for (const auto& [offset, expr] : ib.symExprs)
      if (!ia.symExprs.count(offset)) added("symexpr", id, "+" + std::to_string(offset));
  }

  void diffCfg() {
    const auto& ea = a_.cfg().edges();
    const auto& eb = b_.cfg().edges();
    for (const Edge& e : ea)
      if (!eb.count(e))
        removed("edge", e.source, "-> " + e.target.str() + " [" + edgeLabelText(e.label) + "]");
    for (const Edge& e : eb)
      if (!ea.count(e))
        added("edge", e.source, "-> " + e.target.str() + " [" + edgeLabelText(e.label) + "]");
    std::set<Uuid> va = a_.cfg().vertices();
    std::set<Uuid> vb = b_.cfg().vertices();
    for (Uuid v : va)
      if (!vb.count(v)) removed("vertex", v);
    for (Uuid v : vb)
      if (!va.count(v)) added("vertex", v);
  }

  void diffAux(const std::string& scope, const AuxDataMap& aa, const AuxDataMap& ab) {
    for (const auto& [label, entry] : aa) {
      auto it = ab.find(label);
      if (it == ab.end()) {
        ++count_;
        out_ << "Removed auxdata " << scope << " \"" << label << "\"\n";
      } else if (!(entry == it->second)) {
        ++count_;
        out_ << "Changed auxdata " << scope << " \"" << label << "\"\n";
      }
    }
    for (const auto& [label, entry] : ab)
      if (!aa.count(label)) {
        ++count_;
        out_ << "Added auxdata " << scope << " \"" << label << "\"\n";
      }
  }

  const Ir& a_;
  const Ir& b_;
  std::ostream& out_;
  int count_ = 0;
};

}  // namespace

int runDiff(const std::string& pathA, const std::string& pathB, std::ostream& out,
            std::ostream& err) {
  auto a = loadOrComplain(pathA, err);
  if (!a) return 2;
  auto b = loadOrComplain(pathB, err);
  if (!b) return 2;
  return Differ(*a, *b, out).run();
}

int runCanonicalize(const std::string& path, const std::string& outPath, std::ostream& err) {
  auto bytes = readFile(path);
  if (!bytes) {
    err << "cannot read " << path << "\n";
    return 2;
  }
  auto canonical = canonicalize(*bytes);
  if (!canonical) {
    err << path << ": " << canonical.error().describe() << "\n";
    return 2;
  }
  if (!writeFile(outPath, canonical.value())) {
    err << "cannot write " << outPath << "\n";
    return 2;
  }
  return 0;
}

int runLayout(const std::string& path, std::uint64_t base, const std::string& imagePath,
              const std::string& mapPath, std::ostream& err) {
  auto ir = loadOrComplain(path, err);
  if (!ir) return 2;
  auto assignment = layout(*ir, base);
  if (!assignment) {
    err << "layout: " << assignment.error().describe() << "\n";
    return 1;
  }
  auto image = buildImage(*ir, assignment.value());
  if (!image) {
    err << "image: " << image.error().describe() << "\n";
    return 1;
  }
  if (!writeFile(imagePath, image.value().bytes)) {
    err << "cannot write " << imagePath << "\n";
    return 2;
  }
  std::ostringstream map;
  for (const auto& m : ir->modules())
    for (const auto& s : m->sections)
      for (const auto& bi : s->intervals)
        map << bi->uuid.str() << " " << hex(assignment.value().base.at(bi->uuid)) << " "
            << bi->size << "\n";
  std::string text = map.str();
  Bytes mapBytes(text.begin(), text.end());
  if (!writeFile(mapPath, mapBytes)) {
    err << "cannot write " << mapPath << "\n";
    return 2;
  }
  return 0;
}

}  // namespace bir::cli
