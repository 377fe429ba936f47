#include "bir/validate.hpp"

#include <algorithm>
#include <map>

#include "bir/auxdata.hpp"

namespace bir {

const char* violationCodeName(ViolationCode code) {
  switch (code) {
    case ViolationCode::DuplicateUuid: return "DuplicateUuid";
    case ViolationCode::DanglingReference: return "DanglingReference";
    case ViolationCode::BlockOutOfRange: return "BlockOutOfRange";
    case ViolationCode::ContentsExceedSize: return "ContentsExceedSize";
    case ViolationCode::SymExprOutOfRange: return "SymExprOutOfRange";
    case ViolationCode::CfgEndpointNotCodeOrProxy: return "CfgEndpointNotCodeOrProxy";
    case ViolationCode::AuxDataDecodeFailure: return "AuxDataDecodeFailure";
    case ViolationCode::FunctionTableInconsistent: return "FunctionTableInconsistent";
    case ViolationCode::ScaleZero: return "ScaleZero";
  }
  return "?";
}

std::string Violation::describe() const {
  std::string out = violationCodeName(code);
  out += " " + uuid.str();
  if (offset) out += "+" + std::to_string(*offset);
  out += ": " + message;
  return out;
}

namespace {

enum class EntityKind { Ir, Module, Section, Interval, CodeBlock, DataBlock, Symbol, Proxy };

/// Walk-derived entity table. The validator never trusts the Ir's internal
/// index: with duplicated UUIDs the index hides entities, and hidden
/// entities are exactly what this pass must find.
struct Walk {
  std::map<Uuid, EntityKind> kinds;  // first occurrence wins
  std::map<Uuid, int> counts;

  void see(Uuid id, EntityKind kind) {
    kinds.emplace(id, kind);
    ++counts[id];
  }

  bool isBlockOrProxy(Uuid id) const {
    auto it = kinds.find(id);
    return it != kinds.end() &&
           (it->second == EntityKind::CodeBlock || it->second == EntityKind::DataBlock ||
            it->second == EntityKind::Proxy);
  }
  bool isCodeOrProxy(Uuid id) const {
    auto it = kinds.find(id);
    return it != kinds.end() &&
           (it->second == EntityKind::CodeBlock || it->second == EntityKind::Proxy);
  }
  bool isSymbol(Uuid id) const {
    auto it = kinds.find(id);
    return it != kinds.end() && it->second == EntityKind::Symbol;
  }
};

class Validator {
 public:
  explicit Validator(const Ir& ir) : ir_(ir) {}

  std::vector<Violation> run() {
    walkEntities();
    checkDuplicates();
    checkContainers();
    checkSymbols();
    checkCfg();
    checkAuxData(ir_.uuid(), ir_.auxData());
    for (const auto& m : ir_.modules()) {
      checkAuxData(m->uuid, m->auxData);
      checkFunctionTables(*m);
    }
    std::sort(out_.begin(), out_.end());
    return std::move(out_);
  }

 private:
  void add(ViolationCode code, Uuid id, std::optional<std::uint64_t> offset,
           std::string message) {
    out_.push_back(Violation{code, id, offset, std::move(message)});
  }

  void walkEntities() {
    walk_.see(ir_.uuid(), EntityKind::Ir);
    for (const auto& m : ir_.modules()) {
      walk_.see(m->uuid, EntityKind::Module);
      for (const auto& s : m->sections) {
        walk_.see(s->uuid, EntityKind::Section);
        for (const auto& bi : s->intervals) {
          walk_.see(bi->uuid, EntityKind::Interval);
          for (const auto& b : bi->blocks)
            walk_.see(b->uuid, b->kind == BlockKind::Code ? EntityKind::CodeBlock
                                                          : EntityKind::DataBlock);
        }
      }
      for (const auto& sym : m->symbols) walk_.see(sym->uuid, EntityKind::Symbol);
      for (const auto& p : m->proxyBlocks) walk_.see(p->uuid, EntityKind::Proxy);
    }
  }

  void checkDuplicates() {
    for (const auto& [id, n] : walk_.counts)
      if (n > 1)
        add(ViolationCode::DuplicateUuid, id, std::nullopt,
            std::to_string(n) + " entities share this UUID");
  }

  void checkContainers() {
    for (const auto& m : ir_.modules()) {
      for (const auto& s : m->sections) {
        for (const auto& bi : s->intervals) {
          if (bi->contents.size() > bi->size)
            add(ViolationCode::ContentsExceedSize, bi->uuid, std::nullopt,
                "contents length " + std::to_string(bi->contents.size()) +
                    " exceeds interval size " + std::to_string(bi->size));
          for (const auto& b : bi->blocks)
            if (b->offset > bi->size || b->size > bi->size - b->offset)
              add(ViolationCode::BlockOutOfRange, b->uuid, std::nullopt,
                  "block range [" + std::to_string(b->offset) + ", " +
                      std::to_string(b->offset) + "+" + std::to_string(b->size) +
                      ") exceeds interval size " + std::to_string(bi->size));
          for (const auto& [offset, expr] : bi->symExprs) {
            if (offset >= bi->size)
              add(ViolationCode::SymExprOutOfRange, bi->uuid, offset,
                  "expression anchored at or beyond interval size " +
                      std::to_string(bi->size));
            checkSymExpr(bi->uuid, offset, expr);
          }
        }
      }
    }
  }

  void checkSymExpr(Uuid interval, std::uint64_t offset, const SymbolicExpression& expr) {
    auto requireSymbol = [&](Uuid id) {
      if (!walk_.isSymbol(id))
        add(ViolationCode::DanglingReference, id, offset,
            "expression in interval " + interval.str() + " references a non-symbol UUID");
    };
    if (const auto* c = std::get_if<SymAddrConst>(&expr)) {
      requireSymbol(c->symbol);
    } else {
      const auto& d = std::get<SymAddrAddr>(expr);
      requireSymbol(d.minuend);
      requireSymbol(d.subtrahend);
      if (d.scale == 0)
        add(ViolationCode::ScaleZero, interval, offset,
            "symbol-difference expression with zero scale");
    }
  }

  void checkSymbols() {
    for (const auto& m : ir_.modules())
      for (const auto& sym : m->symbols)
        if (sym->hasReferent()) {
          Uuid ref = std::get<Uuid>(sym->payload);
          if (!walk_.isBlockOrProxy(ref))
            add(ViolationCode::DanglingReference, ref, std::nullopt,
                "referent of symbol \"" + sym->name + "\" (" + sym->uuid.str() +
                    ") is not a block");
        }
  }

  void checkCfg() {
    for (const Edge& e : ir_.cfg().edges())
      for (Uuid end : {e.source, e.target})
        if (!walk_.isCodeOrProxy(end))
          add(ViolationCode::CfgEndpointNotCodeOrProxy, end, std::nullopt,
              "edge " + e.source.str() + " -> " + e.target.str() +
                  " endpoint is not a code or proxy block");
  }

  void checkAuxData(Uuid owner, const AuxDataMap& aux) {
    for (const auto& [label, entry] : aux) {
      const TypeSpec* schema = sanctionedSchema(label);
      if (!schema) continue;
      if (entry.typeSpec != printTypeSpec(*schema)) {
        add(ViolationCode::AuxDataDecodeFailure, owner, std::nullopt,
            "table \"" + label + "\" declares type " + entry.typeSpec + ", registry requires " +
                printTypeSpec(*schema));
        continue;
      }
      if (auto v = decodeValue(*schema, entry.bytes, DecodeMode::Strict); !v)
        add(ViolationCode::AuxDataDecodeFailure, owner, std::nullopt,
            "table \"" + label + "\": " + v.error().describe());
    }
  }

  /// Decodes one of the two function set-tables, keyed by function UUID.
  /// Undecodable tables were already reported; they yield nothing here.
  static std::optional<std::map<Uuid, std::vector<Uuid>>> functionSets(const AuxDataMap& aux,
                                                                       const char* label) {
    auto it = aux.find(label);
    if (it == aux.end()) return std::nullopt;
    const TypeSpec* schema = sanctionedSchema(label);
    if (it->second.typeSpec != printTypeSpec(*schema)) return std::nullopt;
    auto v = decodeValue(*schema, it->second.bytes, DecodeMode::Strict);
    if (!v) return std::nullopt;
    std::map<Uuid, std::vector<Uuid>> out;
    for (const auto& [k, set] : *v.value().asPairs()) {
      std::vector<Uuid>& ids = out[*k.asUuid()];
      for (const AuxValue& item : *set.asList()) ids.push_back(*item.asUuid());
      std::sort(ids.begin(), ids.end());
    }
    return out;
  }

  void checkFunctionTables(const Module& m) {
    auto entries = functionSets(m.auxData, "functionEntries");
    auto blocks = functionSets(m.auxData, "functionBlocks");
    if (entries) {
      for (const auto& [fn, entryIds] : *entries) {
        if (!blocks || !blocks->count(fn)) {
          add(ViolationCode::FunctionTableInconsistent, fn, std::nullopt,
              "function has entries but no functionBlocks record");
          continue;
        }
        const std::vector<Uuid>& blockIds = (*blocks)[fn];
        for (Uuid e : entryIds)
          if (!std::binary_search(blockIds.begin(), blockIds.end(), e))
            add(ViolationCode::FunctionTableInconsistent, fn, std::nullopt,
                "entry block " + e.str() + " is not among the function's blocks");
      }
    }
    // functionNames values must name symbols; scope per the registry is not
    // restricted to the owning module.
    if (auto it = m.auxData.find("functionNames"); it != m.auxData.end()) {
      const TypeSpec* schema = sanctionedSchema("functionNames");
      if (it->second.typeSpec != printTypeSpec(*schema)) return;
      auto v = decodeValue(*schema, it->second.bytes, DecodeMode::Strict);
      if (!v) return;
      for (const auto& [fn, name] : *v.value().asPairs())
        if (!walk_.isSymbol(*name.asUuid()))
          add(ViolationCode::DanglingReference, *name.asUuid(), std::nullopt,
              "functionNames value for " + fn.asUuid()->str() + " is not a symbol");
    }
  }

  const Ir& ir_;
  Walk walk_;
  std::vector<Violation> out_;
};

}  // namespace

std::vector<Violation> validate(const Ir& ir) { return Validator(ir).run(); }

}  // namespace bir
