#include "bir/wire.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "bir/auxdata.hpp"
#include "bir/validate.hpp"

namespace bir {

namespace {

// --- Writer ---------------------------------------------------------------------

void putU8(Bytes& out, std::uint8_t x) { out.push_back(x); }

void putU32(Bytes& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

void putU64(Bytes& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

void putI64(Bytes& out, std::int64_t x) { putU64(out, static_cast<std::uint64_t>(x)); }

void putUuid(Bytes& out, Uuid id) { out.insert(out.end(), id.bytes.begin(), id.bytes.end()); }

void putString(Bytes& out, const std::string& s) {
  putU64(out, s.size());
  out.insert(out.end(), s.begin(), s.end());
}

void putBlob(Bytes& out, const Bytes& b) {
  putU64(out, b.size());
  out.insert(out.end(), b.begin(), b.end());
}

void putOptU64(Bytes& out, const std::optional<std::uint64_t>& x) {
  putU8(out, x ? 1 : 0);
  if (x) putU64(out, *x);
}

void writeSymExpr(Bytes& out, const SymbolicExpression& expr) {
  if (const auto* c = std::get_if<SymAddrConst>(&expr)) {
    putU8(out, 0);
    putUuid(out, c->symbol);
    putI64(out, c->offset);
  } else {
    const auto& d = std::get<SymAddrAddr>(expr);
    putU8(out, 1);
    putUuid(out, d.minuend);
    putUuid(out, d.subtrahend);
    putI64(out, d.scale);
    putI64(out, d.offset);
  }
}

void writeInterval(Bytes& out, const ByteInterval& bi) {
  putUuid(out, bi.uuid);
  putOptU64(out, bi.address);
  putU64(out, bi.size);
  putBlob(out, bi.contents);
  putU64(out, bi.blocks.size());
  for (const auto& b : bi.blocks) {
    putU64(out, b->offset);
    putU8(out, static_cast<std::uint8_t>(b->kind));
    putUuid(out, b->uuid);
    putU64(out, b->size);
  }
  // Expression map: numeric offset order is not encoded-key order for
  // little-endian u64 keys, so re-sort by encoding.
  std::vector<std::pair<Bytes, const SymbolicExpression*>> entries;
  entries.reserve(bi.symExprs.size());
  for (const auto& [offset, expr] : bi.symExprs) {
    Bytes key;
    putU64(key, offset);
    entries.emplace_back(std::move(key), &expr);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  putU64(out, entries.size());
  for (const auto& [key, expr] : entries) {
    out.insert(out.end(), key.begin(), key.end());
    writeSymExpr(out, *expr);
  }
}

void writeSection(Bytes& out, const Section& s) {
  putUuid(out, s.uuid);
  putString(out, s.name);
  Bytes flags;
  for (int f = 0; f < kSectionFlagCount; ++f)
    if (s.flags.contains(static_cast<SectionFlag>(f)))
      flags.push_back(static_cast<std::uint8_t>(f));
  putU64(out, flags.size());
  out.insert(out.end(), flags.begin(), flags.end());
  putU64(out, s.intervals.size());
  for (const auto& bi : s.intervals) writeInterval(out, *bi);
}

void writeSymbol(Bytes& out, const Symbol& sym) {
  putUuid(out, sym.uuid);
  putString(out, sym.name);
  putU8(out, static_cast<std::uint8_t>(sym.payload.index()));
  if (const auto* value = std::get_if<std::int64_t>(&sym.payload))
    putI64(out, *value);
  else if (const auto* ref = std::get_if<Uuid>(&sym.payload))
    putUuid(out, *ref);
}

void writeAuxMap(Bytes& out, const AuxDataMap& aux) {
  std::vector<std::pair<Bytes, const AuxDataEntry*>> entries;
  entries.reserve(aux.size());
  for (const auto& [label, entry] : aux) {
    Bytes key;
    putString(key, label);
    entries.emplace_back(std::move(key), &entry);
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  putU64(out, entries.size());
  for (const auto& [key, entry] : entries) {
    out.insert(out.end(), key.begin(), key.end());
    putString(out, entry->typeSpec);
    putBlob(out, entry->bytes);
  }
}

void writeModule(Bytes& out, const Module& m) {
  putUuid(out, m.uuid);
  putString(out, m.name);
  putU8(out, static_cast<std::uint8_t>(m.isa));
  putU8(out, static_cast<std::uint8_t>(m.fileFormat));
  putOptU64(out, m.preferredBase);
  putU64(out, m.sections.size());
  for (const auto& s : m.sections) writeSection(out, *s);
  putU64(out, m.symbols.size());
  for (const auto& sym : m.symbols) writeSymbol(out, *sym);
  putU64(out, m.proxyBlocks.size());
  for (const auto& p : m.proxyBlocks) putUuid(out, p->uuid);
  writeAuxMap(out, m.auxData);
}

void writeCfg(Bytes& out, const Ipcfg& cfg) {
  putU64(out, cfg.vertices().size());
  for (Uuid v : cfg.vertices()) putUuid(out, v);  // std::set: already byte order
  putU64(out, cfg.edges().size());
  for (const Edge& e : cfg.edges()) {  // already (source, target, code) order
    putUuid(out, e.source);
    putUuid(out, e.target);
    putU8(out, edgeLabelCode(e.label));
  }
}

// --- Reader ---------------------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool atEnd() const { return pos_ == bytes_.size(); }

  Error truncated() const { return Error(Errc::Truncated, "unexpected end of file").at(pos_); }

  Result<std::uint8_t> readU8() {
    if (bytes_.size() - pos_ < 1) return truncated();
    return bytes_[pos_++];
  }

  Result<std::uint32_t> readU32() {
    if (bytes_.size() - pos_ < 4) return truncated();
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i)
      x |= static_cast<std::uint32_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 4;
    return x;
  }

  Result<std::uint64_t> readU64() {
    if (bytes_.size() - pos_ < 8) return truncated();
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i)
      x |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 8;
    return x;
  }

  Result<std::int64_t> readI64() {
    auto x = readU64();
    if (!x) return x.error();
    return static_cast<std::int64_t>(x.value());
  }

  Result<Uuid> readUuid() {
    if (bytes_.size() - pos_ < 16) return truncated();
    Uuid u = Uuid::fromBytes(std::span<const std::uint8_t, 16>(bytes_.data() + pos_, 16));
    pos_ += 16;
    return u;
  }

  /// Element count with an up-front plausibility bound: a count that cannot
  /// fit in the remaining bytes is reported here instead of after a huge
  /// allocation.
  Result<std::uint64_t> readCount(std::uint64_t minElemSize) {
    std::size_t at = pos_;
    auto n = readU64();
    if (!n) return n;
    if (minElemSize > 0 && n.value() > (bytes_.size() - pos_) / minElemSize)
      return Error(Errc::Truncated, "element count exceeds remaining input").at(at);
    return n;
  }

  Result<std::string> readString() {
    auto n = readCount(1);
    if (!n) return n.error();
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_),
                  static_cast<std::size_t>(n.value()));
    pos_ += static_cast<std::size_t>(n.value());
    return s;
  }

  Result<Bytes> readBlob() {
    auto n = readCount(1);
    if (!n) return n.error();
    Bytes b(bytes_.data() + pos_, bytes_.data() + pos_ + n.value());
    pos_ += static_cast<std::size_t>(n.value());
    return b;
  }

  Result<std::optional<std::uint64_t>> readOptU64() {
    std::size_t at = pos_;
    auto present = readU8();
    if (!present) return present.error();
    if (present.value() > 1)
      return Error(Errc::DecodeFailure, "presence byte must be 0 or 1").at(at);
    if (present.value() == 0) return std::optional<std::uint64_t>{};
    auto x = readU64();
    if (!x) return x.error();
    return std::optional<std::uint64_t>{x.value()};
  }

  Result<std::uint8_t> readOrdinal(std::uint8_t limit, const char* what) {
    std::size_t at = pos_;
    auto x = readU8();
    if (!x) return x;
    if (x.value() >= limit)
      return Error(Errc::DecodeFailure,
                   std::string("invalid ") + what + " ordinal " + std::to_string(x.value()))
          .at(at);
    return x;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class Loader {
 public:
  explicit Loader(std::span<const std::uint8_t> bytes) : r_(bytes) {}

  Result<std::unique_ptr<Ir>> run() {
    if (auto h = header(); !h) return h.error();
    if (auto body = readIr(); !body) return body.error();
    if (!r_.atEnd())
      return Error(Errc::TrailingGarbage, "bytes remain after the IR").at(r_.pos());
    if (auto refs = verifyReferences(); !refs) return refs.error();
    return std::move(ir_);
  }

 private:
  Result<void> header() {
    for (std::uint8_t expect : kWireMagic) {
      auto b = r_.readU8();
      if (!b) return b.error();
      if (b.value() != expect)
        return Error(Errc::BadMagic, "not a BIR file").at(r_.pos() - 1);
    }
    auto version = r_.readU8();
    if (!version) return version.error();
    if (version.value() != kWireVersion)
      return Error(Errc::UnsupportedVersion,
                   "format version " + std::to_string(version.value()) + ", expected " +
                       std::to_string(kWireVersion))
          .at(r_.pos() - 1);
    return {};
  }

  Result<void> readIr() {
    auto id = r_.readUuid();
    if (!id) return id.error();
    auto version = r_.readU32();
    if (!version) return version.error();
    ir_ = Ir::create(version.value(), id.value());
    auto moduleCount = r_.readCount(16);
    if (!moduleCount) return moduleCount.error();
    for (std::uint64_t i = 0; i < moduleCount.value(); ++i)
      if (auto m = readModule(); !m) return m;
    if (auto cfg = readCfg(); !cfg) return cfg;
    return readAuxMap(ir_->auxData());
  }

  Result<void> readModule() {
    auto id = r_.readUuid();
    if (!id) return id.error();
    auto name = r_.readString();
    if (!name) return name.error();
    auto isa = r_.readOrdinal(7, "ISA");
    if (!isa) return isa.error();
    auto format = r_.readOrdinal(4, "file format");
    if (!format) return format.error();
    auto base = r_.readOptU64();
    if (!base) return base.error();
    auto m = ir_->addModule(std::move(name).value(), static_cast<Isa>(isa.value()),
                            static_cast<FileFormat>(format.value()), id.value());
    if (!m) return m.error();
    m.value()->preferredBase = base.value();
    auto sectionCount = r_.readCount(16);
    if (!sectionCount) return sectionCount.error();
    for (std::uint64_t i = 0; i < sectionCount.value(); ++i)
      if (auto s = readSection(id.value()); !s) return s;
    auto symbolCount = r_.readCount(17);
    if (!symbolCount) return symbolCount.error();
    for (std::uint64_t i = 0; i < symbolCount.value(); ++i)
      if (auto s = readSymbol(id.value()); !s) return s;
    auto proxyCount = r_.readCount(16);
    if (!proxyCount) return proxyCount.error();
    for (std::uint64_t i = 0; i < proxyCount.value(); ++i) {
      auto proxyId = r_.readUuid();
      if (!proxyId) return proxyId.error();
      if (auto p = ir_->addProxyBlock(id.value(), proxyId.value()); !p) return p.error();
    }
    return readAuxMap(m.value()->auxData);
  }

  Result<void> readSection(Uuid module) {
    auto id = r_.readUuid();
    if (!id) return id.error();
    auto name = r_.readString();
    if (!name) return name.error();
    auto flagCount = r_.readCount(1);
    if (!flagCount) return flagCount.error();
    SectionFlagSet flags;  // bitmask: duplicate or unsorted flags collapse
    for (std::uint64_t i = 0; i < flagCount.value(); ++i) {
      auto f = r_.readOrdinal(kSectionFlagCount, "section flag");
      if (!f) return f.error();
      flags.set(static_cast<SectionFlag>(f.value()));
    }
    auto s = ir_->addSection(module, std::move(name).value(), flags, id.value());
    if (!s) return s.error();
    auto intervalCount = r_.readCount(16);
    if (!intervalCount) return intervalCount.error();
    for (std::uint64_t i = 0; i < intervalCount.value(); ++i)
      if (auto bi = readInterval(id.value()); !bi) return bi;
    return {};
  }

  Result<void> readInterval(Uuid section) {
    auto id = r_.readUuid();
    if (!id) return id.error();
    auto address = r_.readOptU64();
    if (!address) return address.error();
    auto size = r_.readU64();
    if (!size) return size.error();
    auto contents = r_.readBlob();
    if (!contents) return contents.error();
    auto bi =
        ir_->addInterval(section, address.value(), size.value(), std::move(contents).value(),
                         id.value());
    if (!bi) return bi.error();
    auto blockCount = r_.readCount(33);
    if (!blockCount) return blockCount.error();
    for (std::uint64_t i = 0; i < blockCount.value(); ++i) {
      auto offset = r_.readU64();
      if (!offset) return offset.error();
      auto kind = r_.readOrdinal(2, "block kind");
      if (!kind) return kind.error();
      auto blockId = r_.readUuid();
      if (!blockId) return blockId.error();
      auto blockSize = r_.readU64();
      if (!blockSize) return blockSize.error();
      // adoptBlock, not addBlock: an out-of-range block is a validate()
      // finding, not a load failure.
      if (auto b = ir_->adoptBlock(id.value(), offset.value(),
                                   static_cast<BlockKind>(kind.value()), blockSize.value(),
                                   blockId.value());
          !b)
        return b.error();
    }
    auto exprCount = r_.readCount(33);
    if (!exprCount) return exprCount.error();
    for (std::uint64_t i = 0; i < exprCount.value(); ++i) {
      auto offset = r_.readU64();
      if (!offset) return offset.error();
      auto expr = readSymExpr();
      if (!expr) return expr.error();
      // Last entry wins on duplicate offsets from lax producers.
      if (auto e = ir_->setSymExpr(id.value(), offset.value(), expr.value()); !e)
        return e.error();
    }
    return {};
  }

  Result<SymbolicExpression> readSymExpr() {
    auto tag = r_.readOrdinal(2, "expression tag");
    if (!tag) return tag.error();
    auto first = r_.readUuid();
    if (!first) return first.error();
    if (tag.value() == 0) {
      auto offset = r_.readI64();
      if (!offset) return offset.error();
      return SymbolicExpression{SymAddrConst{first.value(), offset.value()}};
    }
    auto subtrahend = r_.readUuid();
    if (!subtrahend) return subtrahend.error();
    auto scale = r_.readI64();
    if (!scale) return scale.error();
    auto offset = r_.readI64();
    if (!offset) return offset.error();
    return SymbolicExpression{
        SymAddrAddr{first.value(), subtrahend.value(), scale.value(), offset.value()}};
  }

  Result<void> readSymbol(Uuid module) {
    auto id = r_.readUuid();
    if (!id) return id.error();
    auto name = r_.readString();
    if (!name) return name.error();
    auto tag = r_.readOrdinal(3, "symbol payload tag");
    if (!tag) return tag.error();
    SymbolPayload payload = std::monostate{};
    if (tag.value() == 0) {
      auto value = r_.readI64();
      if (!value) return value.error();
      payload = value.value();
    } else if (tag.value() == 1) {
      auto ref = r_.readUuid();
      if (!ref) return ref.error();
      payload = ref.value();
    }
    auto s = ir_->addSymbol(module, std::move(name).value(), payload, id.value());
    if (!s) return s.error();
    return {};
  }

  Result<void> readCfg() {
    auto vertexCount = r_.readCount(16);
    if (!vertexCount) return vertexCount.error();
    for (std::uint64_t i = 0; i < vertexCount.value(); ++i) {
      auto v = r_.readUuid();
      if (!v) return v.error();
      ir_->cfg().insertVertex(v.value());
    }
    auto edgeCount = r_.readCount(33);
    if (!edgeCount) return edgeCount.error();
    for (std::uint64_t i = 0; i < edgeCount.value(); ++i) {
      auto source = r_.readUuid();
      if (!source) return source.error();
      auto target = r_.readUuid();
      if (!target) return target.error();
      std::size_t at = r_.pos();
      auto code = r_.readU8();
      if (!code) return code.error();
      auto label = decodeEdgeLabel(code.value());
      if (!label) return Error(Errc::DecodeFailure, label.error().message()).at(at);
      // insertEdge, not addCfgEdge: files may legitimately carry edges whose
      // endpoint typing validate() would flag; duplicates collapse.
      ir_->cfg().insertEdge(Edge{source.value(), target.value(), label.value()});
    }
    return {};
  }

  Result<void> readAuxMap(AuxDataMap& aux) {
    auto count = r_.readCount(24);
    if (!count) return count.error();
    for (std::uint64_t i = 0; i < count.value(); ++i) {
      auto label = r_.readString();
      if (!label) return label.error();
      std::size_t at = r_.pos();
      auto typeSpec = r_.readString();
      if (!typeSpec) return typeSpec.error();
      if (auto parsed = parseTypeSpec(typeSpec.value()); !parsed)
        return Error(Errc::MalformedTypeSpec,
                     "table \"" + label.value() + "\": " + parsed.error().describe())
            .at(at);
      auto payload = r_.readBlob();
      if (!payload) return payload.error();
      // Last entry wins on duplicate labels from lax producers.
      aux[std::move(label).value()] =
          AuxDataEntry{std::move(typeSpec).value(), std::move(payload).value()};
    }
    return {};
  }

  /// Existence pass over every cross-entity reference in the file. Typing
  /// (code vs data, symbol vs other) is validate()'s concern; a reference to
  /// a UUID that does not exist at all makes the file unusable and is
  /// rejected here.
  Result<void> verifyReferences() const {
    auto require = [&](Uuid id, const std::string& what) -> Result<void> {
      if (!ir_->findNode(id))
        return Error(Errc::DanglingReference, what + " references a UUID absent from the file")
            .entity(id);
      return {};
    };
    for (const auto& m : ir_->modules()) {
      for (const auto& sym : m->symbols)
        if (sym->hasReferent())
          if (auto ok = require(std::get<Uuid>(sym->payload), "symbol \"" + sym->name + "\"");
              !ok)
            return ok;
      for (const auto& s : m->sections)
        for (const auto& bi : s->intervals)
          for (const auto& [offset, expr] : bi->symExprs) {
            std::string what = "expression at " + bi->uuid.str() + "+" + std::to_string(offset);
            if (const auto* c = std::get_if<SymAddrConst>(&expr)) {
              if (auto ok = require(c->symbol, what); !ok) return ok;
            } else {
              const auto& d = std::get<SymAddrAddr>(expr);
              if (auto ok = require(d.minuend, what); !ok) return ok;
              if (auto ok = require(d.subtrahend, what); !ok) return ok;
            }
          }
    }
    for (const Edge& e : ir_->cfg().edges()) {
      if (auto ok = require(e.source, "edge source"); !ok) return ok;
      if (auto ok = require(e.target, "edge target"); !ok) return ok;
    }
    return {};
  }

  Reader r_;
  std::unique_ptr<Ir> ir_;
};

}  // namespace

Result<Bytes> save(const Ir& ir, SaveMode mode) {
  if (mode == SaveMode::Strict) {
    auto violations = validate(ir);
    if (!violations.empty())
      return Error(Errc::InvalidIr, std::to_string(violations.size()) +
                                        " validation finding(s), first: " +
                                        violations.front().describe());
  }
  Bytes out;
  out.insert(out.end(), kWireMagic.begin(), kWireMagic.end());
  putU8(out, kWireVersion);
  putUuid(out, ir.uuid());
  putU32(out, ir.version());
  putU64(out, ir.modules().size());
  for (const auto& m : ir.modules()) writeModule(out, *m);
  writeCfg(out, ir.cfg());
  writeAuxMap(out, ir.auxData());
  return out;
}

Result<std::unique_ptr<Ir>> load(std::span<const std::uint8_t> bytes) {
  return Loader(bytes).run();
}

Result<Bytes> canonicalize(std::span<const std::uint8_t> bytes) {
  auto ir = load(bytes);
  if (!ir) return ir.error();
  return save(*ir.value(), SaveMode::Lax);
}

}  // namespace bir
