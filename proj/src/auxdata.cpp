#include "bir/auxdata.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace bir {

TypeSpec TypeSpec::sequence(TypeSpec elem) {
  return TypeSpec{TypeKind::Sequence, {std::move(elem)}};
}
TypeSpec TypeSpec::set(TypeSpec elem) { return TypeSpec{TypeKind::Set, {std::move(elem)}}; }
TypeSpec TypeSpec::mapping(TypeSpec key, TypeSpec value) {
  return TypeSpec{TypeKind::Mapping, {std::move(key), std::move(value)}};
}
TypeSpec TypeSpec::tuple(std::vector<TypeSpec> fields) {
  return TypeSpec{TypeKind::Tuple, std::move(fields)};
}

// --- Parsing -------------------------------------------------------------------

namespace {

class SpecParser {
 public:
  explicit SpecParser(std::string_view text) : text_(text) {}

  Result<TypeSpec> run() {
    auto spec = parse();
    if (!spec) return spec;
    skipSpace();
    if (pos_ != text_.size())
      return Error(Errc::SyntaxError, "trailing characters after type specifier").at(pos_);
    return spec;
  }

 private:
  void skipSpace() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(std::string_view word) {
    if (text_.substr(pos_).starts_with(word)) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  Result<TypeSpec> expectChar(char c) {
    skipSpace();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return TypeSpec{};  // placeholder, callers ignore
    }
    return Error(Errc::SyntaxError, std::string("expected '") + c + "'").at(pos_);
  }

  Result<TypeSpec> parse() {
    skipSpace();
    if (eat("UUID")) return TypeSpec::scalar(TypeKind::Uuid);
    if (eat("uint64")) return TypeSpec::scalar(TypeKind::Uint64);
    if (eat("int64")) return TypeSpec::scalar(TypeKind::Int64);
    if (eat("string")) return TypeSpec::scalar(TypeKind::String);
    if (eat("Offset")) return TypeSpec::scalar(TypeKind::Offset);
    if (eat("sequence")) return one(TypeKind::Sequence);
    if (eat("set")) return one(TypeKind::Set);
    if (eat("mapping")) return two();
    if (eat("tuple")) return many();
    return Error(Errc::SyntaxError, "expected a type constructor").at(pos_);
  }

  Result<TypeSpec> one(TypeKind kind) {
    if (auto r = expectChar('<'); !r) return r;
    auto elem = parse();
    if (!elem) return elem;
    if (auto r = expectChar('>'); !r) return r;
    return TypeSpec{kind, {std::move(elem).value()}};
  }

  Result<TypeSpec> two() {
    if (auto r = expectChar('<'); !r) return r;
    auto key = parse();
    if (!key) return key;
    if (auto r = expectChar(','); !r) return r;
    auto value = parse();
    if (!value) return value;
    if (auto r = expectChar('>'); !r) return r;
    return TypeSpec::mapping(std::move(key).value(), std::move(value).value());
  }

  Result<TypeSpec> many() {
    if (auto r = expectChar('<'); !r) return r;
    std::vector<TypeSpec> fields;
    auto first = parse();
    if (!first) return first;
    fields.push_back(std::move(first).value());
    for (;;) {
      skipSpace();
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        auto next = parse();
        if (!next) return next;
        fields.push_back(std::move(next).value());
        continue;
      }
      break;
    }
    if (auto r = expectChar('>'); !r) return r;
    return TypeSpec::tuple(std::move(fields));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Result<TypeSpec> parseTypeSpec(std::string_view text) { return SpecParser(text).run(); }

std::string printTypeSpec(const TypeSpec& spec) {
  switch (spec.kind) {
    case TypeKind::Uuid: return "UUID";
    case TypeKind::Uint64: return "uint64";
    case TypeKind::Int64: return "int64";
    case TypeKind::String: return "string";
    case TypeKind::Offset: return "Offset";
    case TypeKind::Sequence: return "sequence<" + printTypeSpec(spec.args[0]) + ">";
    case TypeKind::Set: return "set<" + printTypeSpec(spec.args[0]) + ">";
    case TypeKind::Mapping:
      return "mapping<" + printTypeSpec(spec.args[0]) + "," + printTypeSpec(spec.args[1]) + ">";
    case TypeKind::Tuple: {
      std::string out = "tuple<";
      for (std::size_t i = 0; i < spec.args.size(); ++i) {
        if (i) out += ",";
        out += printTypeSpec(spec.args[i]);
      }
      return out + ">";
    }
  }
  return "?";
}

// --- Encoding -------------------------------------------------------------------

namespace {

void putU64(Bytes& out, std::uint64_t x) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

void putI64(Bytes& out, std::int64_t x) { putU64(out, static_cast<std::uint64_t>(x)); }

Error shapeError(const TypeSpec& spec) {
  return Error(Errc::ShapeMismatch,
               "value does not match type specifier " + printTypeSpec(spec));
}

Result<void> encodeInto(const TypeSpec& spec, const AuxValue& value, Bytes& out) {
  switch (spec.kind) {
    case TypeKind::Uuid: {
      const Uuid* u = value.asUuid();
      if (!u) return shapeError(spec);
      out.insert(out.end(), u->bytes.begin(), u->bytes.end());
      return {};
    }
    case TypeKind::Uint64: {
      const std::uint64_t* x = value.asU64();
      if (!x) return shapeError(spec);
      putU64(out, *x);
      return {};
    }
    case TypeKind::Int64: {
      const std::int64_t* x = value.asI64();
      if (!x) return shapeError(spec);
      putI64(out, *x);
      return {};
    }
    case TypeKind::String: {
      const std::string* s = value.asString();
      if (!s) return shapeError(spec);
      putU64(out, s->size());
      out.insert(out.end(), s->begin(), s->end());
      return {};
    }
    case TypeKind::Offset: {
      const Offset* o = value.asOffset();
      if (!o) return shapeError(spec);
      out.insert(out.end(), o->element.bytes.begin(), o->element.bytes.end());
      putU64(out, o->displacement);
      return {};
    }
    case TypeKind::Sequence: {
      const AuxValue::List* items = value.asList();
      if (!items) return shapeError(spec);
      putU64(out, items->size());
      for (const AuxValue& item : *items)
        if (auto r = encodeInto(spec.args[0], item, out); !r) return r;
      return {};
    }
    case TypeKind::Set: {
      const AuxValue::List* items = value.asList();
      if (!items) return shapeError(spec);
      std::vector<Bytes> encoded;
      encoded.reserve(items->size());
      for (const AuxValue& item : *items) {
        Bytes one;
        if (auto r = encodeInto(spec.args[0], item, one); !r) return r;
        encoded.push_back(std::move(one));
      }
      std::sort(encoded.begin(), encoded.end());
      if (std::adjacent_find(encoded.begin(), encoded.end()) != encoded.end())
        return Error(Errc::ShapeMismatch, "duplicate set element");
      putU64(out, encoded.size());
      for (const Bytes& one : encoded) out.insert(out.end(), one.begin(), one.end());
      return {};
    }
    case TypeKind::Mapping: {
      const AuxValue::Pairs* entries = value.asPairs();
      if (!entries) return shapeError(spec);
      std::vector<std::pair<Bytes, Bytes>> encoded;
      encoded.reserve(entries->size());
      for (const auto& [k, v] : *entries) {
        Bytes kb, vb;
        if (auto r = encodeInto(spec.args[0], k, kb); !r) return r;
        if (auto r = encodeInto(spec.args[1], v, vb); !r) return r;
        encoded.emplace_back(std::move(kb), std::move(vb));
      }
      std::sort(encoded.begin(), encoded.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 1; i < encoded.size(); ++i)
        if (encoded[i - 1].first == encoded[i].first)
          return Error(Errc::ShapeMismatch, "duplicate mapping key");
      putU64(out, encoded.size());
      for (const auto& [kb, vb] : encoded) {
        out.insert(out.end(), kb.begin(), kb.end());
        out.insert(out.end(), vb.begin(), vb.end());
      }
      return {};
    }
    case TypeKind::Tuple: {
      const AuxValue::List* fields = value.asList();
      if (!fields || fields->size() != spec.args.size()) return shapeError(spec);
      for (std::size_t i = 0; i < spec.args.size(); ++i)
        if (auto r = encodeInto(spec.args[i], (*fields)[i], out); !r) return r;
      return {};
    }
  }
  return shapeError(spec);
}

}  // namespace

Result<Bytes> encodeValue(const TypeSpec& spec, const AuxValue& value) {
  Bytes out;
  if (auto r = encodeInto(spec, value, out); !r) return r.error();
  return out;
}

// --- Decoding -------------------------------------------------------------------

namespace {

class ValueReader {
 public:
  ValueReader(std::span<const std::uint8_t> bytes, DecodeMode mode)
      : bytes_(bytes), mode_(mode) {}

  Result<AuxValue> run(const TypeSpec& spec) {
    auto v = read(spec);
    if (!v) return v;
    if (pos_ != bytes_.size())
      return Error(Errc::TrailingGarbage, "unconsumed bytes after encoded value").at(pos_);
    return v;
  }

 private:
  Error truncated() const {
    return Error(Errc::Truncated, "unexpected end of encoded value").at(pos_);
  }

  Result<std::uint64_t> readU64() {
    if (bytes_.size() - pos_ < 8) return truncated();
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i)
      x |= static_cast<std::uint64_t>(bytes_[pos_ + static_cast<std::size_t>(i)]) << (8 * i);
    pos_ += 8;
    return x;
  }

  Result<Uuid> readUuid() {
    if (bytes_.size() - pos_ < 16) return truncated();
    Uuid u = Uuid::fromBytes(std::span<const std::uint8_t, 16>(bytes_.data() + pos_, 16));
    pos_ += 16;
    return u;
  }

  /// Count prefix for containers; guards against counts that could not
  /// possibly fit in the remaining input.
  Result<std::uint64_t> readCount(std::uint64_t minElemSize) {
    std::uint64_t before = pos_;
    auto n = readU64();
    if (!n) return n;
    if (minElemSize > 0 && n.value() > (bytes_.size() - pos_) / minElemSize)
      return Error(Errc::Truncated, "element count exceeds remaining input").at(before);
    return n;
  }

  std::size_t minSize(const TypeSpec& spec) const {
    switch (spec.kind) {
      case TypeKind::Uuid: return 16;
      case TypeKind::Uint64:
      case TypeKind::Int64:
      case TypeKind::String: return 8;
      case TypeKind::Offset: return 24;
      case TypeKind::Sequence:
      case TypeKind::Set:
      case TypeKind::Mapping: return 8;
      case TypeKind::Tuple: {
        std::size_t total = 0;
        for (const TypeSpec& f : spec.args) total += minSize(f);
        return total;
      }
    }
    return 1;
  }

  Result<AuxValue> read(const TypeSpec& spec) {
    switch (spec.kind) {
      case TypeKind::Uuid: {
        auto u = readUuid();
        if (!u) return u.error();
        return AuxValue::ofUuid(u.value());
      }
      case TypeKind::Uint64: {
        auto x = readU64();
        if (!x) return x.error();
        return AuxValue::ofU64(x.value());
      }
      case TypeKind::Int64: {
        auto x = readU64();
        if (!x) return x.error();
        return AuxValue::ofI64(static_cast<std::int64_t>(x.value()));
      }
      case TypeKind::String: {
        auto n = readCount(1);
        if (!n) return n.error();
        if (bytes_.size() - pos_ < n.value()) return truncated();
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_),
                      static_cast<std::size_t>(n.value()));
        pos_ += static_cast<std::size_t>(n.value());
        return AuxValue::ofString(std::move(s));
      }
      case TypeKind::Offset: {
        auto u = readUuid();
        if (!u) return u.error();
        auto d = readU64();
        if (!d) return d.error();
        return AuxValue::ofOffset(Offset{u.value(), d.value()});
      }
      case TypeKind::Sequence: {
        auto n = readCount(minSize(spec.args[0]));
        if (!n) return n.error();
        AuxValue::List items;
        items.reserve(static_cast<std::size_t>(n.value()));
        for (std::uint64_t i = 0; i < n.value(); ++i) {
          auto item = read(spec.args[0]);
          if (!item) return item;
          items.push_back(std::move(item).value());
        }
        return AuxValue::ofList(std::move(items));
      }
      case TypeKind::Set: {
        auto n = readCount(minSize(spec.args[0]));
        if (!n) return n.error();
        AuxValue::List items;
        Bytes prev;
        for (std::uint64_t i = 0; i < n.value(); ++i) {
          std::size_t start = pos_;
          auto item = read(spec.args[0]);
          if (!item) return item;
          if (mode_ == DecodeMode::Strict) {
            Bytes enc(bytes_.begin() + static_cast<std::ptrdiff_t>(start),
                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_));
            if (i > 0 && !(prev < enc))
              return Error(Errc::UnsortedCanonicalForm,
                           "set elements not in strictly ascending encoded order")
                  .at(start);
            prev = std::move(enc);
          }
          items.push_back(std::move(item).value());
        }
        return AuxValue::ofList(std::move(items));
      }
      case TypeKind::Mapping: {
        auto n = readCount(minSize(spec.args[0]) + minSize(spec.args[1]));
        if (!n) return n.error();
        AuxValue::Pairs entries;
        Bytes prev;
        for (std::uint64_t i = 0; i < n.value(); ++i) {
          std::size_t start = pos_;
          auto key = read(spec.args[0]);
          if (!key) return key;
          if (mode_ == DecodeMode::Strict) {
            Bytes enc(bytes_.begin() + static_cast<std::ptrdiff_t>(start),
                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_));
            if (i > 0 && !(prev < enc))
              return Error(Errc::UnsortedCanonicalForm,
                           "mapping keys not in strictly ascending encoded order")
                  .at(start);
            prev = std::move(enc);
          }
          auto value = read(spec.args[1]);
          if (!value) return value;
          entries.emplace_back(std::move(key).value(), std::move(value).value());
        }
        return AuxValue::ofPairs(std::move(entries));
      }
      case TypeKind::Tuple: {
        AuxValue::List fields;
        fields.reserve(spec.args.size());
        for (const TypeSpec& f : spec.args) {
          auto field = read(f);
          if (!field) return field;
          fields.push_back(std::move(field).value());
        }
        return AuxValue::ofList(std::move(fields));
      }
    }
    return Error(Errc::DecodeFailure, "unhandled type kind");
  }

  std::span<const std::uint8_t> bytes_;
  DecodeMode mode_;
  std::size_t pos_ = 0;
};

}  // namespace

Result<AuxValue> decodeValue(const TypeSpec& spec, std::span<const std::uint8_t> bytes,
                             DecodeMode mode) {
  return ValueReader(bytes, mode).run(spec);
}

// --- Registry -------------------------------------------------------------------

const std::map<std::string, TypeSpec, std::less<>>& sanctionedSchemas() {
  static const std::map<std::string, TypeSpec, std::less<>> registry = [] {
    TypeSpec uuid = TypeSpec::scalar(TypeKind::Uuid);
    TypeSpec u64 = TypeSpec::scalar(TypeKind::Uint64);
    TypeSpec str = TypeSpec::scalar(TypeKind::String);
    TypeSpec off = TypeSpec::scalar(TypeKind::Offset);
    std::map<std::string, TypeSpec, std::less<>> r;
    r.emplace("functionBlocks", TypeSpec::mapping(uuid, TypeSpec::set(uuid)));
    r.emplace("functionEntries", TypeSpec::mapping(uuid, TypeSpec::set(uuid)));
    r.emplace("functionNames", TypeSpec::mapping(uuid, uuid));
    r.emplace("types", TypeSpec::mapping(uuid, str));
    r.emplace("alignment", TypeSpec::mapping(uuid, u64));
    r.emplace("comments", TypeSpec::mapping(off, str));
    r.emplace("symbolForwarding", TypeSpec::mapping(uuid, uuid));
    r.emplace("padding", TypeSpec::mapping(off, u64));
    return r;
  }();
  return registry;
}

const TypeSpec* sanctionedSchema(std::string_view label) {
  const auto& registry = sanctionedSchemas();
  auto it = registry.find(label);
  return it == registry.end() ? nullptr : &it->second;
}

// --- Typed access ----------------------------------------------------------------

Result<std::optional<AuxValue>> getTable(const AuxDataMap& owner, std::string_view label,
                                         const TypeSpec& spec) {
  if (const TypeSpec* schema = sanctionedSchema(label); schema && !(*schema == spec))
    return Error(Errc::SchemaMismatch, "sanctioned label \"" + std::string(label) +
                                           "\" requires " + printTypeSpec(*schema));
  auto it = owner.find(std::string(label));
  if (it == owner.end()) return std::optional<AuxValue>{};
  if (it->second.typeSpec != printTypeSpec(spec))
    return Error(Errc::SchemaMismatch, "stored entry has type " + it->second.typeSpec);
  auto v = decodeValue(spec, it->second.bytes, DecodeMode::Strict);
  if (!v)
    return Error(Errc::DecodeFailure,
                 "entry \"" + std::string(label) + "\": " + v.error().describe());
  return std::optional<AuxValue>{std::move(v).value()};
}

Result<void> setTable(AuxDataMap& owner, std::string_view label, const TypeSpec& spec,
                      const AuxValue& value) {
  if (const TypeSpec* schema = sanctionedSchema(label); schema && !(*schema == spec))
    return Error(Errc::SchemaMismatch, "sanctioned label \"" + std::string(label) +
                                           "\" requires " + printTypeSpec(*schema));
  auto bytes = encodeValue(spec, value);
  if (!bytes) return bytes.error();
  owner[std::string(label)] = AuxDataEntry{printTypeSpec(spec), std::move(bytes).value()};
  return {};
}

// --- Functions --------------------------------------------------------------------

namespace {

const TypeSpec& uuidSetMapSpec() {
  static const TypeSpec spec =
      TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid), TypeSpec::set(TypeSpec::scalar(TypeKind::Uuid)));
  return spec;
}

const TypeSpec& uuidMapSpec() {
  static const TypeSpec spec =
      TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid), TypeSpec::scalar(TypeKind::Uuid));
  return spec;
}

AuxValue uuidSetValue(const std::vector<Uuid>& ids) {
  AuxValue::List items;
  items.reserve(ids.size());
  for (Uuid id : ids) items.push_back(AuxValue::ofUuid(id));
  return AuxValue::ofList(std::move(items));
}

/// Reads a mapping<UUID, ...> table into a std::map keyed by UUID. Missing
/// table -> empty map.
Result<std::map<Uuid, AuxValue>> readUuidKeyedTable(const AuxDataMap& aux,
                                                    std::string_view label,
                                                    const TypeSpec& spec) {
  std::map<Uuid, AuxValue> out;
  auto table = getTable(aux, label, spec);
  if (!table) return table.error();
  if (!table.value()) return out;
  for (const auto& [k, v] : *table.value()->asPairs()) out.emplace(*k.asUuid(), v);
  return out;
}

std::vector<Uuid> uuidList(const AuxValue& setValue) {
  std::vector<Uuid> out;
  for (const AuxValue& item : *setValue.asList()) out.push_back(*item.asUuid());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Result<Uuid> makeFunction(Ir& ir, Uuid module, const std::vector<Uuid>& blocks,
                          const std::vector<Uuid>& entries, Uuid nameSymbol) {
  Module* m = ir.findModule(module);
  if (!m) return Error(Errc::UnknownUuid, "no such module").entity(module);
  std::set<Uuid> blockSet(blocks.begin(), blocks.end());
  for (Uuid e : entries)
    if (!blockSet.count(e))
      return Error(Errc::EntriesNotSubset, "entry block not among the function's blocks")
          .entity(e);
  for (Uuid b : blocks) {
    const ByteBlock* block = ir.findBlock(b);
    if (!block || block->kind != BlockKind::Code)
      return Error(Errc::DanglingReference, "function block must be an existing code block")
          .entity(b);
  }
  if (!ir.findSymbol(nameSymbol))
    return Error(Errc::DanglingReference, "function name must reference a symbol")
        .entity(nameSymbol);

  auto insertInto = [&](std::string_view label, const TypeSpec& spec, Uuid fn,
                        AuxValue value) -> Result<void> {
    auto table = getTable(m->auxData, label, spec);
    if (!table) return table.error();
    AuxValue::Pairs entriesList;
    if (table.value()) entriesList = *table.value()->asPairs();
    entriesList.emplace_back(AuxValue::ofUuid(fn), std::move(value));
    return setTable(m->auxData, label, spec, AuxValue::ofPairs(std::move(entriesList)));
  };

  Uuid fn = Uuid::generate();
  std::vector<Uuid> sortedBlocks(blockSet.begin(), blockSet.end());
  std::vector<Uuid> sortedEntries(entries.begin(), entries.end());
  std::sort(sortedEntries.begin(), sortedEntries.end());
  sortedEntries.erase(std::unique(sortedEntries.begin(), sortedEntries.end()),
                      sortedEntries.end());
  if (auto r = insertInto("functionBlocks", uuidSetMapSpec(), fn, uuidSetValue(sortedBlocks));
      !r)
    return r.error();
  if (auto r = insertInto("functionEntries", uuidSetMapSpec(), fn, uuidSetValue(sortedEntries));
      !r)
    return r.error();
  auto names = getTable(m->auxData, "functionNames", uuidMapSpec());
  if (!names) return names.error();
  AuxValue::Pairs nameEntries;
  if (names.value()) nameEntries = *names.value()->asPairs();
  nameEntries.emplace_back(AuxValue::ofUuid(fn), AuxValue::ofUuid(nameSymbol));
  if (auto r = setTable(m->auxData, "functionNames", uuidMapSpec(),
                        AuxValue::ofPairs(std::move(nameEntries)));
      !r)
    return r.error();
  return fn;
}

Result<std::vector<FunctionRecord>> getFunctions(const Ir& ir, Uuid module) {
  const Module* m = ir.findModule(module);
  if (!m) return Error(Errc::UnknownUuid, "no such module").entity(module);
  auto blocks = readUuidKeyedTable(m->auxData, "functionBlocks", uuidSetMapSpec());
  if (!blocks) return blocks.error();
  auto entries = readUuidKeyedTable(m->auxData, "functionEntries", uuidSetMapSpec());
  if (!entries) return entries.error();
  auto names = readUuidKeyedTable(m->auxData, "functionNames", uuidMapSpec());
  if (!names) return names.error();

  std::set<Uuid> functionIds;
  for (const auto& [k, unused] : blocks.value()) functionIds.insert(k);
  for (const auto& [k, unused] : entries.value()) functionIds.insert(k);
  for (const auto& [k, unused] : names.value()) functionIds.insert(k);

  std::vector<FunctionRecord> out;
  out.reserve(functionIds.size());
  for (Uuid fn : functionIds) {
    FunctionRecord rec;
    rec.uuid = fn;
    if (auto it = blocks.value().find(fn); it != blocks.value().end())
      rec.blocks = uuidList(it->second);
    if (auto it = entries.value().find(fn); it != entries.value().end())
      rec.entries = uuidList(it->second);
    if (auto it = names.value().find(fn); it != names.value().end())
      rec.nameSymbol = *it->second.asUuid();
    out.push_back(std::move(rec));
  }
  return out;
}

Result<Uuid> forwardSymbol(const Ir& ir, Uuid module, Uuid symbol) {
  const Module* m = ir.findModule(module);
  if (!m) return Error(Errc::UnknownUuid, "no such module").entity(module);
  if (!ir.findSymbol(symbol))
    return Error(Errc::UnknownUuid, "no such symbol").entity(symbol);
  auto table = readUuidKeyedTable(m->auxData, "symbolForwarding", uuidMapSpec());
  if (!table) return table.error();
  std::set<Uuid> visited;
  Uuid current = symbol;
  for (;;) {
    if (!visited.insert(current).second)
      return Error(Errc::ForwardingCycle, "symbolForwarding contains a cycle").entity(current);
    auto it = table.value().find(current);
    if (it == table.value().end()) return current;
    current = *it->second.asUuid();
  }
}

}  // namespace bir
