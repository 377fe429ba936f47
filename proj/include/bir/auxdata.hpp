#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bir/error.hpp"
#include "bir/ir.hpp"

namespace bir {

// --- Type specifiers ---------------------------------------------------------

enum class TypeKind : std::uint8_t {
  Uuid,
  Uint64,
  Int64,
  String,
  Offset,
  Sequence,
  Set,
  Mapping,
  Tuple,
};

/// A parsed type specifier: a tree over the scalar leaves and the
/// sequence/set/mapping/tuple constructors. Canonical text form carries no
/// whitespace; the parser additionally accepts whitespace and canonicalizes.
struct TypeSpec {
  TypeKind kind = TypeKind::Uint64;
  std::vector<TypeSpec> args;  // 1 for sequence/set, 2 for mapping, >=1 for tuple

  bool operator==(const TypeSpec&) const = default;

  static TypeSpec scalar(TypeKind k) { return TypeSpec{k, {}}; }
  static TypeSpec sequence(TypeSpec elem);
  static TypeSpec set(TypeSpec elem);
  static TypeSpec mapping(TypeSpec key, TypeSpec value);
  static TypeSpec tuple(std::vector<TypeSpec> fields);
};

Result<TypeSpec> parseTypeSpec(std::string_view text);
std::string printTypeSpec(const TypeSpec& spec);

// --- Structured values -------------------------------------------------------

/// Dynamically-typed value for table payloads. Which alternative is expected
/// at each position is dictated by a TypeSpec; sequences, sets and tuples all
/// use the list alternative, mappings use the pair list.
class AuxValue {
 public:
  using List = std::vector<AuxValue>;
  using Pairs = std::vector<std::pair<AuxValue, AuxValue>>;
  using Storage =
      std::variant<Uuid, std::uint64_t, std::int64_t, std::string, Offset, List, Pairs>;

  AuxValue() : v_(std::uint64_t{0}) {}

  static AuxValue ofUuid(Uuid u) { return AuxValue(Storage{u}); }
  static AuxValue ofU64(std::uint64_t x) { return AuxValue(Storage{x}); }
  static AuxValue ofI64(std::int64_t x) { return AuxValue(Storage{x}); }
  static AuxValue ofString(std::string s) { return AuxValue(Storage{std::move(s)}); }
  static AuxValue ofOffset(Offset o) { return AuxValue(Storage{o}); }
  static AuxValue ofList(List items) { return AuxValue(Storage{std::move(items)}); }
  static AuxValue ofPairs(Pairs entries) { return AuxValue(Storage{std::move(entries)}); }

  const Storage& storage() const { return v_; }

  const Uuid* asUuid() const { return std::get_if<Uuid>(&v_); }
  const std::uint64_t* asU64() const { return std::get_if<std::uint64_t>(&v_); }
  const std::int64_t* asI64() const { return std::get_if<std::int64_t>(&v_); }
  const std::string* asString() const { return std::get_if<std::string>(&v_); }
  const Offset* asOffset() const { return std::get_if<Offset>(&v_); }
  const List* asList() const { return std::get_if<List>(&v_); }
  const Pairs* asPairs() const { return std::get_if<Pairs>(&v_); }

  bool operator==(const AuxValue&) const = default;

 private:
  explicit AuxValue(Storage v) : v_(std::move(v)) {}
  Storage v_;
};

enum class DecodeMode { Strict, Lax };

/// Encodes `value` under `spec`: little-endian fixed-width integers, UUIDs as
/// 16 raw bytes, strings as u64 length + UTF-8 bytes, Offset as UUID then
/// u64, u64 element counts for sequence/set/mapping, tuple fields back to
/// back. Set elements and mapping entries are emitted sorted by their encoded
/// key bytes; duplicates are rejected, so every value has exactly one
/// canonical encoding.
Result<Bytes> encodeValue(const TypeSpec& spec, const AuxValue& value);

/// Inverse of encodeValue. Strict mode rejects set/mapping entries that are
/// not strictly ascending in encoded-key order; lax mode preserves what it
/// read. The full input must be consumed.
Result<AuxValue> decodeValue(const TypeSpec& spec, std::span<const std::uint8_t> bytes,
                             DecodeMode mode = DecodeMode::Strict);

// --- Sanctioned table registry -----------------------------------------------

/// The fixed label -> schema table for interoperable AuxData. Anything not
/// listed here is tool-specific and passes through serialization untouched.
const std::map<std::string, TypeSpec, std::less<>>& sanctionedSchemas();
const TypeSpec* sanctionedSchema(std::string_view label);

// --- Typed table access --------------------------------------------------------

Result<std::optional<AuxValue>> getTable(const AuxDataMap& owner, std::string_view label,
                                         const TypeSpec& spec);
Result<void> setTable(AuxDataMap& owner, std::string_view label, const TypeSpec& spec,
                      const AuxValue& value);

inline Result<std::optional<AuxValue>> getTable(const Module& m, std::string_view label,
                                                const TypeSpec& spec) {
  return getTable(m.auxData, label, spec);
}
inline Result<void> setTable(Module& m, std::string_view label, const TypeSpec& spec,
                             const AuxValue& value) {
  return setTable(m.auxData, label, spec, value);
}
inline Result<std::optional<AuxValue>> getTable(const Ir& ir, std::string_view label,
                                                const TypeSpec& spec) {
  return getTable(ir.auxData(), label, spec);
}
inline Result<void> setTable(Ir& ir, std::string_view label, const TypeSpec& spec,
                             const AuxValue& value) {
  return setTable(ir.auxData(), label, spec, value);
}

// --- Functions helper ----------------------------------------------------------

/// One function as reconstructed from the functionBlocks / functionEntries /
/// functionNames tables.
struct FunctionRecord {
  Uuid uuid;
  std::vector<Uuid> blocks;   // sorted
  std::vector<Uuid> entries;  // sorted
  std::optional<Uuid> nameSymbol;
};

/// Mints a function UUID and inserts it consistently into the three function
/// tables of `module`. `entries` must be a subset of `blocks`; every block
/// must resolve to a code block and `nameSymbol` to a symbol.
Result<Uuid> makeFunction(Ir& ir, Uuid module, const std::vector<Uuid>& blocks,
                          const std::vector<Uuid>& entries, Uuid nameSymbol);

/// Joins the three function tables by function UUID, in UUID byte order.
/// Functions missing from a table get an empty set / absent name;
/// inconsistencies are validate()'s business, not this helper's.
Result<std::vector<FunctionRecord>> getFunctions(const Ir& ir, Uuid module);

/// Follows symbolForwarding transitively to its fixed point; unmapped symbols
/// map to themselves. A forwarding loop is an error.
Result<Uuid> forwardSymbol(const Ir& ir, Uuid module, Uuid symbol);

}  // namespace bir
