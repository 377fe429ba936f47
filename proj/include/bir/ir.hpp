#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bir/cfg.hpp"
#include "bir/error.hpp"
#include "bir/uuid.hpp"

namespace bir {

using Bytes = std::vector<std::uint8_t>;

enum class Isa : std::uint8_t {
  Undefined = 0,
  IA32 = 1,
  X64 = 2,
  Arm32 = 3,
  Arm64 = 4,
  Mips32 = 5,
  Ppc32 = 6,
};

enum class FileFormat : std::uint8_t {
  Undefined = 0,
  Elf = 1,
  Pe = 2,
  Raw = 3,
};

enum class SectionFlag : std::uint8_t {
  Readable = 0,
  Writable = 1,
  Executable = 2,
  Loaded = 3,
  Initialized = 4,
  ThreadLocal = 5,
};

constexpr int kSectionFlagCount = 6;

const char* isaName(Isa isa);
const char* fileFormatName(FileFormat format);
const char* sectionFlagName(SectionFlag flag);

/// Small value-type set over SectionFlag.
class SectionFlagSet {
 public:
  SectionFlagSet() = default;
  SectionFlagSet(std::initializer_list<SectionFlag> flags) {
    for (SectionFlag f : flags) set(f);
  }

  void set(SectionFlag f) { bits_ |= mask(f); }
  void clear(SectionFlag f) { bits_ &= static_cast<std::uint8_t>(~mask(f)); }
  bool contains(SectionFlag f) const { return (bits_ & mask(f)) != 0; }
  bool empty() const { return bits_ == 0; }

  auto operator<=>(const SectionFlagSet&) const = default;

 private:
  static std::uint8_t mask(SectionFlag f) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(f));
  }
  std::uint8_t bits_ = 0;
};

enum class BlockKind : std::uint8_t { Code = 0, Data = 1 };

/// A point inside a sized entity: UUID of a block or interval plus a byte
/// displacement. Used as a key type in auxiliary tables.
struct Offset {
  Uuid element;
  std::uint64_t displacement = 0;

  auto operator<=>(const Offset&) const = default;
};

// --- Symbolic expressions ---------------------------------------------------

/// symbol + offset
struct SymAddrConst {
  Uuid symbol;
  std::int64_t offset = 0;

  auto operator<=>(const SymAddrConst&) const = default;
};

/// (minuend - subtrahend) / scale + offset, with truncating signed division
/// toward zero. `scale` must be nonzero.
struct SymAddrAddr {
  Uuid minuend;
  Uuid subtrahend;
  std::int64_t scale = 1;
  std::int64_t offset = 0;

  auto operator<=>(const SymAddrAddr&) const = default;
};

using SymbolicExpression = std::variant<SymAddrConst, SymAddrAddr>;

// --- Entities ----------------------------------------------------------------

/// Symbol payload alternatives, in wire-tag order: absolute value, referent
/// block UUID, undefined.
using SymbolPayload = std::variant<std::int64_t, Uuid, std::monostate>;

struct Symbol {
  Uuid uuid;
  std::string name;
  SymbolPayload payload = std::monostate{};

  bool hasReferent() const { return payload.index() == 1; }
  bool hasValue() const { return payload.index() == 0; }
};

struct ProxyBlock {
  Uuid uuid;
};

/// A code or data block: an addressable byte range inside a ByteInterval.
/// Blocks force no interpretation of their bytes; zero-size blocks are legal
/// and ranges of sibling blocks may overlap arbitrarily.
struct ByteBlock {
  Uuid uuid;
  BlockKind kind = BlockKind::Code;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
};

/// A contiguous byte region, optionally pinned to an address. `contents` may
/// be shorter than `size`; the uninitialized tail reads as zero.
struct ByteInterval {
  Uuid uuid;
  std::optional<std::uint64_t> address;
  std::uint64_t size = 0;
  Bytes contents;
  std::vector<std::unique_ptr<ByteBlock>> blocks;
  std::map<std::uint64_t, SymbolicExpression> symExprs;

  /// Byte at `pos`, zero when beyond the initialized contents.
  std::uint8_t byteAt(std::uint64_t pos) const {
    return pos < contents.size() ? contents[pos] : 0;
  }
};

struct Section {
  Uuid uuid;
  std::string name;
  SectionFlagSet flags;
  std::vector<std::unique_ptr<ByteInterval>> intervals;
};

/// One auxiliary table entry: a canonical type-specifier string plus the
/// encoded payload. Entries under unknown labels are carried verbatim.
struct AuxDataEntry {
  std::string typeSpec;
  Bytes bytes;

  bool operator==(const AuxDataEntry&) const = default;
};

using AuxDataMap = std::map<std::string, AuxDataEntry>;

struct Module {
  Uuid uuid;
  std::string name;
  Isa isa = Isa::Undefined;
  FileFormat fileFormat = FileFormat::Undefined;
  std::optional<std::uint64_t> preferredBase;
  std::vector<std::unique_ptr<Section>> sections;
  std::vector<std::unique_ptr<Symbol>> symbols;
  std::vector<std::unique_ptr<ProxyBlock>> proxyBlocks;
  AuxDataMap auxData;
};

// --- Node index --------------------------------------------------------------

struct SectionSite {
  Section* section;
  Module* module;
};
struct IntervalSite {
  ByteInterval* interval;
  Section* section;
  Module* module;
};
struct BlockSite {
  ByteBlock* block;
  ByteInterval* interval;
  Module* module;
};
struct SymbolSite {
  Symbol* symbol;
  Module* module;
};
struct ProxySite {
  ProxyBlock* proxy;
  Module* module;
};

class Ir;

using Node =
    std::variant<Ir*, Module*, SectionSite, IntervalSite, BlockSite, SymbolSite, ProxySite>;

// --- The IR ------------------------------------------------------------------

/// The root of one IR instance: modules, the single interprocedural CFG, and
/// IR-level auxiliary tables, plus a UUID index over every owned entity.
///
/// The IR is an inert value. It performs no synchronization; concurrent reads
/// are safe and any mutation requires exclusive access. Construction-time
/// checks are limited to what would corrupt bookkeeping (duplicate UUIDs on
/// insert, block ranges beyond their interval); anything else (dangling
/// references, oversized contents, inconsistent tables) is representable and
/// reported by validate() rather than prevented here.
class Ir {
 public:
  static std::unique_ptr<Ir> create(std::uint32_t version);
  static std::unique_ptr<Ir> create(std::uint32_t version, Uuid id);

  Ir(const Ir&) = delete;
  Ir& operator=(const Ir&) = delete;

  Uuid uuid() const { return uuid_; }
  std::uint32_t version() const { return version_; }
  void setVersion(std::uint32_t v) { version_ = v; }

  const std::vector<std::unique_ptr<Module>>& modules() const { return modules_; }
  /// Mutable view for traversals that edit entity fields in place (the
  /// rewrite engine). Insertion and removal still go through add*/remove*,
  /// which keep the UUID index coherent.
  std::vector<std::unique_ptr<Module>>& modules() { return modules_; }
  Ipcfg& cfg() { return cfg_; }
  const Ipcfg& cfg() const { return cfg_; }
  AuxDataMap& auxData() { return auxData_; }
  const AuxDataMap& auxData() const { return auxData_; }

  // -- Construction (index-maintaining) --------------------------------------

  Result<Module*> addModule(std::string name, Isa isa, FileFormat format,
                            std::optional<Uuid> id = std::nullopt);
  Result<Section*> addSection(Uuid module, std::string name, SectionFlagSet flags,
                              std::optional<Uuid> id = std::nullopt);
  Result<ByteInterval*> addInterval(Uuid section, std::optional<std::uint64_t> address,
                                    std::uint64_t size, Bytes contents,
                                    std::optional<Uuid> id = std::nullopt);
  /// Appends a block at `offset`; fails with OutOfRange when
  /// offset + size exceeds the interval size. Overlap with existing blocks is
  /// explicitly permitted.
  Result<Uuid> addBlock(Uuid interval, std::uint64_t offset, BlockKind kind,
                        std::uint64_t size, std::optional<Uuid> id = std::nullopt);
  /// addBlock without the range check. Used by the deserializer: a block
  /// range beyond its interval must survive loading so validate() can report
  /// it, rather than making the file unreadable.
  Result<Uuid> adoptBlock(Uuid interval, std::uint64_t offset, BlockKind kind,
                          std::uint64_t size, Uuid id);
  Result<Symbol*> addSymbol(Uuid module, std::string name, SymbolPayload payload,
                            std::optional<Uuid> id = std::nullopt);
  Result<ProxyBlock*> addProxyBlock(Uuid module, std::optional<Uuid> id = std::nullopt);

  /// Installs or replaces the expression anchored at `offset`. The offset is
  /// not range-checked; validate() reports out-of-range anchors.
  Result<void> setSymExpr(Uuid interval, std::uint64_t offset, SymbolicExpression expr);
  bool removeSymExpr(Uuid interval, std::uint64_t offset);

  /// Removes a block from its interval and from the CFG (incident edges do
  /// not survive their endpoint).
  Result<void> removeBlock(Uuid block);

  // -- Unchecked field mutation ----------------------------------------------
  // Lifters routinely pass through inconsistent intermediate states; these
  // setters do not re-establish invariants. validate() reports the damage.

  Result<void> setIntervalSize(Uuid interval, std::uint64_t size);
  Result<void> setIntervalContents(Uuid interval, Bytes contents);
  Result<void> setBlockSize(Uuid block, std::uint64_t size);

  /// Rewrites an entity's UUID. The target value is not required to be fresh;
  /// a collision leaves the index entry of the earlier owner in place and is
  /// reported by validate() as DuplicateUuid.
  Result<void> setEntityUuid(Uuid current, Uuid desired);

  // -- Lookup -----------------------------------------------------------------

  /// O(1) expected lookup of any entity by UUID.
  std::optional<Node> findNode(Uuid id) const;

  const ByteBlock* findBlock(Uuid id) const;
  std::optional<BlockSite> findBlockSite(Uuid id) const;
  std::optional<IntervalSite> findIntervalSite(Uuid id) const;
  const Symbol* findSymbol(Uuid id) const;
  std::optional<SymbolSite> findSymbolSite(Uuid id) const;
  const ProxyBlock* findProxy(Uuid id) const;
  Module* findModule(Uuid id) const;

  bool isCfgNode(Uuid id) const;  // code block or proxy block

  // -- Byte access ------------------------------------------------------------

  /// The block's bytes, zero-extended where its range lies beyond the
  /// interval's initialized contents.
  Result<Bytes> blockBytes(Uuid block) const;

  /// interval.address + block offset, or nullopt when the interval has no
  /// fixed placement.
  Result<std::optional<std::uint64_t>> blockAddress(Uuid block) const;

  // -- Internal index maintenance (used by the rewrite engine) ----------------

  void indexInsertInterval(ByteInterval* interval, Section* section, Module* module);
  void reindexBlock(ByteBlock* block, ByteInterval* interval, Module* module);

 private:
  explicit Ir(std::uint32_t version, Uuid id) : uuid_(id), version_(version) {}

  Result<void> indexInsert(Uuid id, Node node);
  void indexErase(Uuid id, const void* owner);

  Uuid uuid_;
  std::uint32_t version_ = 0;
  std::vector<std::unique_ptr<Module>> modules_;
  Ipcfg cfg_;
  AuxDataMap auxData_;
  std::unordered_map<Uuid, Node, UuidHash> index_;
};

/// Checked CFG edge insertion: endpoints must resolve to code or proxy
/// blocks, the label must be well-formed (a fallthrough is unconditional and
/// direct), a source keeps at most one outgoing fallthrough, and duplicate
/// triples are rejected.
Result<Edge> addCfgEdge(Ir& ir, Uuid source, Uuid target, EdgeLabel label);

}  // namespace bir
