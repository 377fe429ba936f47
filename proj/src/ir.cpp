#include "bir/ir.hpp"

#include <algorithm>

namespace bir {

const char* isaName(Isa isa) {
  switch (isa) {
    case Isa::Undefined: return "Undefined";
    case Isa::IA32: return "IA32";
    case Isa::X64: return "X64";
    case Isa::Arm32: return "ARM32";
    case Isa::Arm64: return "ARM64";
    case Isa::Mips32: return "MIPS32";
    case Isa::Ppc32: return "PPC32";
  }
  return "?";
}

const char* fileFormatName(FileFormat format) {
  switch (format) {
    case FileFormat::Undefined: return "Undefined";
    case FileFormat::Elf: return "ELF";
    case FileFormat::Pe: return "PE";
    case FileFormat::Raw: return "Raw";
  }
  return "?";
}

const char* sectionFlagName(SectionFlag flag) {
  switch (flag) {
    case SectionFlag::Readable: return "Readable";
    case SectionFlag::Writable: return "Writable";
    case SectionFlag::Executable: return "Executable";
    case SectionFlag::Loaded: return "Loaded";
    case SectionFlag::Initialized: return "Initialized";
    case SectionFlag::ThreadLocal: return "ThreadLocal";
  }
  return "?";
}

std::unique_ptr<Ir> Ir::create(std::uint32_t version) {
  return create(version, Uuid::generate());
}

std::unique_ptr<Ir> Ir::create(std::uint32_t version, Uuid id) {
  auto ir = std::unique_ptr<Ir>(new Ir(version, id));
  ir->index_.emplace(id, ir.get());
  return ir;
}

Result<void> Ir::indexInsert(Uuid id, Node node) {
  auto [it, inserted] = index_.emplace(id, node);
  if (!inserted)
    return Error(Errc::DuplicateUuid, "an entity with this UUID already exists").entity(id);
  return {};
}

namespace {
const void* nodePointer(const Node& node) {
  return std::visit(
      [](auto&& site) -> const void* {
        using T = std::decay_t<decltype(site)>;
        if constexpr (std::is_pointer_v<T>) {
          return site;
        } else if constexpr (std::is_same_v<T, SectionSite>) {
          return site.section;
        } else if constexpr (std::is_same_v<T, IntervalSite>) {
          return site.interval;
        } else if constexpr (std::is_same_v<T, BlockSite>) {
          return site.block;
        } else if constexpr (std::is_same_v<T, SymbolSite>) {
          return site.symbol;
        } else {
          return site.proxy;
        }
      },
      node);
}
}  // namespace

void Ir::indexErase(Uuid id, const void* owner) {
  auto it = index_.find(id);
  // Only drop the mapping when it actually points at the entity being
  // removed; with duplicated UUIDs the index keeps the first owner.
  if (it != index_.end() && nodePointer(it->second) == owner) index_.erase(it);
}

Result<Module*> Ir::addModule(std::string name, Isa isa, FileFormat format,
                              std::optional<Uuid> id) {
  auto m = std::make_unique<Module>();
  m->uuid = id.value_or(Uuid::generate());
  m->name = std::move(name);
  m->isa = isa;
  m->fileFormat = format;
  if (auto r = indexInsert(m->uuid, m.get()); !r) return r.error();
  modules_.push_back(std::move(m));
  return modules_.back().get();
}

Result<Section*> Ir::addSection(Uuid module, std::string name, SectionFlagSet flags,
                                std::optional<Uuid> id) {
  Module* m = findModule(module);
  if (!m) return Error(Errc::UnknownUuid, "no such module").entity(module);
  auto s = std::make_unique<Section>();
  s->uuid = id.value_or(Uuid::generate());
  s->name = std::move(name);
  s->flags = flags;
  if (auto r = indexInsert(s->uuid, SectionSite{s.get(), m}); !r) return r.error();
  m->sections.push_back(std::move(s));
  return m->sections.back().get();
}

Result<ByteInterval*> Ir::addInterval(Uuid section, std::optional<std::uint64_t> address,
                                      std::uint64_t size, Bytes contents,
                                      std::optional<Uuid> id) {
  auto it = index_.find(section);
  if (it == index_.end() || !std::holds_alternative<SectionSite>(it->second))
    return Error(Errc::UnknownUuid, "no such section").entity(section);
  auto site = std::get<SectionSite>(it->second);
  auto bi = std::make_unique<ByteInterval>();
  bi->uuid = id.value_or(Uuid::generate());
  bi->address = address;
  bi->size = size;
  bi->contents = std::move(contents);
  if (auto r = indexInsert(bi->uuid, IntervalSite{bi.get(), site.section, site.module}); !r)
    return r.error();
  site.section->intervals.push_back(std::move(bi));
  return site.section->intervals.back().get();
}

Result<Uuid> Ir::addBlock(Uuid interval, std::uint64_t offset, BlockKind kind,
                          std::uint64_t size, std::optional<Uuid> id) {
  auto site = findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  ByteInterval* bi = site->interval;
  if (offset > bi->size || size > bi->size - offset)
    return Error(Errc::OutOfRange, "block range [" + std::to_string(offset) + ", " +
                                       std::to_string(offset) + "+" + std::to_string(size) +
                                       ") exceeds interval size " + std::to_string(bi->size))
        .entity(interval);
  auto b = std::make_unique<ByteBlock>();
  b->uuid = id.value_or(Uuid::generate());
  b->kind = kind;
  b->offset = offset;
  b->size = size;
  if (auto r = indexInsert(b->uuid, BlockSite{b.get(), bi, site->module}); !r) return r.error();
  bi->blocks.push_back(std::move(b));
  return bi->blocks.back()->uuid;
}

Result<Uuid> Ir::adoptBlock(Uuid interval, std::uint64_t offset, BlockKind kind,
                            std::uint64_t size, Uuid id) {
  auto site = findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  auto b = std::make_unique<ByteBlock>();
  b->uuid = id;
  b->kind = kind;
  b->offset = offset;
  b->size = size;
  if (auto r = indexInsert(b->uuid, BlockSite{b.get(), site->interval, site->module}); !r)
    return r.error();
  site->interval->blocks.push_back(std::move(b));
  return id;
}

Result<Symbol*> Ir::addSymbol(Uuid module, std::string name, SymbolPayload payload,
                              std::optional<Uuid> id) {
  Module* m = findModule(module);
  if (!m) return Error(Errc::UnknownUuid, "no such module").entity(module);
  auto s = std::make_unique<Symbol>();
  s->uuid = id.value_or(Uuid::generate());
  s->name = std::move(name);
  s->payload = payload;
  if (auto r = indexInsert(s->uuid, SymbolSite{s.get(), m}); !r) return r.error();
  m->symbols.push_back(std::move(s));
  return m->symbols.back().get();
}

Result<ProxyBlock*> Ir::addProxyBlock(Uuid module, std::optional<Uuid> id) {
  Module* m = findModule(module);
  if (!m) return Error(Errc::UnknownUuid, "no such module").entity(module);
  auto p = std::make_unique<ProxyBlock>();
  p->uuid = id.value_or(Uuid::generate());
  if (auto r = indexInsert(p->uuid, ProxySite{p.get(), m}); !r) return r.error();
  m->proxyBlocks.push_back(std::move(p));
  return m->proxyBlocks.back().get();
}

Result<void> Ir::setSymExpr(Uuid interval, std::uint64_t offset, SymbolicExpression expr) {
  auto site = findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  site->interval->symExprs[offset] = expr;
  return {};
}

bool Ir::removeSymExpr(Uuid interval, std::uint64_t offset) {
  auto site = findIntervalSite(interval);
  if (!site) return false;
  return site->interval->symExprs.erase(offset) != 0;
}

Result<void> Ir::removeBlock(Uuid block) {
  auto site = findBlockSite(block);
  if (!site) return Error(Errc::UnknownUuid, "no such block").entity(block);
  auto& blocks = site->interval->blocks;
  auto it = std::find_if(blocks.begin(), blocks.end(),
                         [&](const auto& b) { return b.get() == site->block; });
  indexErase(block, site->block);
  blocks.erase(it);
  cfg_.removeVertex(block);
  return {};
}

Result<void> Ir::setIntervalSize(Uuid interval, std::uint64_t size) {
  auto site = findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  site->interval->size = size;
  return {};
}

Result<void> Ir::setIntervalContents(Uuid interval, Bytes contents) {
  auto site = findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  site->interval->contents = std::move(contents);
  return {};
}

Result<void> Ir::setBlockSize(Uuid block, std::uint64_t size) {
  auto site = findBlockSite(block);
  if (!site) return Error(Errc::UnknownUuid, "no such block").entity(block);
  site->block->size = size;
  return {};
}

Result<void> Ir::setEntityUuid(Uuid current, Uuid desired) {
  auto it = index_.find(current);
  if (it == index_.end()) return Error(Errc::UnknownUuid, "no such entity").entity(current);
  if (current == desired) return {};
  Node node = it->second;
  std::visit(
      [&](auto&& site) {
        using T = std::decay_t<decltype(site)>;
        if constexpr (std::is_same_v<T, Ir*>) {
          site->uuid_ = desired;
        } else if constexpr (std::is_same_v<T, Module*>) {
          site->uuid = desired;
        } else if constexpr (std::is_same_v<T, SectionSite>) {
          site.section->uuid = desired;
        } else if constexpr (std::is_same_v<T, IntervalSite>) {
          site.interval->uuid = desired;
        } else if constexpr (std::is_same_v<T, BlockSite>) {
          site.block->uuid = desired;
        } else if constexpr (std::is_same_v<T, SymbolSite>) {
          site.symbol->uuid = desired;
        } else {
          site.proxy->uuid = desired;
        }
      },
      node);
  index_.erase(it);
  index_.emplace(desired, node);  // no-op when `desired` is already mapped
  return {};
}

std::optional<Node> Ir::findNode(Uuid id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const ByteBlock* Ir::findBlock(Uuid id) const {
  auto site = findBlockSite(id);
  return site ? site->block : nullptr;
}

std::optional<BlockSite> Ir::findBlockSite(Uuid id) const {
  auto it = index_.find(id);
  if (it == index_.end() || !std::holds_alternative<BlockSite>(it->second))
    return std::nullopt;
  return std::get<BlockSite>(it->second);
}

std::optional<IntervalSite> Ir::findIntervalSite(Uuid id) const {
  auto it = index_.find(id);
  if (it == index_.end() || !std::holds_alternative<IntervalSite>(it->second))
    return std::nullopt;
  return std::get<IntervalSite>(it->second);
}

const Symbol* Ir::findSymbol(Uuid id) const {
  auto site = findSymbolSite(id);
  return site ? site->symbol : nullptr;
}

std::optional<SymbolSite> Ir::findSymbolSite(Uuid id) const {
  auto it = index_.find(id);
  if (it == index_.end() || !std::holds_alternative<SymbolSite>(it->second))
    return std::nullopt;
  return std::get<SymbolSite>(it->second);
}

const ProxyBlock* Ir::findProxy(Uuid id) const {
  auto it = index_.find(id);
  if (it == index_.end() || !std::holds_alternative<ProxySite>(it->second)) return nullptr;
  return std::get<ProxySite>(it->second).proxy;
}

Module* Ir::findModule(Uuid id) const {
  auto it = index_.find(id);
  if (it == index_.end() || !std::holds_alternative<Module*>(it->second)) return nullptr;
  return std::get<Module*>(it->second);
}

bool Ir::isCfgNode(Uuid id) const {
  if (findProxy(id)) return true;
  const ByteBlock* b = findBlock(id);
  return b && b->kind == BlockKind::Code;
}

Result<Bytes> Ir::blockBytes(Uuid block) const {
  auto site = findBlockSite(block);
  if (!site) {
    if (findProxy(block))
      return Error(Errc::ProxyHasNoBytes, "proxy blocks own no bytes").entity(block);
    return Error(Errc::UnknownUuid, "no such block").entity(block);
  }
  const ByteBlock& b = *site->block;
  const ByteInterval& bi = *site->interval;
  Bytes out(static_cast<std::size_t>(b.size), 0);
  for (std::uint64_t i = 0; i < b.size; ++i)
    out[static_cast<std::size_t>(i)] = bi.byteAt(b.offset + i);
  return out;
}

Result<std::optional<std::uint64_t>> Ir::blockAddress(Uuid block) const {
  auto site = findBlockSite(block);
  if (!site) return Error(Errc::UnknownUuid, "no such block").entity(block);
  if (!site->interval->address) return std::optional<std::uint64_t>{};
  return std::optional<std::uint64_t>{*site->interval->address + site->block->offset};
}

void Ir::indexInsertInterval(ByteInterval* interval, Section* section, Module* module) {
  index_[interval->uuid] = IntervalSite{interval, section, module};
}

void Ir::reindexBlock(ByteBlock* block, ByteInterval* interval, Module* module) {
  index_[block->uuid] = BlockSite{block, interval, module};
}

}  // namespace bir
