#include "support/generator.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bir/auxdata.hpp"
#include "bir/cfg.hpp"
#include "bir/rewrite.hpp"

namespace bir::test {

namespace {

struct BlockRef {
  Uuid uuid;
  Uuid interval;
  BlockKind kind;
  std::uint64_t offset;
  std::uint64_t size;
};

struct IntervalRef {
  Uuid uuid;
  ByteInterval* bi;
  Module* owner = nullptr;
};

TypeSpec offsetU64Spec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Offset),
                           TypeSpec::scalar(TypeKind::Uint64));
}
TypeSpec offsetStringSpec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Offset),
                           TypeSpec::scalar(TypeKind::String));
}
TypeSpec uuidU64Spec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid),
                           TypeSpec::scalar(TypeKind::Uint64));
}
TypeSpec uuidStringSpec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid),
                           TypeSpec::scalar(TypeKind::String));
}
TypeSpec uuidUuidSpec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid),
                           TypeSpec::scalar(TypeKind::Uuid));
}
TypeSpec uuidSetSpec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid),
                           TypeSpec::set(TypeSpec::scalar(TypeKind::Uuid)));
}

std::vector<Uuid> sampleDistinct(Rng& rng, const std::vector<Uuid>& pool, std::size_t want) {
  std::vector<Uuid> out;
  for (std::size_t i = 0; i < want * 3 && out.size() < want && !pool.empty(); ++i) {
    Uuid u = pool[pick(rng, pool.size())];
    if (std::find(out.begin(), out.end(), u) == out.end()) out.push_back(u);
  }
  return out;
}

AuxValue uuidSet(const std::vector<Uuid>& ids) {
  AuxValue::List items;
  for (Uuid id : ids) items.push_back(AuxValue::ofUuid(id));
  return AuxValue::ofList(std::move(items));
}

/// Three consistent function tables over a sample of this module's code
/// blocks. Built directly rather than via makeFunction so the function UUIDs
/// come from `rng` and serialization stays process-independent.
void addFunctionTables(Module& m, Rng& rng, const std::vector<Uuid>& codeBlocks,
                       const std::vector<Uuid>& symbols) {
  if (codeBlocks.empty() || symbols.empty()) return;
  AuxValue::Pairs fb, fe, fn;
  int functions = 1 + static_cast<int>(pick(rng, 2));
  for (int i = 0; i < functions; ++i) {
    Uuid f = freshUuid(rng);
    auto blocks = sampleDistinct(rng, codeBlocks, 1 + pick(rng, 4));
    std::vector<Uuid> entries(blocks.begin(), blocks.begin() + 1 + pick(rng, blocks.size()));
    fb.emplace_back(AuxValue::ofUuid(f), uuidSet(blocks));
    fe.emplace_back(AuxValue::ofUuid(f), uuidSet(entries));
    fn.emplace_back(AuxValue::ofUuid(f), AuxValue::ofUuid(symbols[pick(rng, symbols.size())]));
  }
  setTable(m, "functionBlocks", uuidSetSpec(), AuxValue::ofPairs(std::move(fb))).value();
  setTable(m, "functionEntries", uuidSetSpec(), AuxValue::ofPairs(std::move(fe))).value();
  setTable(m, "functionNames", uuidUuidSpec(), AuxValue::ofPairs(std::move(fn))).value();
}

void addUnknownTable(AuxDataMap& aux, Rng& rng) {
  static const char* labels[] = {"x-profile", "tool:notes", "trace.hot", "origin"};
  static const char* specs[] = {"sequence<int64>", "mapping<string,string>", "set<uint64>",
                                "tuple<UUID,uint64,string>", "sequence<mapping<UUID,string>>"};
  // Arbitrary payload bytes: unknown labels travel verbatim, decodable or not.
  aux[labels[pick(rng, 4)]] =
      AuxDataEntry{specs[pick(rng, 5)], randomBytes(rng, pick(rng, 25))};
}

/// Expression for one all-combinations coverage site. Every variant's value
/// fits its width at any image base below 2^31: either both symbols live in
/// the same interval as the site (relayout-invariant differences) or the
/// width is at least four bytes.
SymbolicExpression coverageExpr(Rng& rng, bool pcRelative, std::uint8_t width, Uuid s0,
                                Uuid s1) {
  if (!pcRelative && width == 1) return SymAddrAddr{s0, s0, 1, pickSigned(rng, 100)};
  if (!pcRelative && width == 2)
    return SymAddrAddr{s1, s0, static_cast<std::int64_t>(1 + pick(rng, 2)),
                       pickSigned(rng, 8)};
  if (pcRelative && width == 1) return SymAddrConst{s1, pickSigned(rng, 8)};
  return SymAddrConst{pick(rng, 2) ? s1 : s0, pickSigned(rng, 8)};
}

/// One interval under a ".cov" section holding a site for each of the 16
/// encoding directive combinations. applyRandomRewrite leaves it alone, so
/// the same-interval expressions stay decodable at any base.
void addCoverageInterval(Ir& ir, Uuid module, Rng& rng,
                         std::vector<std::pair<Offset, std::uint64_t>>& directives) {
  Section* cov =
      ir.addSection(module, ".cov",
                    {SectionFlag::Readable, SectionFlag::Loaded, SectionFlag::Initialized},
                    freshUuid(rng))
          .value();
  ByteInterval* ci =
      ir.addInterval(cov->uuid, std::nullopt, 80, randomBytes(rng, 80), freshUuid(rng))
          .value();
  Uuid b0 = ir.addBlock(ci->uuid, 0, BlockKind::Code, 4, freshUuid(rng)).value();
  Uuid b1 = ir.addBlock(ci->uuid, 4, BlockKind::Code, 4, freshUuid(rng)).value();
  Uuid s0 = ir.addSymbol(module, "cov0", SymbolPayload{b0}, freshUuid(rng)).value()->uuid;
  Uuid s1 = ir.addSymbol(module, "cov1", SymbolPayload{b1}, freshUuid(rng)).value()->uuid;
  std::uint64_t cursor = 8;
  for (bool pcRelative : {false, true})
    for (std::uint8_t width : {1, 2, 4, 8})
      for (Endianness endianness : {Endianness::Little, Endianness::Big}) {
        ir.setSymExpr(ci->uuid, cursor, coverageExpr(rng, pcRelative, width, s0, s1))
            .value();
        directives.emplace_back(Offset{ci->uuid, cursor},
                                packDirective({width, endianness, pcRelative}));
        cursor += width;
      }
}

}  // namespace

std::unique_ptr<Ir> generateIr(Rng& rng, const GenOptions& opts) {
  const bool ref = opts.refPreservation;
  auto ir = Ir::create(static_cast<std::uint32_t>(1 + pick(rng, 3)), freshUuid(rng));

  struct ModuleCtx {
    Module* m = nullptr;
    std::vector<BlockRef> blocks;
    std::vector<IntervalRef> intervals;
    std::vector<Uuid> proxies;
    std::vector<Uuid> symbols;
    std::vector<Uuid> codeBlocks;
  };
  std::vector<ModuleCtx> modules;
  static const char* sectionNames[] = {".text", ".data", ".rodata", ".bss", ".init"};

  // Pass 1: containers and blocks.
  int moduleCount = 1 + static_cast<int>(pick(rng, ref ? 2 : opts.maxModules));
  for (int mi = 0; mi < moduleCount; ++mi) {
    ModuleCtx ctx;
    ctx.m = ir->addModule("m" + std::to_string(mi), static_cast<Isa>(pick(rng, 7)),
                          static_cast<FileFormat>(pick(rng, 4)), freshUuid(rng))
                .value();
    if (pick(rng, 2)) ctx.m->preferredBase = 0x10000ull * (1 + pick(rng, 64));

    int sections = ref ? 1 + static_cast<int>(pick(rng, 2))
                       : static_cast<int>(pick(rng, opts.maxSectionsPerModule + 1));
    for (int si = 0; si < sections; ++si) {
      std::string name = sectionNames[pick(rng, 5)];
      if (si) name += "." + std::to_string(si);
      SectionFlagSet flags;
      if (ref) {
        flags = {SectionFlag::Readable, SectionFlag::Loaded, SectionFlag::Initialized};
        if (pick(rng, 2)) flags.set(SectionFlag::Executable);
      } else {
        for (int f = 0; f < kSectionFlagCount; ++f)
          if (pick(rng, 2)) flags.set(static_cast<SectionFlag>(f));
      }
      Section* s = ir->addSection(ctx.m->uuid, name, flags, freshUuid(rng)).value();

      int intervals = ref ? 1 + static_cast<int>(pick(rng, 3))
                          : static_cast<int>(pick(rng, opts.maxIntervalsPerSection + 1));
      for (int ii = 0; ii < intervals; ++ii) {
        std::uint64_t size = ref ? 48 + pick(rng, 208) : pick(rng, 128);
        std::optional<std::uint64_t> address;
        if (pick(rng, 2)) address = 0x1000ull * pick(rng, 4096);
        Bytes contents = randomBytes(rng, ref ? size : pick(rng, size + 1));
        ByteInterval* bi =
            ir->addInterval(s->uuid, address, size, std::move(contents), freshUuid(rng))
                .value();
        ctx.intervals.push_back({bi->uuid, bi});

        if (ref) {
          // Non-overlapping blocks tiled from offset 0, sized to hold at
          // least one eight-byte encoded site each.
          std::uint64_t cursor = 0;
          int n = 0;
          while (n < opts.maxBlocksPerInterval && cursor + 12 <= size) {
            std::uint64_t cap = std::min<std::uint64_t>(40, size - cursor);
            std::uint64_t bsize = 12 + pick(rng, cap - 12 + 1);
            BlockKind kind = pick(rng, 4) ? BlockKind::Code : BlockKind::Data;
            Uuid id = ir->addBlock(bi->uuid, cursor, kind, bsize, freshUuid(rng)).value();
            ctx.blocks.push_back({id, bi->uuid, kind, cursor, bsize});
            cursor += bsize + pick(rng, 5);
            ++n;
          }
        } else {
          int n = static_cast<int>(pick(rng, opts.maxBlocksPerInterval + 1));
          for (int b = 0; b < n; ++b) {
            std::uint64_t offset = pick(rng, size + 1);
            std::uint64_t bsize = pick(rng, size - offset + 1);
            BlockKind kind = pick(rng, 3) ? BlockKind::Code : BlockKind::Data;
            Uuid id = ir->addBlock(bi->uuid, offset, kind, bsize, freshUuid(rng)).value();
            ctx.blocks.push_back({id, bi->uuid, kind, offset, bsize});
          }
        }
      }
    }
    int proxies = static_cast<int>(pick(rng, 3));
    for (int p = 0; p < proxies; ++p)
      ctx.proxies.push_back(ir->addProxyBlock(ctx.m->uuid, freshUuid(rng)).value()->uuid);
    for (const BlockRef& b : ctx.blocks)
      if (b.kind == BlockKind::Code) ctx.codeBlocks.push_back(b.uuid);
    modules.push_back(std::move(ctx));
  }

  // Pass 2: symbols. Referent symbols are the anchor for symbolic
  // expressions, so every module with blocks gets at least one.
  std::vector<Uuid> refSymbols;
  std::vector<Uuid> allSymbols;
  for (auto& ctx : modules) {
    int extra = static_cast<int>(pick(rng, 5));
    int created = 0;
    for (std::size_t bi = 0; bi < ctx.blocks.size() && created < 1 + extra; ++bi) {
      if (bi > 0 && pick(rng, 2)) continue;
      Uuid sym = ir->addSymbol(ctx.m->uuid, "s" + std::to_string(allSymbols.size()),
                               SymbolPayload{ctx.blocks[bi].uuid}, freshUuid(rng))
                     .value()
                     ->uuid;
      refSymbols.push_back(sym);
      allSymbols.push_back(sym);
      ctx.symbols.push_back(sym);
      ++created;
    }
    if (!ref) {
      for (Uuid p : ctx.proxies)
        if (pick(rng, 2)) {
          Uuid sym = ir->addSymbol(ctx.m->uuid, "ext" + std::to_string(allSymbols.size()),
                                   SymbolPayload{p}, freshUuid(rng))
                         .value()
                         ->uuid;
          allSymbols.push_back(sym);
          ctx.symbols.push_back(sym);
        }
      if (pick(rng, 2)) {
        Uuid sym = ir->addSymbol(ctx.m->uuid, "abs" + std::to_string(allSymbols.size()),
                                 SymbolPayload{pickSigned(rng, 100000)}, freshUuid(rng))
                       .value()
                       ->uuid;
        allSymbols.push_back(sym);
        ctx.symbols.push_back(sym);
      }
      if (pick(rng, 3) == 0) {
        Uuid sym = ir->addSymbol(ctx.m->uuid, "und" + std::to_string(allSymbols.size()),
                                 SymbolPayload{std::monostate{}}, freshUuid(rng))
                       .value()
                       ->uuid;
        allSymbols.push_back(sym);
        ctx.symbols.push_back(sym);
      }
    }
  }

  // Pass 3: symbolic expressions (with per-site encoding directives when the
  // IR is image-oriented).
  for (auto& ctx : modules) {
    std::vector<std::pair<Offset, std::uint64_t>> directives;
    if (ref) {
      if (refSymbols.empty()) continue;
      for (const BlockRef& b : ctx.blocks) {
        std::uint64_t cursor = b.offset;
        int sites = 0;
        while (sites < 2 && cursor + 8 <= b.offset + b.size) {
          SymbolicExpression expr;
          std::uint8_t width = 8;
          bool pcRelative = false;
          Uuid sa = refSymbols[pick(rng, refSymbols.size())];
          Uuid sb = refSymbols[pick(rng, refSymbols.size())];
          std::int64_t scale = static_cast<std::int64_t>(1) << pick(rng, 3);
          // Width floors keep every value in range at image bases below
          // 2^31 with a total span under 16 KiB.
          switch (pick(rng, 4)) {
            case 0: {  // absolute symbol+offset: needs the full address
              static const std::uint8_t w[] = {4, 8};
              width = w[pick(rng, 2)];
              expr = SymAddrConst{sa, pickSigned(rng, 8)};
              break;
            }
            case 1: {  // pc-relative symbol+offset: bounded by the span
              static const std::uint8_t w[] = {2, 4, 8};
              width = w[pick(rng, 3)];
              pcRelative = true;
              expr = SymAddrConst{sa, pickSigned(rng, 8)};
              break;
            }
            case 2: {  // absolute difference: bounded by the span
              static const std::uint8_t w[] = {2, 4, 8};
              width = w[pick(rng, 3)];
              expr = SymAddrAddr{sa, sb, scale, pickSigned(rng, 8)};
              break;
            }
            default: {  // pc-relative difference: bounded by span + base
              static const std::uint8_t w[] = {4, 8};
              width = w[pick(rng, 2)];
              pcRelative = true;
              expr = SymAddrAddr{sa, sb, scale, pickSigned(rng, 8)};
              break;
            }
          }
          Endianness endianness = pick(rng, 2) ? Endianness::Big : Endianness::Little;
          ir->setSymExpr(b.interval, cursor, expr).value();
          directives.emplace_back(Offset{b.interval, cursor},
                                  packDirective({width, endianness, pcRelative}));
          cursor += 8 + pick(rng, 3);
          ++sites;
        }
      }
    } else if (!allSymbols.empty()) {
      for (const IntervalRef& iv : ctx.intervals) {
        if (iv.bi->size == 0) continue;
        int n = static_cast<int>(pick(rng, 4));
        for (int i = 0; i < n; ++i) {
          std::uint64_t offset = pick(rng, iv.bi->size);
          Uuid sa = allSymbols[pick(rng, allSymbols.size())];
          SymbolicExpression expr;
          if (pick(rng, 2)) {
            expr = SymAddrConst{sa, pickSigned(rng, 1000)};
          } else {
            Uuid sb = allSymbols[pick(rng, allSymbols.size())];
            expr = SymAddrAddr{sa, sb, static_cast<std::int64_t>(1 + pick(rng, 8)),
                               pickSigned(rng, 1000)};
          }
          ir->setSymExpr(iv.uuid, offset, expr).value();
          if (pick(rng, 2))
            directives.emplace_back(Offset{iv.uuid, offset},
                                    packDirective({static_cast<std::uint8_t>(
                                                       std::uint8_t{1} << pick(rng, 4)),
                                                   pick(rng, 2) ? Endianness::Big
                                                                : Endianness::Little,
                                                   pick(rng, 2) != 0}));
        }
      }
    }
    if (ref && &ctx == &modules.front()) addCoverageInterval(*ir, ctx.m->uuid, rng, directives);
    if (!directives.empty()) {
      // Duplicate keys can arise when two draws hit the same offset; the
      // last draw wins, matching setSymExpr.
      std::map<Offset, std::uint64_t> unique;
      for (auto& [k, v] : directives) unique[k] = v;
      AuxValue::Pairs pairs;
      for (auto& [k, v] : unique)
        pairs.emplace_back(AuxValue::ofOffset(k), AuxValue::ofU64(v));
      setTable(*ctx.m, "seEncodings", offsetU64Spec(), AuxValue::ofPairs(std::move(pairs)))
          .value();
    }
  }

  // Pass 4: CFG.
  std::vector<Uuid> cfgNodes;
  for (const auto& ctx : modules) {
    cfgNodes.insert(cfgNodes.end(), ctx.codeBlocks.begin(), ctx.codeBlocks.end());
    cfgNodes.insert(cfgNodes.end(), ctx.proxies.begin(), ctx.proxies.end());
  }
  if (cfgNodes.size() >= 2) {
    int attempts = static_cast<int>(pick(rng, opts.maxEdgeAttempts + 1));
    for (int i = 0; i < attempts; ++i) {
      Uuid src = cfgNodes[pick(rng, cfgNodes.size())];
      Uuid tgt = cfgNodes[pick(rng, cfgNodes.size())];
      EdgeLabel label{pick(rng, 2) != 0, pick(rng, 2) != 0,
                      static_cast<EdgeKind>(pick(rng, 6))};
      if (label.kind == EdgeKind::Fallthrough) label = {false, true, EdgeKind::Fallthrough};
      (void)addCfgEdge(*ir, src, tgt, label);  // rejections simply skip
    }
  }

  // Pass 5: auxiliary tables.
  if (opts.withAux) {
    for (auto& ctx : modules) {
      AuxValue::Pairs alignment, comments, types, padding, forwarding;
      for (const BlockRef& b : ctx.blocks) {
        if (!ref && pick(rng, 3) == 0) {
          // Alignments that the block's own offset already satisfies, so
          // interval constraints never contradict each other.
          std::uint64_t a = std::uint64_t{1} << pick(rng, 5);
          while (a > 1 && b.offset % a != 0) a >>= 1;
          alignment.emplace_back(AuxValue::ofUuid(b.uuid), AuxValue::ofU64(a));
        }
        if (pick(rng, 3) == 0)
          comments.emplace_back(
              AuxValue::ofOffset(Offset{b.uuid, pick(rng, b.size + 1)}),
              AuxValue::ofString("note " + std::to_string(pick(rng, 1000))));
        if (b.kind == BlockKind::Data && pick(rng, 2)) {
          static const char* names[] = {"uint64_t", "char[16]", "struct pair", "double"};
          types.emplace_back(AuxValue::ofUuid(b.uuid), AuxValue::ofString(names[pick(rng, 4)]));
        }
      }
      for (const IntervalRef& iv : ctx.intervals)
        if (pick(rng, 4) == 0)
          padding.emplace_back(AuxValue::ofOffset(Offset{iv.uuid, pick(rng, iv.bi->size + 1)}),
                               AuxValue::ofU64(std::uint64_t{1} << pick(rng, 4)));
      if (ctx.symbols.size() >= 2 && pick(rng, 2))
        for (std::size_t i = 0; i + 1 < ctx.symbols.size() && forwarding.size() < 3; i += 2)
          forwarding.emplace_back(AuxValue::ofUuid(ctx.symbols[i]),
                                  AuxValue::ofUuid(ctx.symbols[i + 1]));

      // Keys of these tables are all Uuid or Offset; order is irrelevant
      // (the encoder sorts), only duplicates must go.
      auto keyLess = [](const AuxValue& a, const AuxValue& b) {
        if (const Uuid* ua = a.asUuid()) return *ua < *b.asUuid();
        return *a.asOffset() < *b.asOffset();
      };
      auto dedupe = [&](AuxValue::Pairs& pairs) {
        std::sort(pairs.begin(), pairs.end(),
                  [&](const auto& a, const auto& b) { return keyLess(a.first, b.first); });
        pairs.erase(std::unique(pairs.begin(), pairs.end(),
                                [](const auto& a, const auto& b) { return a.first == b.first; }),
                    pairs.end());
      };
      for (auto* p : {&alignment, &comments, &types, &padding, &forwarding}) dedupe(*p);

      if (!alignment.empty())
        setTable(*ctx.m, "alignment", uuidU64Spec(), AuxValue::ofPairs(std::move(alignment)))
            .value();
      if (!comments.empty())
        setTable(*ctx.m, "comments", offsetStringSpec(),
                 AuxValue::ofPairs(std::move(comments)))
            .value();
      if (!types.empty())
        setTable(*ctx.m, "types", uuidStringSpec(), AuxValue::ofPairs(std::move(types)))
            .value();
      if (!padding.empty())
        setTable(ref ? ir->auxData() : ctx.m->auxData, "padding", offsetU64Spec(),
                 AuxValue::ofPairs(std::move(padding)))
            .value();
      if (!forwarding.empty())
        setTable(*ctx.m, "symbolForwarding", uuidUuidSpec(),
                 AuxValue::ofPairs(std::move(forwarding)))
            .value();
      if (pick(rng, 2)) addFunctionTables(*ctx.m, rng, ctx.codeBlocks, ctx.symbols);
      if (pick(rng, 2)) addUnknownTable(ctx.m->auxData, rng);
    }
    if (pick(rng, 2)) addUnknownTable(ir->auxData(), rng);
  }
  return ir;
}

std::unique_ptr<Ir> makeRichIr(Rng& rng) {
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("rich", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  m->preferredBase = 0x400000;
  Section* text = ir->addSection(m->uuid, ".text",
                                 {SectionFlag::Readable, SectionFlag::Executable,
                                  SectionFlag::Loaded, SectionFlag::Initialized},
                                 freshUuid(rng))
                      .value();
  Section* data = ir->addSection(m->uuid, ".data",
                                 {SectionFlag::Readable, SectionFlag::Writable,
                                  SectionFlag::Loaded, SectionFlag::Initialized},
                                 freshUuid(rng))
                      .value();
  ByteInterval* ti =
      ir->addInterval(text->uuid, 0x401000, 32, randomBytes(rng, 32), freshUuid(rng)).value();
  ByteInterval* di =
      ir->addInterval(data->uuid, std::nullopt, 16, randomBytes(rng, 16), freshUuid(rng))
          .value();
  Uuid c0 = ir->addBlock(ti->uuid, 0, BlockKind::Code, 8, freshUuid(rng)).value();
  Uuid c1 = ir->addBlock(ti->uuid, 8, BlockKind::Code, 8, freshUuid(rng)).value();
  Uuid c2 = ir->addBlock(ti->uuid, 16, BlockKind::Code, 8, freshUuid(rng)).value();
  Uuid d0 = ir->addBlock(di->uuid, 0, BlockKind::Data, 8, freshUuid(rng)).value();
  Uuid p0 = ir->addProxyBlock(m->uuid, freshUuid(rng)).value()->uuid;
  Uuid sMain = ir->addSymbol(m->uuid, "main", SymbolPayload{c0}, freshUuid(rng)).value()->uuid;
  Uuid sLoop = ir->addSymbol(m->uuid, "loop", SymbolPayload{c1}, freshUuid(rng)).value()->uuid;
  Uuid sBuf = ir->addSymbol(m->uuid, "buf", SymbolPayload{d0}, freshUuid(rng)).value()->uuid;
  ir->addSymbol(m->uuid, "answer", SymbolPayload{std::int64_t{42}}, freshUuid(rng)).value();
  ir->addSymbol(m->uuid, "extern_fn", SymbolPayload{p0}, freshUuid(rng)).value();

  ir->setSymExpr(ti->uuid, 4, SymAddrConst{sBuf, 0}).value();
  ir->setSymExpr(di->uuid, 8, SymAddrAddr{sLoop, sMain, 1, 0}).value();

  addCfgEdge(*ir, c0, c1, {false, true, EdgeKind::Fallthrough}).value();
  addCfgEdge(*ir, c1, c2, {true, true, EdgeKind::Branch}).value();
  addCfgEdge(*ir, c2, p0, {false, true, EdgeKind::Call}).value();

  setTable(*m, "alignment", uuidU64Spec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(c0), AuxValue::ofU64(16)},
                              {AuxValue::ofUuid(d0), AuxValue::ofU64(8)}}))
      .value();
  setTable(*m, "comments", offsetStringSpec(),
           AuxValue::ofPairs({{AuxValue::ofOffset(Offset{c0, 0}),
                               AuxValue::ofString("entry point")},
                              {AuxValue::ofOffset(Offset{ti->uuid, 4}),
                               AuxValue::ofString("reloc site")}}))
      .value();
  setTable(*m, "types", uuidStringSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(d0), AuxValue::ofString("uint64_t")}}))
      .value();
  Uuid fn = freshUuid(rng);
  setTable(*m, "functionBlocks", uuidSetSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(fn), uuidSet({c0, c1, c2})}}))
      .value();
  setTable(*m, "functionEntries", uuidSetSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(fn), uuidSet({c0})}}))
      .value();
  setTable(*m, "functionNames", uuidUuidSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(fn), AuxValue::ofUuid(sMain)}}))
      .value();
  setTable(*ir, "padding", offsetU64Spec(),
           AuxValue::ofPairs({{AuxValue::ofOffset(Offset{di->uuid, 0}), AuxValue::ofU64(4)}}))
      .value();
  return ir;
}

namespace {

std::vector<IntervalRef> eligibleIntervals(Ir& ir) {
  std::vector<IntervalRef> out;
  for (auto& m : ir.modules())
    for (auto& s : m->sections) {
      if (s->name == ".cov") continue;
      for (auto& bi : s->intervals) out.push_back({bi->uuid, bi.get(), m.get()});
    }
  return out;
}

// Encoded sites are at most eight bytes wide; treating every expression as an
// eight-byte window avoids reading the directive tables here.
bool windowStraddles(const ByteInterval& bi, std::uint64_t at) {
  for (const auto& [o, expr] : bi.symExprs)
    if (o < at && o + 8 > at) return true;
  return false;
}

bool blockStraddles(const ByteInterval& bi, std::uint64_t at) {
  for (const auto& b : bi.blocks)
    if (b->offset < at && b->offset + b->size > at) return true;
  return false;
}

}  // namespace

bool applyRandomRewrite(Ir& ir, Rng& rng) {
  auto intervals = eligibleIntervals(ir);
  if (intervals.empty()) return false;
  for (int attempt = 0; attempt < 16; ++attempt) {
    switch (pick(rng, 3)) {
      case 0: {  // split between blocks and encoded sites
        IntervalRef iv = intervals[pick(rng, intervals.size())];
        if (iv.bi->size < 2) break;
        std::uint64_t at = 1 + pick(rng, iv.bi->size - 1);
        if (blockStraddles(*iv.bi, at) || windowStraddles(*iv.bi, at)) break;
        if (splitInterval(ir, iv.uuid, at, freshUuid(rng))) return true;
        break;
      }
      case 1: {  // insert at a block boundary clear of encoded sites
        IntervalRef iv = intervals[pick(rng, intervals.size())];
        std::vector<std::uint64_t> spots{0, iv.bi->size};
        for (const auto& b : iv.bi->blocks) {
          spots.push_back(b->offset);
          spots.push_back(b->offset + b->size);
        }
        std::sort(spots.begin(), spots.end());
        spots.erase(std::unique(spots.begin(), spots.end()), spots.end());
        std::erase_if(spots, [&](std::uint64_t at) { return windowStraddles(*iv.bi, at); });
        if (spots.empty()) break;
        std::uint64_t at = spots[pick(rng, spots.size())];
        if (insertBytes(ir, iv.uuid, at, randomBytes(rng, 1 + pick(rng, 24)))) return true;
        break;
      }
      default: {  // move a whole block into a gap of another interval
        std::vector<std::pair<const ByteBlock*, IntervalRef>> blocks;
        for (const IntervalRef& iv : intervals)
          for (const auto& b : iv.bi->blocks) blocks.emplace_back(b.get(), iv);
        if (blocks.empty()) break;
        auto [b, src] = blocks[pick(rng, blocks.size())];
        IntervalRef dst = intervals[pick(rng, intervals.size())];
        // Encoding directives live in module-level tables; a cross-module
        // move would strand the rebased key where the image builder's
        // module-then-IR lookup cannot see it.
        if (dst.owner != src.owner) break;
        if (dst.bi->size < b->size) break;
        std::uint64_t destOffset = pick(rng, dst.bi->size - b->size + 1);
        std::uint64_t destEnd = destOffset + b->size;
        bool clear = true;
        for (const auto& other : dst.bi->blocks)
          if (destOffset < other->offset + other->size && other->offset < destEnd) clear = false;
        auto movedWith = [&](std::uint64_t o) {
          return src.uuid == dst.uuid && o >= b->offset && o - b->offset < b->size;
        };
        for (const auto& [o, expr] : dst.bi->symExprs)
          if (!movedWith(o) && o + 8 > destOffset && o < destEnd) clear = false;
        if (!clear) break;
        if (moveBlock(ir, b->uuid, dst.uuid, destOffset)) return true;
        break;
      }
    }
  }
  // Prepending shifts every block and site uniformly; always safe.
  IntervalRef iv = intervals[pick(rng, intervals.size())];
  return insertBytes(ir, iv.uuid, 0, randomBytes(rng, 1 + pick(rng, 8))).ok();
}

}  // namespace bir::test
