// Emits the CLI test fixtures (.bir files, two deliberately broken ones) and
// their golden outputs. Every byte is a pure function of the fixed seeds
// below, so a rerun after an intentional output change regenerates the
// goldens reproducibly. Exits nonzero when any fixture violates the contract
// it is supposed to pin down (exit codes, clean stderr, loadability).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bir/auxdata.hpp"
#include "bir/cfg.hpp"
#include "bir/ir.hpp"
#include "bir/rewrite.hpp"
#include "bir/wire.hpp"
#include "commands.hpp"
#include "support/generator.hpp"

namespace {

using namespace bir;
using namespace bir::test;

[[noreturn]] void fail(const std::string& message) {
  std::cerr << "make_fixtures: " << message << "\n";
  std::exit(1);
}

void writeBytes(const std::string& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out.good()) fail("cannot write " + path);
}

void writeText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out.good()) fail("cannot write " + path);
}

TypeSpec uuidU64Spec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid), TypeSpec::scalar(TypeKind::Uint64));
}
TypeSpec uuidUuidSpec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid), TypeSpec::scalar(TypeKind::Uuid));
}
TypeSpec uuidSetSpec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid),
                           TypeSpec::set(TypeSpec::scalar(TypeKind::Uuid)));
}
TypeSpec offsetU64Spec() {
  return TypeSpec::mapping(TypeSpec::scalar(TypeKind::Offset),
                           TypeSpec::scalar(TypeKind::Uint64));
}

std::unique_ptr<Ir> buildEmpty() {
  Rng rng(100);
  return Ir::create(1, freshUuid(rng));
}

std::unique_ptr<Ir> buildHello() {
  Rng rng(101);
  return makeRichIr(rng);
}

/// Same seed as f01, then a handful of edits so the diff golden covers
/// changed payloads, renames, added blocks, changed contents and added edges.
std::unique_ptr<Ir> buildHelloVariant() {
  Rng rng(101);
  auto ir = makeRichIr(rng);
  Rng extra(202);
  Module& m = *ir->modules().front();
  for (auto& sym : m.symbols) {
    if (sym->name == "answer") sym->payload = std::int64_t{43};
    if (sym->name == "buf") sym->name = "buffer";
  }
  ByteInterval* ti = m.sections[0]->intervals[0].get();
  ByteInterval* di = m.sections[1]->intervals[0].get();
  ti->contents[0] ^= 0xFF;
  ir->addBlock(di->uuid, 8, BlockKind::Data, 8, freshUuid(extra)).value();
  Uuid c0 = ti->blocks[0]->uuid;
  Uuid c2 = ti->blocks[2]->uuid;
  addCfgEdge(*ir, c0, c2, {false, true, EdgeKind::Branch}).value();
  return ir;
}

std::unique_ptr<Ir> buildMultiModule() {
  Rng rng(103);
  auto ir = Ir::create(1, freshUuid(rng));

  Module* alpha = ir->addModule("alpha", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  alpha->preferredBase = 0x400000;
  Section* at = ir->addSection(alpha->uuid, ".text",
                               {SectionFlag::Readable, SectionFlag::Executable,
                                SectionFlag::Loaded, SectionFlag::Initialized},
                               freshUuid(rng))
                    .value();
  ByteInterval* a1 =
      ir->addInterval(at->uuid, 0x1000, 16, randomBytes(rng, 16), freshUuid(rng)).value();
  ir->addBlock(a1->uuid, 0, BlockKind::Code, 8, freshUuid(rng)).value();
  Uuid a1b1 = ir->addBlock(a1->uuid, 8, BlockKind::Code, 8, freshUuid(rng)).value();
  Uuid sStart = ir->addSymbol(alpha->uuid, "start",
                              SymbolPayload{a1->blocks[0]->uuid}, freshUuid(rng))
                    .value()
                    ->uuid;
  ir->addSymbol(alpha->uuid, "helper", SymbolPayload{a1b1}, freshUuid(rng)).value();
  Uuid sAlias =
      ir->addSymbol(alpha->uuid, "alias", SymbolPayload{std::monostate{}}, freshUuid(rng))
          .value()
          ->uuid;
  setTable(*alpha, "symbolForwarding", uuidUuidSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(sAlias), AuxValue::ofUuid(sStart)}}))
      .value();

  Module* beta = ir->addModule("beta", Isa::Arm64, FileFormat::Pe, freshUuid(rng)).value();
  Section* bd = ir->addSection(beta->uuid, ".data",
                               {SectionFlag::Readable, SectionFlag::Writable,
                                SectionFlag::Loaded, SectionFlag::Initialized},
                               freshUuid(rng))
                    .value();
  ByteInterval* b1 =
      ir->addInterval(bd->uuid, std::nullopt, 12, randomBytes(rng, 4), freshUuid(rng)).value();
  ir->addBlock(b1->uuid, 0, BlockKind::Data, 12, freshUuid(rng)).value();
  Uuid p0 = ir->addProxyBlock(beta->uuid, freshUuid(rng)).value()->uuid;
  Uuid p1 = ir->addProxyBlock(beta->uuid, freshUuid(rng)).value()->uuid;
  ir->addSymbol(beta->uuid, "memcpy", SymbolPayload{p0}, freshUuid(rng)).value();
  ir->addSymbol(beta->uuid, "answer_neg", SymbolPayload{std::int64_t{-5}}, freshUuid(rng))
      .value();

  Module* gamma = ir->addModule("gamma", Isa::Mips32, FileFormat::Raw, freshUuid(rng)).value();
  ir->addSymbol(gamma->uuid, "pad", SymbolPayload{std::monostate{}}, freshUuid(rng)).value();

  ir->setSymExpr(a1->uuid, 2, SymAddrConst{sStart, 2}).value();
  addCfgEdge(*ir, a1b1, p0, {false, true, EdgeKind::Call}).value();
  addCfgEdge(*ir, p0, p1, {false, false, EdgeKind::Branch}).value();
  setTable(*ir, "padding", offsetU64Spec(),
           AuxValue::ofPairs({{AuxValue::ofOffset(Offset{b1->uuid, 4}), AuxValue::ofU64(8)}}))
      .value();
  return ir;
}

/// Overlapping sibling blocks are legal; this pins down that every tool
/// handles them without complaint.
std::unique_ptr<Ir> buildOverlap() {
  Rng rng(104);
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("overlap", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  Section* s = ir->addSection(m->uuid, ".text",
                              {SectionFlag::Readable, SectionFlag::Executable,
                               SectionFlag::Loaded, SectionFlag::Initialized},
                              freshUuid(rng))
                   .value();
  ByteInterval* bi =
      ir->addInterval(s->uuid, 0x2000, 32, randomBytes(rng, 32), freshUuid(rng)).value();
  Uuid b0 = ir->addBlock(bi->uuid, 0, BlockKind::Code, 16, freshUuid(rng)).value();
  Uuid b1 = ir->addBlock(bi->uuid, 8, BlockKind::Code, 16, freshUuid(rng)).value();
  ir->addBlock(bi->uuid, 8, BlockKind::Data, 4, freshUuid(rng)).value();
  ir->addSymbol(m->uuid, "f", SymbolPayload{b0}, freshUuid(rng)).value();
  ir->addSymbol(m->uuid, "g", SymbolPayload{b1}, freshUuid(rng)).value();
  addCfgEdge(*ir, b0, b1, {false, true, EdgeKind::Branch}).value();
  return ir;
}

/// Unknown labels carry verbatim payloads that need not decode under their
/// own (well-formed) type specifier.
std::unique_ptr<Ir> buildUnknownAux() {
  Rng rng(105);
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("plain", Isa::IA32, FileFormat::Elf, freshUuid(rng)).value();
  Section* s = ir->addSection(m->uuid, ".rodata",
                              {SectionFlag::Readable, SectionFlag::Loaded,
                               SectionFlag::Initialized},
                              freshUuid(rng))
                   .value();
  ByteInterval* bi =
      ir->addInterval(s->uuid, 0x3000, 8, Bytes{'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'},
                      freshUuid(rng))
          .value();
  ir->addBlock(bi->uuid, 0, BlockKind::Data, 8, freshUuid(rng)).value();
  m->auxData["x-profile"] = AuxDataEntry{"sequence<uint64>", Bytes{0xDE, 0xAD, 0xBE, 0xEF}};
  ir->auxData()["trace.hot"] = AuxDataEntry{"mapping<UUID,uint64>", Bytes{0x01}};
  setTable(*ir, "origin", TypeSpec::scalar(TypeKind::String),
           AuxValue::ofString("hand-written fixture"))
      .value();
  return ir;
}

std::unique_ptr<Ir> buildCfgRich() {
  Rng rng(106);
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("graph", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  Section* s = ir->addSection(m->uuid, ".text",
                              {SectionFlag::Readable, SectionFlag::Executable,
                               SectionFlag::Loaded, SectionFlag::Initialized},
                              freshUuid(rng))
                   .value();
  ByteInterval* bi =
      ir->addInterval(s->uuid, 0x4000, 64, randomBytes(rng, 64), freshUuid(rng)).value();
  std::vector<Uuid> c;
  for (int i = 0; i < 8; ++i)
    c.push_back(ir->addBlock(bi->uuid, static_cast<std::uint64_t>(i) * 8, BlockKind::Code, 8,
                             freshUuid(rng))
                    .value());
  Uuid p0 = ir->addProxyBlock(m->uuid, freshUuid(rng)).value()->uuid;
  Uuid p1 = ir->addProxyBlock(m->uuid, freshUuid(rng)).value()->uuid;
  ir->addSymbol(m->uuid, "main", SymbolPayload{c[0]}, freshUuid(rng)).value();
  addCfgEdge(*ir, c[0], c[1], {false, true, EdgeKind::Fallthrough}).value();
  addCfgEdge(*ir, c[0], c[2], {true, true, EdgeKind::Branch}).value();
  addCfgEdge(*ir, c[1], c[2], {false, false, EdgeKind::Branch}).value();
  addCfgEdge(*ir, c[2], p0, {false, true, EdgeKind::Call}).value();
  addCfgEdge(*ir, c[3], c[4], {false, false, EdgeKind::Return}).value();
  addCfgEdge(*ir, c[4], c[5], {false, true, EdgeKind::Syscall}).value();
  addCfgEdge(*ir, c[5], c[6], {false, false, EdgeKind::Sysret}).value();
  addCfgEdge(*ir, c[6], p1, {false, false, EdgeKind::Call}).value();
  addCfgEdge(*ir, c[7], c[0], {true, false, EdgeKind::Branch}).value();
  return ir;
}

/// Two intervals of sizes 5 and 7; the second one opens with a block aligned
/// to 16, so layout --base 0x1000 places them at 0x1000 and 0x1010. One
/// four-byte little-endian absolute site makes the image nontrivial.
std::unique_ptr<Ir> buildLayout() {
  Rng rng(107);
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("tiny", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  Section* s = ir->addSection(m->uuid, ".text",
                              {SectionFlag::Readable, SectionFlag::Executable,
                               SectionFlag::Loaded, SectionFlag::Initialized},
                              freshUuid(rng))
                   .value();
  ByteInterval* ia =
      ir->addInterval(s->uuid, std::nullopt, 5, Bytes{0x10, 0x11, 0x12, 0x13, 0x14},
                      freshUuid(rng))
          .value();
  Uuid ba = ir->addBlock(ia->uuid, 0, BlockKind::Code, 5, freshUuid(rng)).value();
  ByteInterval* ib =
      ir->addInterval(s->uuid, std::nullopt, 7,
                      Bytes{0x20, 0x21, 0x22, 0x23, 0x24, 0x25, 0x26}, freshUuid(rng))
          .value();
  Uuid bb = ir->addBlock(ib->uuid, 0, BlockKind::Code, 7, freshUuid(rng)).value();
  ir->addSymbol(m->uuid, "a", SymbolPayload{ba}, freshUuid(rng)).value();
  Uuid sb = ir->addSymbol(m->uuid, "b", SymbolPayload{bb}, freshUuid(rng)).value()->uuid;
  setTable(*m, "alignment", uuidU64Spec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(bb), AuxValue::ofU64(16)}}))
      .value();
  ir->setSymExpr(ia->uuid, 1, SymAddrConst{sb, 0}).value();
  setTable(*m, "seEncodings", offsetU64Spec(),
           AuxValue::ofPairs(
               {{AuxValue::ofOffset(Offset{ia->uuid, 1}),
                 AuxValue::ofU64(packDirective({4, Endianness::Little, false}))}}))
      .value();
  return ir;
}

/// Valid per validate(), but the alignment value 3 is not a power of two, so
/// layout refuses it.
std::unique_ptr<Ir> buildBadAlign() {
  Rng rng(108);
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("tiny", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  Section* s = ir->addSection(m->uuid, ".text",
                              {SectionFlag::Readable, SectionFlag::Executable,
                               SectionFlag::Loaded, SectionFlag::Initialized},
                              freshUuid(rng))
                   .value();
  ByteInterval* ia =
      ir->addInterval(s->uuid, std::nullopt, 5, Bytes{1, 2, 3, 4, 5}, freshUuid(rng)).value();
  ir->addBlock(ia->uuid, 0, BlockKind::Code, 5, freshUuid(rng)).value();
  ByteInterval* ib =
      ir->addInterval(s->uuid, std::nullopt, 7, Bytes{6, 7, 8, 9, 10, 11, 12}, freshUuid(rng))
          .value();
  Uuid bb = ir->addBlock(ib->uuid, 0, BlockKind::Code, 7, freshUuid(rng)).value();
  setTable(*m, "alignment", uuidU64Spec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(bb), AuxValue::ofU64(3)}}))
      .value();
  return ir;
}

/// Carries one instance of every defect the wire format can transport, so
/// the validate golden exercises most violation codes at once. Saved lax;
/// strict save refuses it.
std::unique_ptr<Ir> buildViolations() {
  Rng rng(109);
  auto ir = Ir::create(1, freshUuid(rng));
  Module* m = ir->addModule("broken", Isa::X64, FileFormat::Elf, freshUuid(rng)).value();
  Section* s = ir->addSection(m->uuid, ".text",
                              {SectionFlag::Readable, SectionFlag::Executable,
                               SectionFlag::Loaded, SectionFlag::Initialized},
                              freshUuid(rng))
                   .value();
  ByteInterval* bi =
      ir->addInterval(s->uuid, 0x5000, 16, randomBytes(rng, 16), freshUuid(rng)).value();
  Uuid code = ir->addBlock(bi->uuid, 0, BlockKind::Code, 8, freshUuid(rng)).value();
  Uuid data = ir->addBlock(bi->uuid, 8, BlockKind::Data, 8, freshUuid(rng)).value();
  Uuid sMain = ir->addSymbol(m->uuid, "main", SymbolPayload{code}, freshUuid(rng)).value()->uuid;
  Uuid fn = freshUuid(rng);
  setTable(*m, "functionBlocks", uuidSetSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(fn),
                               AuxValue::ofList({AuxValue::ofUuid(code)})}}))
      .value();
  setTable(*m, "functionNames", uuidUuidSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(fn), AuxValue::ofUuid(sMain)}}))
      .value();
  // Entry outside the function's block set.
  setTable(*m, "functionEntries", uuidSetSpec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(fn),
                               AuxValue::ofList({AuxValue::ofUuid(freshUuid(rng))})}}))
      .value();
  // Sanctioned table with truncated payload.
  setTable(*m, "alignment", uuidU64Spec(),
           AuxValue::ofPairs({{AuxValue::ofUuid(code), AuxValue::ofU64(8)}}))
      .value();
  m->auxData["alignment"].bytes.pop_back();
  ir->setBlockSize(code, 20).value();                              // beyond the interval
  ir->setIntervalContents(bi->uuid, randomBytes(rng, 19)).value();  // longer than size
  ir->setSymExpr(bi->uuid, 18, SymAddrConst{sMain, 0}).value();     // anchor out of range
  ir->setSymExpr(bi->uuid, 2, SymAddrAddr{sMain, sMain, 0, 0}).value();  // zero scale
  ir->cfg().insertEdge({data, code, {false, true, EdgeKind::Branch}});   // data endpoint
  return ir;
}

struct Fixture {
  std::string name;
  std::unique_ptr<Ir> ir;
  SaveMode mode = SaveMode::Strict;
  int validateExit = 0;
};

}  // namespace

int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "tests/fixtures";

  std::vector<Fixture> fixtures;
  fixtures.push_back({"f00_empty", buildEmpty(), SaveMode::Strict, 0});
  fixtures.push_back({"f01_hello", buildHello(), SaveMode::Strict, 0});
  fixtures.push_back({"f02_hello_variant", buildHelloVariant(), SaveMode::Strict, 0});
  fixtures.push_back({"f03_multimodule", buildMultiModule(), SaveMode::Strict, 0});
  fixtures.push_back({"f04_overlap", buildOverlap(), SaveMode::Strict, 0});
  fixtures.push_back({"f05_unknown_aux", buildUnknownAux(), SaveMode::Strict, 0});
  fixtures.push_back({"f06_cfg_rich", buildCfgRich(), SaveMode::Strict, 0});
  fixtures.push_back({"f07_layout", buildLayout(), SaveMode::Strict, 0});
  fixtures.push_back({"f08_badalign", buildBadAlign(), SaveMode::Strict, 0});
  fixtures.push_back({"f09_violations", buildViolations(), SaveMode::Lax, 1});

  Bytes helloBytes;
  for (const Fixture& f : fixtures) {
    auto bytes = save(*f.ir, f.mode);
    if (!bytes) fail(f.name + ": save failed: " + bytes.error().describe());
    std::string path = dir + "/" + f.name + ".bir";
    writeBytes(path, bytes.value());
    if (!load(bytes.value())) fail(f.name + ": not loadable after save");
    if (f.name == "f01_hello") helloBytes = bytes.value();

    struct Golden {
      const char* suffix;
      int expectedExit;
      int (*run)(const std::string&, std::ostream&, std::ostream&);
    };
    const Golden goldens[] = {
        {".validate.txt", f.validateExit, cli::runValidate},
        {".stats.txt", 0, cli::runStats},
        {".dump.txt", 0, cli::runDump},
        {".dot", 0, cli::runCfgDot},
    };
    for (const Golden& g : goldens) {
      std::ostringstream out, err;
      int code = g.run(path, out, err);
      if (code != g.expectedExit)
        fail(f.name + g.suffix + ": exit " + std::to_string(code) + ", expected " +
             std::to_string(g.expectedExit));
      if (!err.str().empty()) fail(f.name + g.suffix + ": unexpected stderr: " + err.str());
      writeText(dir + "/" + f.name + g.suffix, out.str());
    }
  }

  {
    std::ostringstream out, err;
    int code = cli::runDiff(dir + "/f01_hello.bir", dir + "/f02_hello_variant.bir", out, err);
    if (code != 1 || !err.str().empty() || out.str().empty())
      fail("diff f01 f02: expected a nonempty report with exit 1");
    writeText(dir + "/f01_f02.diff.txt", out.str());
  }
  {
    std::ostringstream err;
    int code = cli::runLayout(dir + "/f07_layout.bir", 0x1000, dir + "/f07_layout.image.bin",
                              dir + "/f07_layout.map.txt", err);
    if (code != 0 || !err.str().empty()) fail("f07 layout: " + err.str());
  }
  {
    std::ostringstream err;
    int code = cli::runLayout(dir + "/f08_badalign.bir", 0x1000, dir + "/unused.image.bin",
                              dir + "/unused.map.txt", err);
    if (code != 1 || err.str().empty()) fail("f08 layout: expected a domain failure");
    writeText(dir + "/f08_badalign.layout_err.txt", err.str());
  }

  Bytes badMagic = helloBytes;
  badMagic[0] = 'X';
  writeBytes(dir + "/broken_magic.bir", badMagic);
  if (load(badMagic)) fail("broken_magic still loads");
  Bytes truncated(helloBytes.begin(),
                  helloBytes.begin() + static_cast<std::ptrdiff_t>(helloBytes.size() * 3 / 5));
  writeBytes(dir + "/broken_trunc.bir", truncated);
  if (load(truncated)) fail("broken_trunc still loads");

  std::cout << "fixtures written to " << dir << "\n";
  return 0;
}
