#include "bir/rewrite.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <vector>

#include "bir/auxdata.hpp"

namespace bir {

namespace {

std::int64_t wrapAdd(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}

std::int64_t wrapSub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}

std::int64_t divTrunc(std::int64_t a, std::int64_t b) {
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
    return a;  // two's-complement wrap instead of overflow
  return a / b;
}

// --- Offset-keyed AuxData rebasing ------------------------------------------------

using OffsetTransform = std::function<std::optional<Offset>(const Offset&)>;

/// Rewrites the keys of one mapping<Offset, V> table. Entries whose keys the
/// transform leaves alone stay; transformed keys win over untouched ones on
/// collision. Tables that do not decode are left verbatim: a rewrite of one
/// interval must not fail over unrelated damaged data.
void rebaseAuxMap(AuxDataMap& aux, const OffsetTransform& transform) {
  for (auto& [label, entry] : aux) {
    auto spec = parseTypeSpec(entry.typeSpec);
    if (!spec) continue;
    const TypeSpec& ts = spec.value();
    if (ts.kind != TypeKind::Mapping || ts.args[0].kind != TypeKind::Offset) continue;
    auto decoded = decodeValue(ts, entry.bytes, DecodeMode::Lax);
    if (!decoded) continue;
    bool changed = false;
    std::vector<std::pair<Offset, AuxValue>> kept;
    std::vector<std::pair<Offset, AuxValue>> moved;
    for (const auto& [k, v] : *decoded.value().asPairs()) {
      Offset key = *k.asOffset();
      if (auto next = transform(key)) {
        moved.emplace_back(*next, v);
        changed = true;
      } else {
        kept.emplace_back(key, v);
      }
    }
    if (!changed) continue;
    std::map<Offset, AuxValue> merged;
    for (auto& [k, v] : kept) merged.insert_or_assign(k, std::move(v));
    for (auto& [k, v] : moved) merged.insert_or_assign(k, std::move(v));
    AuxValue::Pairs pairs;
    pairs.reserve(merged.size());
    for (auto& [k, v] : merged) pairs.emplace_back(AuxValue::ofOffset(k), std::move(v));
    if (auto bytes = encodeValue(ts, AuxValue::ofPairs(std::move(pairs))); bytes)
      entry.bytes = std::move(bytes).value();
  }
}

void rebaseOffsetKeys(Ir& ir, const OffsetTransform& transform) {
  rebaseAuxMap(ir.auxData(), transform);
  for (auto& m : ir.modules()) rebaseAuxMap(m->auxData, transform);
}

/// Decodes a mapping<Offset,uint64> table by label. A missing, mistyped, or
/// undecodable entry yields an empty map: such an entry is not the table
/// this reader is after.
std::map<Offset, std::uint64_t> offsetU64Table(const AuxDataMap& aux, const char* label) {
  std::map<Offset, std::uint64_t> out;
  auto it = aux.find(label);
  if (it == aux.end()) return out;
  TypeSpec spec = TypeSpec::mapping(TypeSpec::scalar(TypeKind::Offset),
                                    TypeSpec::scalar(TypeKind::Uint64));
  if (it->second.typeSpec != printTypeSpec(spec)) return out;
  auto v = decodeValue(spec, it->second.bytes, DecodeMode::Strict);
  if (!v) return out;
  for (const auto& [k, value] : *v.value().asPairs()) out[*k.asOffset()] = *value.asU64();
  return out;
}

}  // namespace

// --- Directive packing -------------------------------------------------------------

std::uint64_t packDirective(EncodingDirective d) {
  std::uint64_t packed = d.width & 0xF;
  if (d.endianness == Endianness::Big) packed |= 0x10;
  if (d.pcRelative) packed |= 0x20;
  return packed;
}

Result<EncodingDirective> unpackDirective(std::uint64_t packed) {
  if (packed >> 6)
    return Error(Errc::InvalidEncodingDirective,
                 "bits above 5 set in directive " + std::to_string(packed));
  auto width = static_cast<std::uint8_t>(packed & 0xF);
  if (width != 1 && width != 2 && width != 4 && width != 8)
    return Error(Errc::InvalidEncodingDirective,
                 "width " + std::to_string(width) + " is not 1, 2, 4 or 8");
  EncodingDirective d;
  d.width = width;
  d.endianness = (packed & 0x10) ? Endianness::Big : Endianness::Little;
  d.pcRelative = (packed & 0x20) != 0;
  return d;
}

// --- Structure rewriting -------------------------------------------------------------

Result<std::pair<Uuid, Uuid>> splitInterval(Ir& ir, Uuid interval, std::uint64_t at,
                                            std::optional<Uuid> secondId) {
  auto site = ir.findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  ByteInterval* bi = site->interval;
  if (at == 0 || at >= bi->size)
    return Error(Errc::OutOfRange, "split point " + std::to_string(at) +
                                       " must satisfy 0 < at < " + std::to_string(bi->size))
        .entity(interval);
  for (const auto& b : bi->blocks)
    if (b->offset < at && b->size > at - b->offset)
      return Error(Errc::BlockStraddlesSplit, "block [" + std::to_string(b->offset) + ", " +
                                                  std::to_string(b->offset + b->size) +
                                                  ") straddles the split point")
          .entity(b->uuid);
  Uuid upper = secondId.value_or(Uuid::generate());
  if (ir.findNode(upper))
    return Error(Errc::DuplicateUuid, "an entity with this UUID already exists").entity(upper);

  auto second = std::make_unique<ByteInterval>();
  second->uuid = upper;
  if (bi->address) second->address = *bi->address + at;
  second->size = bi->size - at;
  if (bi->contents.size() > at) {
    second->contents.assign(bi->contents.begin() + static_cast<std::ptrdiff_t>(at),
                            bi->contents.end());
    bi->contents.resize(static_cast<std::size_t>(at));
  }
  bi->size = at;
  for (auto it = bi->blocks.begin(); it != bi->blocks.end();) {
    if ((*it)->offset >= at) {
      (*it)->offset -= at;
      second->blocks.push_back(std::move(*it));
      it = bi->blocks.erase(it);
    } else {
      ++it;
    }
  }
  for (auto it = bi->symExprs.begin(); it != bi->symExprs.end();) {
    if (it->first >= at) {
      second->symExprs.emplace(it->first - at, it->second);
      it = bi->symExprs.erase(it);
    } else {
      ++it;
    }
  }

  ByteInterval* sp = second.get();
  auto& intervals = site->section->intervals;
  auto pos = std::find_if(intervals.begin(), intervals.end(),
                          [&](const auto& p) { return p.get() == bi; });
  intervals.insert(std::next(pos), std::move(second));
  ir.indexInsertInterval(sp, site->section, site->module);
  for (auto& b : sp->blocks) ir.reindexBlock(b.get(), sp, site->module);

  rebaseOffsetKeys(ir, [&](const Offset& k) -> std::optional<Offset> {
    if (k.element == interval && k.displacement >= at)
      return Offset{upper, k.displacement - at};
    return std::nullopt;
  });
  return std::pair<Uuid, Uuid>{interval, upper};
}

Result<void> insertBytes(Ir& ir, Uuid interval, std::uint64_t at, const Bytes& payload) {
  auto site = ir.findIntervalSite(interval);
  if (!site) return Error(Errc::UnknownUuid, "no such interval").entity(interval);
  ByteInterval* bi = site->interval;
  if (at > bi->size)
    return Error(Errc::OutOfRange, "insertion point " + std::to_string(at) +
                                       " beyond interval size " + std::to_string(bi->size))
        .entity(interval);
  if (payload.empty()) return {};
  const std::uint64_t n = payload.size();
  bi->size += n;
  if (bi->contents.size() < at) bi->contents.resize(static_cast<std::size_t>(at), 0);
  bi->contents.insert(bi->contents.begin() + static_cast<std::ptrdiff_t>(at), payload.begin(),
                      payload.end());
  for (auto& b : bi->blocks)
    if (b->offset >= at) b->offset += n;
  std::map<std::uint64_t, SymbolicExpression> shifted;
  for (const auto& [offset, expr] : bi->symExprs)
    shifted.emplace(offset >= at ? offset + n : offset, expr);
  bi->symExprs = std::move(shifted);
  rebaseOffsetKeys(ir, [&](const Offset& k) -> std::optional<Offset> {
    if (k.element == interval && k.displacement >= at)
      return Offset{interval, k.displacement + n};
    return std::nullopt;
  });
  return {};
}

Result<void> moveBlock(Ir& ir, Uuid block, Uuid destInterval, std::uint64_t destOffset) {
  if (ir.findProxy(block))
    return Error(Errc::ProxyNotMovable, "proxy blocks own no bytes to move").entity(block);
  auto bs = ir.findBlockSite(block);
  if (!bs) return Error(Errc::UnknownUuid, "no such block").entity(block);
  auto ds = ir.findIntervalSite(destInterval);
  if (!ds) return Error(Errc::UnknownUuid, "no such interval").entity(destInterval);
  ByteBlock* b = bs->block;
  ByteInterval* src = bs->interval;
  ByteInterval* dst = ds->interval;
  if (destOffset > dst->size || b->size > dst->size - destOffset)
    return Error(Errc::OutOfRange, "destination range [" + std::to_string(destOffset) + ", " +
                                       std::to_string(destOffset) + "+" +
                                       std::to_string(b->size) + ") exceeds interval size " +
                                       std::to_string(dst->size))
        .entity(destInterval);
  const std::uint64_t oldOffset = b->offset;
  const std::uint64_t size = b->size;
  auto inMovedRange = [&](std::uint64_t o) { return o >= oldOffset && o - oldOffset < size; };

  std::vector<std::pair<std::uint64_t, SymbolicExpression>> movedExprs;
  for (const auto& [offset, expr] : src->symExprs)
    if (inMovedRange(offset)) movedExprs.emplace_back(offset, expr);
  for (const auto& [offset, expr] : movedExprs) {
    for (const auto& other : src->blocks)
      if (other.get() != b && offset >= other->offset && offset - other->offset < other->size)
        return Error(Errc::AmbiguousSymExprOwnership,
                     "expression also lies inside block " + other->uuid.str())
            .entity(block)
            .at(offset);
    std::uint64_t target = destOffset + (offset - oldOffset);
    auto hit = dst->symExprs.find(target);
    if (hit != dst->symExprs.end() && !(dst == src && inMovedRange(hit->first)))
      return Error(Errc::SymExprCollision,
                   "destination offset already anchors an expression")
          .entity(destInterval)
          .at(target);
  }

  Bytes bytes = ir.blockBytes(block).value();
  if (size > 0) {
    if (dst->contents.size() < destOffset + size)
      dst->contents.resize(static_cast<std::size_t>(destOffset + size), 0);
    std::copy(bytes.begin(), bytes.end(),
              dst->contents.begin() + static_cast<std::ptrdiff_t>(destOffset));
  }

  auto pos = std::find_if(src->blocks.begin(), src->blocks.end(),
                          [&](const auto& p) { return p.get() == b; });
  std::unique_ptr<ByteBlock> owned = std::move(*pos);
  src->blocks.erase(pos);
  owned->offset = destOffset;
  dst->blocks.push_back(std::move(owned));
  ir.reindexBlock(b, dst, ds->module);

  for (const auto& [offset, expr] : movedExprs) src->symExprs.erase(offset);
  for (const auto& [offset, expr] : movedExprs)
    dst->symExprs[destOffset + (offset - oldOffset)] = expr;

  Uuid srcUuid = src->uuid;
  rebaseOffsetKeys(ir, [&](const Offset& k) -> std::optional<Offset> {
    if (k.element == srcUuid && inMovedRange(k.displacement))
      return Offset{destInterval, destOffset + (k.displacement - oldOffset)};
    return std::nullopt;
  });
  return {};
}

// --- Layout and image -------------------------------------------------------------

namespace {

Result<std::map<Uuid, std::uint64_t>> alignmentTable(const AuxDataMap& aux) {
  std::map<Uuid, std::uint64_t> out;
  TypeSpec spec = TypeSpec::mapping(TypeSpec::scalar(TypeKind::Uuid),
                                    TypeSpec::scalar(TypeKind::Uint64));
  auto table = getTable(aux, "alignment", spec);
  if (!table) return table.error();
  if (table.value())
    for (const auto& [k, v] : *table.value()->asPairs()) out[*k.asUuid()] = *v.asU64();
  return out;
}

}  // namespace

Result<AddressAssignment> layout(const Ir& ir, std::uint64_t base) {
  auto irAlign = alignmentTable(ir.auxData());
  if (!irAlign) return irAlign.error();
  AddressAssignment out;
  std::uint64_t cursor = base;
  for (const auto& m : ir.modules()) {
    auto moduleAlign = alignmentTable(m->auxData);
    if (!moduleAlign) return moduleAlign.error();
    auto alignmentOf = [&](Uuid id) -> std::optional<std::uint64_t> {
      if (auto it = moduleAlign.value().find(id); it != moduleAlign.value().end())
        return it->second;
      if (auto it = irAlign.value().find(id); it != irAlign.value().end()) return it->second;
      return std::nullopt;
    };
    for (const auto& s : m->sections) {
      for (const auto& bi : s->intervals) {
        // The interval base must satisfy base + offset ≡ 0 (mod a) for every
        // aligned block; with power-of-two alignments the strongest
        // constraint decides and the weaker ones must agree with it.
        std::uint64_t strongest = 1;
        std::uint64_t residue = 0;
        std::vector<std::pair<std::uint64_t, std::uint64_t>> constraints;
        for (const auto& b : bi->blocks) {
          auto a = alignmentOf(b->uuid);
          if (!a) continue;
          if (*a == 0 || (*a & (*a - 1)) != 0)
            return Error(Errc::AlignmentNotPowerOfTwo,
                         "alignment " + std::to_string(*a) + " of block " + b->uuid.str())
                .entity(b->uuid);
          std::uint64_t r = (*a - b->offset % *a) % *a;
          constraints.emplace_back(*a, r);
          if (*a > strongest) {
            strongest = *a;
            residue = r;
          }
        }
        for (const auto& [a, r] : constraints)
          if (residue % a != r)
            return Error(Errc::UnsatisfiableAlignment,
                         "blocks of interval " + bi->uuid.str() +
                             " demand contradictory base residues")
                .entity(bi->uuid);
        std::uint64_t rem = cursor % strongest;
        std::uint64_t bump = residue >= rem ? residue - rem : strongest - rem + residue;
        std::uint64_t assigned = cursor + bump;
        out.base.emplace(bi->uuid, assigned);
        cursor = assigned + bi->size;
      }
    }
  }
  return out;
}

Result<std::int64_t> evalSymExpr(const SymbolicExpression& expr,
                                 const std::map<Uuid, std::int64_t>& addrOf) {
  auto resolve = [&](Uuid symbol) -> Result<std::int64_t> {
    auto it = addrOf.find(symbol);
    if (it == addrOf.end())
      return Error(Errc::UnresolvedSymbol, "no address for symbol").entity(symbol);
    return it->second;
  };
  if (const auto* c = std::get_if<SymAddrConst>(&expr)) {
    auto addr = resolve(c->symbol);
    if (!addr) return addr;
    return wrapAdd(addr.value(), c->offset);
  }
  const auto& d = std::get<SymAddrAddr>(expr);
  if (d.scale == 0)
    return Error(Errc::ScaleZero, "symbol-difference expression with zero scale");
  auto minuend = resolve(d.minuend);
  if (!minuend) return minuend;
  auto subtrahend = resolve(d.subtrahend);
  if (!subtrahend) return subtrahend;
  std::int64_t diff = wrapSub(minuend.value(), subtrahend.value());
  return wrapAdd(divTrunc(diff, d.scale), d.offset);
}

std::map<Uuid, std::int64_t> symbolAddresses(const Ir& ir,
                                             const AddressAssignment& assignment) {
  std::map<Uuid, std::int64_t> out;
  for (const auto& m : ir.modules()) {
    for (const auto& sym : m->symbols) {
      if (sym->hasValue()) {
        out[sym->uuid] = std::get<std::int64_t>(sym->payload);
      } else if (sym->hasReferent()) {
        auto site = ir.findBlockSite(std::get<Uuid>(sym->payload));
        if (!site) continue;
        auto it = assignment.base.find(site->interval->uuid);
        if (it == assignment.base.end()) continue;
        out[sym->uuid] = static_cast<std::int64_t>(it->second + site->block->offset);
      }
    }
  }
  return out;
}

Result<Image> buildImage(const Ir& ir, const AddressAssignment& assignment) {
  struct Placed {
    const ByteInterval* interval;
    const Module* module;
    std::uint64_t base;
  };
  std::vector<Placed> placed;
  for (const auto& m : ir.modules())
    for (const auto& s : m->sections) {
      if (!s->flags.contains(SectionFlag::Loaded)) continue;
      for (const auto& bi : s->intervals) {
        auto it = assignment.base.find(bi->uuid);
        if (it == assignment.base.end())
          return Error(Errc::MissingAssignment, "loaded interval has no assigned base")
              .entity(bi->uuid);
        placed.push_back(Placed{bi.get(), m.get(), it->second});
      }
    }

  std::vector<Placed> byBase = placed;
  std::sort(byBase.begin(), byBase.end(), [](const Placed& a, const Placed& b) {
    if (a.base != b.base) return a.base < b.base;
    return a.interval->size < b.interval->size;
  });
  for (std::size_t i = 1; i < byBase.size(); ++i)
    if (byBase[i - 1].base + byBase[i - 1].interval->size > byBase[i].base)
      return Error(Errc::OverlappingIntervals,
                   "interval overlaps " + byBase[i - 1].interval->uuid.str())
          .entity(byBase[i].interval->uuid);

  Image image;
  if (placed.empty()) return image;
  std::uint64_t lo = byBase.front().base;
  std::uint64_t hi = lo;
  for (const Placed& p : byBase) hi = std::max(hi, p.base + p.interval->size);
  image.base = lo;
  image.bytes.assign(static_cast<std::size_t>(hi - lo), 0);
  for (const Placed& p : placed) {
    std::size_t n = static_cast<std::size_t>(
        std::min<std::uint64_t>(p.interval->contents.size(), p.interval->size));
    std::copy_n(p.interval->contents.begin(), n,
                image.bytes.begin() + static_cast<std::ptrdiff_t>(p.base - lo));
  }

  std::map<Uuid, std::int64_t> addrOf = symbolAddresses(ir, assignment);
  std::map<Offset, std::uint64_t> irDirectives = offsetU64Table(ir.auxData(), "seEncodings");
  const Module* cachedModule = nullptr;
  std::map<Offset, std::uint64_t> moduleDirectives;
  for (const Placed& p : placed) {
    if (p.module != cachedModule) {
      cachedModule = p.module;
      moduleDirectives = offsetU64Table(p.module->auxData, "seEncodings");
    }
    for (const auto& [offset, expr] : p.interval->symExprs) {
      Offset key{p.interval->uuid, offset};
      const std::uint64_t* packed = nullptr;
      if (auto it = moduleDirectives.find(key); it != moduleDirectives.end())
        packed = &it->second;
      else if (auto it2 = irDirectives.find(key); it2 != irDirectives.end())
        packed = &it2->second;
      if (!packed) continue;
      auto directive = unpackDirective(*packed);
      if (!directive)
        return Error(Errc::InvalidEncodingDirective,
                     directive.error().message() + " (interval " + p.interval->uuid.str() +
                         "+" + std::to_string(offset) + ")")
            .entity(p.interval->uuid)
            .at(offset);
      auto value = evalSymExpr(expr, addrOf);
      if (!value) return value.error();
      std::int64_t v = value.value();
      std::uint64_t site = p.base + offset;
      if (directive.value().pcRelative) v = wrapSub(v, static_cast<std::int64_t>(site));
      const int width = directive.value().width;
      if (width < 8) {
        const int bits = 8 * width;
        std::int64_t fitLo = -(std::int64_t{1} << (bits - 1));
        std::int64_t fitHi = (std::int64_t{1} << bits) - 1;
        if (v < fitLo || v > fitHi)
          return Error(Errc::EncodedValueOverflow,
                       "value " + std::to_string(v) + " does not fit " +
                           std::to_string(width) + " byte(s)")
              .entity(p.interval->uuid)
              .at(offset);
      }
      if (offset > p.interval->size ||
          static_cast<std::uint64_t>(width) > p.interval->size - offset)
        return Error(Errc::OutOfRange, "encoded site extends past its interval")
            .entity(p.interval->uuid)
            .at(offset);
      std::uint64_t u = static_cast<std::uint64_t>(v);
      std::size_t imageOffset = static_cast<std::size_t>(site - image.base);
      for (int i = 0; i < width; ++i) {
        int shift = directive.value().endianness == Endianness::Little
                        ? 8 * i
                        : 8 * (width - 1 - i);
        image.bytes[imageOffset + static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>(u >> shift);
      }
    }
  }
  return image;
}

}  // namespace bir
