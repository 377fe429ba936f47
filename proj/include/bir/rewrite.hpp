#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>

#include "bir/error.hpp"
#include "bir/ir.hpp"

namespace bir {

/// Concrete base address per interval. An assignment is consistent when the
/// ranges [base, base + size) of distinct intervals do not intersect;
/// layout() always produces consistent assignments and buildImage() rejects
/// inconsistent ones.
struct AddressAssignment {
  std::map<Uuid, std::uint64_t> base;
};

enum class Endianness : std::uint8_t { Little = 0, Big = 1 };

/// How to materialize one symbolic expression into bytes. Directives live in
/// the repository-defined "seEncodings" table (mapping<Offset,uint64>,
/// keyed by interval + expression offset) with the integer packing
/// bits 0-3 = width, bit 4 = endianness, bit 5 = pc-relative.
struct EncodingDirective {
  std::uint8_t width = 8;  // bytes, one of 1/2/4/8
  Endianness endianness = Endianness::Little;
  bool pcRelative = false;

  bool operator==(const EncodingDirective&) const = default;
};

std::uint64_t packDirective(EncodingDirective d);
Result<EncodingDirective> unpackDirective(std::uint64_t packed);

/// A flat memory image: `bytes` covers [base, base + bytes.size()), gaps
/// between placed intervals zero-filled.
struct Image {
  std::uint64_t base = 0;
  Bytes bytes;
};

/// Splits an interval at `at` (0 < at < size) into [0, at) and [at, size).
/// No block may straddle the split point. The first interval keeps the
/// original UUID and address; the second gets `secondId` (fresh by default),
/// address original+at when the original was placed, and is inserted
/// directly after the first. Blocks, expressions, and Offset-keyed AuxData
/// entries on the upper half are rebased onto the second interval.
Result<std::pair<Uuid, Uuid>> splitInterval(Ir& ir, Uuid interval, std::uint64_t at,
                                            std::optional<Uuid> secondId = std::nullopt);

/// Splices `payload` into the interval at `at` (at most size). Blocks and
/// expressions at offsets >= at shift by the payload length, including a
/// block starting exactly at `at`: inserted bytes land before it. Offset
/// keys of AuxData tables shift the same way.
Result<void> insertBytes(Ir& ir, Uuid interval, std::uint64_t at, const Bytes& payload);

/// Moves a block (bytes, expressions in its range, Offset-keyed AuxData
/// entries in its range) to `destOffset` in `destInterval`. The block keeps
/// its UUID, so symbols, CFG edges and tables keep referring to it. The
/// destination range may overlap existing blocks. Refused before any
/// mutation when an expression in the moved range is also covered by
/// another source block (AmbiguousSymExprOwnership) or would land on an
/// existing destination expression (SymExprCollision).
Result<void> moveBlock(Ir& ir, Uuid block, Uuid destInterval, std::uint64_t destOffset);

/// Assigns a fresh base address to every interval, walking modules,
/// sections and intervals in stored order from `base` and ignoring stored
/// addresses. Each interval is raised to the smallest address where every
/// block with an `alignment` entry (owning module's table first, IR-level
/// table as fallback) lands on a multiple of its alignment. Alignments must
/// be powers of two, and the blocks of one interval must not demand
/// contradictory bases.
Result<AddressAssignment> layout(const Ir& ir, std::uint64_t base);

/// SymAddrConst: addr(symbol) + offset. SymAddrAddr:
/// (addr(minuend) - addr(subtrahend)) / scale + offset with truncating
/// signed division toward zero; scale must be nonzero. Addresses wrap in
/// two's complement.
Result<std::int64_t> evalSymExpr(const SymbolicExpression& expr,
                                 const std::map<Uuid, std::int64_t>& addrOf);

/// Symbol addresses under an assignment: Value payloads verbatim, referent
/// payloads as the referent block's assigned address. Symbols that resolve
/// to nothing placeable (undefined, proxy referents, unassigned intervals)
/// are absent from the result.
std::map<Uuid, std::int64_t> symbolAddresses(const Ir& ir, const AddressAssignment& assignment);

/// Places every interval of every Loaded section at its assigned base and
/// encodes each symbolic expression that carries an "seEncodings" directive:
/// value = evalSymExpr, minus the site address when pc-relative, written at
/// the site in the directive's width and endianness. The value must fit the
/// width as two's-complement signed or unsigned. Expressions without a
/// directive leave their raw bytes untouched.
Result<Image> buildImage(const Ir& ir, const AddressAssignment& assignment);

}  // namespace bir
