#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>

#include "bir/error.hpp"
#include "bir/ir.hpp"

namespace bir {

inline constexpr std::array<std::uint8_t, 4> kWireMagic{'B', 'I', 'R', '\0'};
inline constexpr std::uint8_t kWireVersion = 1;

enum class SaveMode {
  Strict,  // refuse to serialize an IR with validation findings
  Lax,     // serialize anything representable
};

/// Serializes the IR to its canonical byte form: magic + format version,
/// then the IR entity tree. Every entity is its UUID followed by its fields
/// in declaration order; integers are little-endian fixed-width; optionals
/// carry a presence byte; enums are single-byte ordinals; sequences are a
/// u64 count plus elements in stored order; sets and maps are sorted by the
/// byte order of their encoded keys. Structurally equal IRs serialize to
/// identical bytes.
Result<Bytes> save(const Ir& ir, SaveMode mode = SaveMode::Strict);

/// Reconstructs an IR from bytes. Tolerant of non-canonical element order
/// (re-saving yields canonical bytes) but rejects structural damage: bad
/// magic or version, truncation, duplicate UUIDs, references to absent
/// entities, unparsable AuxData type specifiers, and trailing bytes.
Result<std::unique_ptr<Ir>> load(std::span<const std::uint8_t> bytes);

/// save(load(bytes)) in lax mode: normalizes any loadable file to canonical
/// form. Idempotent: canonicalize(canonicalize(b)) = canonicalize(b).
Result<Bytes> canonicalize(std::span<const std::uint8_t> bytes);

}  // namespace bir
