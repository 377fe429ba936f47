#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace bir {

/// 16-byte opaque identifier attached to every first-class IR entity.
/// Identifiers generated in one process are never reused, even after the
/// entity that carried them is removed.
struct Uuid {
  std::array<std::uint8_t, 16> bytes{};

  static Uuid generate();
  static Uuid fromBytes(std::span<const std::uint8_t, 16> raw);
  /// Builds a Uuid from two 64-bit words (big-endian within the array).
  /// Handy for deterministic test data.
  static Uuid fromWords(std::uint64_t hi, std::uint64_t lo);

  /// Canonical lowercase 8-4-4-4-12 hex rendering.
  std::string str() const;

  bool isNil() const;

  auto operator<=>(const Uuid&) const = default;
};

struct UuidHash {
  std::size_t operator()(const Uuid& id) const {
    // FNV-1a over the 16 bytes.
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : id.bytes) {
      h ^= b;
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace bir
