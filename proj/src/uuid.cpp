#include "bir/uuid.hpp"

#include <atomic>
#include <random>

namespace bir {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t processNonce() {
  static const std::uint64_t nonce = [] {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }();
  return nonce;
}

}  // namespace

Uuid Uuid::generate() {
  // High half scrambles a per-process nonce, low half is a monotone counter:
  // no value is ever handed out twice within one process.
  static std::atomic<std::uint64_t> counter{1};
  const std::uint64_t n = counter.fetch_add(1, std::memory_order_relaxed);
  return fromWords(splitmix64(processNonce() ^ (n * 0x9e3779b97f4a7c15ull)), n);
}

Uuid Uuid::fromBytes(std::span<const std::uint8_t, 16> raw) {
  Uuid id;
  std::copy(raw.begin(), raw.end(), id.bytes.begin());
  return id;
}

Uuid Uuid::fromWords(std::uint64_t hi, std::uint64_t lo) {
  Uuid id;
  for (int i = 0; i < 8; ++i) {
    id.bytes[static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    id.bytes[static_cast<std::size_t>(8 + i)] =
        static_cast<std::uint8_t>(lo >> (56 - 8 * i));
  }
  return id;
}

std::string Uuid::str() const {
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(36);
  for (std::size_t i = 0; i < 16; ++i) {
    if (i == 4 || i == 6 || i == 8 || i == 10) out.push_back('-');
    out.push_back(hex[bytes[i] >> 4]);
    out.push_back(hex[bytes[i] & 0xf]);
  }
  return out;
}

bool Uuid::isNil() const {
  for (std::uint8_t b : bytes)
    if (b != 0) return false;
  return true;
}

}  // namespace bir
