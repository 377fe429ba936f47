#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "bir/uuid.hpp"

namespace bir {

enum class Errc {
  // Entity lookup / mutation
  UnknownUuid,
  DuplicateUuid,
  ProxyHasNoBytes,
  OutOfRange,
  // CFG
  EndpointNotCodeOrProxy,
  DuplicateEdge,
  SecondFallthrough,
  InvalidEdgeLabel,
  // AuxData codec
  SyntaxError,
  ShapeMismatch,
  Truncated,
  UnsortedCanonicalForm,
  TrailingGarbage,
  SchemaMismatch,
  DecodeFailure,
  EntriesNotSubset,
  DanglingReference,
  ForwardingCycle,
  // Wire
  InvalidIr,
  BadMagic,
  UnsupportedVersion,
  MalformedTypeSpec,
  // Rewrite / layout
  BlockStraddlesSplit,
  ProxyNotMovable,
  AmbiguousSymExprOwnership,
  SymExprCollision,
  AlignmentNotPowerOfTwo,
  UnsatisfiableAlignment,
  OverlappingIntervals,
  EncodedValueOverflow,
  UnresolvedSymbol,
  MissingAssignment,
  InvalidEncodingDirective,
  ScaleZero,
};

const char* errcName(Errc code);

/// Error value carried by failed operations. `position` is a byte offset for
/// parse/decode failures; `uuid` names the offending entity where one exists.
class Error {
 public:
  Error(Errc code, std::string message) : code_(code), message_(std::move(message)) {}

  Error&& at(std::uint64_t position) && {
    position_ = position;
    return std::move(*this);
  }
  Error&& entity(Uuid id) && {
    uuid_ = id;
    return std::move(*this);
  }

  Errc code() const { return code_; }
  const std::string& message() const { return message_; }
  std::optional<std::uint64_t> position() const { return position_; }
  std::optional<Uuid> uuid() const { return uuid_; }

  std::string describe() const {
    std::string out = errcName(code_);
    if (uuid_) out += " [" + uuid_->str() + "]";
    if (position_) out += " at byte " + std::to_string(*position_);
    if (!message_.empty()) out += ": " + message_;
    return out;
  }

 private:
  Errc code_;
  std::string message_;
  std::optional<std::uint64_t> position_;
  std::optional<Uuid> uuid_;
};

/// Value-or-error result. `value()` on a failed result throws, which keeps
/// test failures readable; call sites that expect failure use `error()`.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::move(value)) {}
  Result(Error error) : v_(std::move(error)) {}

  bool ok() const { return v_.index() == 0; }
  explicit operator bool() const { return ok(); }

  T& value() & {
    require();
    return std::get<0>(v_);
  }
  const T& value() const& {
    require();
    return std::get<0>(v_);
  }
  T&& value() && {
    require();
    return std::get<0>(std::move(v_));
  }

  const Error& error() const {
    if (ok()) throw std::logic_error("Result holds a value, not an error");
    return std::get<1>(v_);
  }

 private:
  void require() const {
    if (!ok()) throw std::logic_error("Result holds error: " + std::get<1>(v_).describe());
  }
  std::variant<T, Error> v_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error error) : e_(std::move(error)) {}

  bool ok() const { return !e_.has_value(); }
  explicit operator bool() const { return ok(); }

  void value() const {
    if (e_) throw std::logic_error("Result holds error: " + e_->describe());
  }
  const Error& error() const {
    if (!e_) throw std::logic_error("Result holds a value, not an error");
    return *e_;
  }

 private:
  std::optional<Error> e_;
};

}  // namespace bir
