#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bir/ir.hpp"
#include "bir/uuid.hpp"

namespace bir {

enum class ViolationCode : std::uint8_t {
  DuplicateUuid,
  DanglingReference,
  BlockOutOfRange,
  ContentsExceedSize,
  SymExprOutOfRange,
  CfgEndpointNotCodeOrProxy,
  AuxDataDecodeFailure,
  FunctionTableInconsistent,
  ScaleZero,
};

const char* violationCodeName(ViolationCode code);

/// One defect found in an IR. `uuid` names the closest enclosing entity (or
/// the dangling target itself); `offset` refines the location for byte-level
/// findings such as a misplaced symbolic expression.
struct Violation {
  ViolationCode code;
  Uuid uuid;
  std::optional<std::uint64_t> offset;
  std::string message;

  auto operator<=>(const Violation&) const = default;

  std::string describe() const;
};

/// Total structural check. Never throws and never mutates; returns the
/// violations sorted by (code, uuid, offset, message), so two runs over an
/// unchanged IR produce identical output. An IR is well-formed iff the
/// result is empty.
///
/// Checks: UUID uniqueness across every entity (by exhaustive walk, not the
/// index), symbol referent resolution to blocks, symbolic-expression symbol
/// resolution and nonzero scales, block and contents ranges, expression
/// anchor ranges, CFG edge endpoint typing, sanctioned AuxData schema and
/// decodability, and function-table consistency.
std::vector<Violation> validate(const Ir& ir);

}  // namespace bir
