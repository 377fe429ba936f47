#include "bir/error.hpp"

namespace bir {

const char* errcName(Errc code) {
  switch (code) {
    case Errc::UnknownUuid: return "UnknownUuid";
    case Errc::DuplicateUuid: return "DuplicateUuid";
    case Errc::ProxyHasNoBytes: return "ProxyHasNoBytes";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::EndpointNotCodeOrProxy: return "EndpointNotCodeOrProxy";
    case Errc::DuplicateEdge: return "DuplicateEdge";
    case Errc::SecondFallthrough: return "SecondFallthrough";
    case Errc::InvalidEdgeLabel: return "InvalidEdgeLabel";
    case Errc::SyntaxError: return "SyntaxError";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::Truncated: return "Truncated";
    case Errc::UnsortedCanonicalForm: return "UnsortedCanonicalForm";
    case Errc::TrailingGarbage: return "TrailingGarbage";
    case Errc::SchemaMismatch: return "SchemaMismatch";
    case Errc::DecodeFailure: return "DecodeFailure";
    case Errc::EntriesNotSubset: return "EntriesNotSubset";
    case Errc::DanglingReference: return "DanglingReference";
    case Errc::ForwardingCycle: return "ForwardingCycle";
    case Errc::InvalidIr: return "InvalidIr";
    case Errc::BadMagic: return "BadMagic";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::MalformedTypeSpec: return "MalformedTypeSpec";
    case Errc::BlockStraddlesSplit: return "BlockStraddlesSplit";
    case Errc::ProxyNotMovable: return "ProxyNotMovable";
    case Errc::AmbiguousSymExprOwnership: return "AmbiguousSymExprOwnership";
    case Errc::SymExprCollision: return "SymExprCollision";
    case Errc::AlignmentNotPowerOfTwo: return "AlignmentNotPowerOfTwo";
    case Errc::UnsatisfiableAlignment: return "UnsatisfiableAlignment";
    case Errc::OverlappingIntervals: return "OverlappingIntervals";
    case Errc::EncodedValueOverflow: return "EncodedValueOverflow";
    case Errc::UnresolvedSymbol: return "UnresolvedSymbol";
    case Errc::MissingAssignment: return "MissingAssignment";
    case Errc::InvalidEncodingDirective: return "InvalidEncodingDirective";
    case Errc::ScaleZero: return "ScaleZero";
  }
  return "UnknownError";
}

}  // namespace bir
