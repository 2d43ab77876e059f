#include "netmeta/error.hpp"

namespace netmeta {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::InvalidTimestamp: return "InvalidTimestamp";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::InvalidSeries: return "InvalidSeries";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::EmptySnapshot: return "EmptySnapshot";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::TailTooSmall: return "TailTooSmall";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::NeverSeen: return "NeverSeen";
    case ErrorCode::ManifestError: return "ManifestError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), detail_(what) {}

}  // namespace netmeta
