#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netmeta {

enum class ErrorCode {
  SelfLoop,
  InvalidTimestamp,
  UnknownNode,
  InvalidSeries,
  ParseError,
  OrderViolation,
  CapExceeded,
  EmptySnapshot,
  InsufficientPoints,
  TailTooSmall,
  EmptyGraph,
  NeverSeen,
  ManifestError,
  InvalidConfig,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace netmeta
