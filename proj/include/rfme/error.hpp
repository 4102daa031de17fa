#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rfme {

enum class ErrorKind {
  MalformedRecord,
  MalformedHeader,
  UnknownEventType,
  EmptyUserId,
  Io,
  AllRecordsRejected,
  InvalidArgument,
  NoActivityInWindow,
  EmptyWindow,
  EmptyInput,
  KExceedsDistinctPoints,
  IndexOutOfRange,
  WrongClusterCount,
  EmptyCluster,
  InvalidSpec,
  KeyMismatch,
  ConfigInvalid,
  ModelMissing,
  FeatureOrderMismatch,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above.
/// what() is "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace rfme
