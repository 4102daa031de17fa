#include "rfme/error.hpp"

namespace rfme {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::MalformedHeader: return "MalformedHeader";
    case ErrorKind::UnknownEventType: return "UnknownEventType";
    case ErrorKind::EmptyUserId: return "EmptyUserId";
    case ErrorKind::Io: return "Io";
    case ErrorKind::AllRecordsRejected: return "AllRecordsRejected";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NoActivityInWindow: return "NoActivityInWindow";
    case ErrorKind::EmptyWindow: return "EmptyWindow";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::KExceedsDistinctPoints: return "KExceedsDistinctPoints";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::WrongClusterCount: return "WrongClusterCount";
    case ErrorKind::EmptyCluster: return "EmptyCluster";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::KeyMismatch: return "KeyMismatch";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ModelMissing: return "ModelMissing";
    case ErrorKind::FeatureOrderMismatch: return "FeatureOrderMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace rfme
