#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfme/error.hpp"
#include "rfme/time.hpp"

namespace rfme {

/// Tracked interactions. The first five are the engagement activities, in the
/// order used for Session::activity_flags; OtherVisit covers every remaining
/// page view (search results, home page, ...) that still counts as a visit.
enum class EventType { FilterApplied, PdpView, LeadDropped, CrfOpened, Shortlisted, OtherVisit };

inline constexpr std::size_t kActivityCount = 5;
inline constexpr std::array<EventType, 6> kAllEventTypes = {
    EventType::FilterApplied, EventType::PdpView,     EventType::LeadDropped,
    EventType::CrfOpened,     EventType::Shortlisted, EventType::OtherVisit};

/// Index into a 5-slot activity array, or nullopt for OtherVisit.
constexpr std::optional<std::size_t> activity_index(EventType t) {
  if (t == EventType::OtherVisit) return std::nullopt;
  return static_cast<std::size_t>(t);
}

enum class Platform { Web, App };

std::string_view to_token(EventType t);
std::string_view to_token(Platform p);
std::optional<EventType> parse_event_type(std::string_view token);
std::optional<Platform> parse_platform(std::string_view token);

struct UserEvent {
  std::string user_id;
  Instant timestamp;
  EventType event_type = EventType::OtherVisit;
  Platform platform = Platform::Web;

  friend bool operator==(const UserEvent&, const UserEvent&) = default;
};

/// Events plus the [min, max] timestamp span they cover.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<UserEvent> events);

  const std::vector<UserEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  /// Only meaningful when the log is non-empty.
  Instant span_begin() const { return span_begin_; }
  Instant span_end() const { return span_end_; }

 private:
  std::vector<UserEvent> events_;
  Instant span_begin_{};
  Instant span_end_{};
};

enum class LogFormat { Csv, Jsonl };

std::optional<LogFormat> parse_log_format(std::string_view token);

inline constexpr std::string_view kCsvHeader = "user_id,timestamp,event_type,platform";

/// Parses one data record. Throws Error with MalformedRecord, UnknownEventType
/// or EmptyUserId.
UserEvent parse_event_line(std::string_view line, LogFormat format);

/// Inverse of parse_event_line; timestamps are written in canonical UTC form.
std::string format_event_line(const UserEvent& event, LogFormat format);

/// Rejected records grouped by error kind. Line numbers count data records
/// from 1 (the CSV header is not a record).
struct RejectionReport {
  std::map<ErrorKind, std::vector<std::size_t>> lines;

  std::size_t total() const;
  bool empty() const { return lines.empty(); }
};

struct LoadResult {
  EventLog log;
  RejectionReport rejections;
};

struct LoadOptions {
  int workers = 1;
  /// Records parsed per batch; bounds memory held for raw lines.
  std::size_t batch_size = 1 << 16;
};

/// Streams a CSV (header required) or JSONL event file. Bad records are
/// collected in the report; throws Io when the file cannot be read,
/// MalformedHeader for a CSV without the expected header, and
/// AllRecordsRejected when no record is valid.
LoadResult load_event_log(const std::filesystem::path& path, LogFormat format,
                          const LoadOptions& options = {});

/// Writes events with a header (CSV) or one object per line (JSONL).
void write_event_log(const std::filesystem::path& path, std::span<const UserEvent> events,
                     LogFormat format);

}  // namespace rfme
