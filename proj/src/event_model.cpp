#include "rfme/event_model.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "rfme/kv_config.hpp"
#include "rfme/parallel.hpp"

namespace rfme {
namespace {

constexpr std::array<std::string_view, 6> kEventTokens = {
    "filter_applied", "pdp_view", "lead_dropped", "crf_opened", "shortlisted", "other_visit"};

UserEvent make_event(std::string_view user_id, std::string_view timestamp,
                     std::string_view event_type, std::string_view platform) {
  if (user_id.empty()) throw Error(ErrorKind::EmptyUserId, "user_id is empty");
  const auto ts = parse_rfc3339(timestamp);
  if (!ts) {
    throw Error(ErrorKind::MalformedRecord, "unparseable timestamp '" + std::string(timestamp) + "'");
  }
  const auto type = parse_event_type(event_type);
  if (!type) {
    throw Error(ErrorKind::UnknownEventType, "unknown event type '" + std::string(event_type) + "'");
  }
  const auto plat = parse_platform(platform);
  if (!plat) {
    throw Error(ErrorKind::MalformedRecord, "unknown platform '" + std::string(platform) + "'");
  }
  return UserEvent{std::string(user_id), *ts, *type, *plat};
}

UserEvent parse_csv(std::string_view line) {
  std::array<std::string_view, 4> fields;
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    if (n == fields.size()) {
      throw Error(ErrorKind::MalformedRecord, "expected 4 fields, got more");
    }
    fields[n++] = trim(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (n != fields.size()) {
    throw Error(ErrorKind::MalformedRecord, "expected 4 fields, got " + std::to_string(n));
  }
  return make_event(fields[0], fields[1], fields[2], fields[3]);
}

UserEvent parse_jsonl(std::string_view line) {
  const auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (!doc.is_object()) throw Error(ErrorKind::MalformedRecord, "not a JSON object");
  auto field = [&](const char* name) -> std::string {
    const auto it = doc.find(name);
    if (it == doc.end() || !it->is_string()) {
      throw Error(ErrorKind::MalformedRecord, std::string("missing string field '") + name + "'");
    }
    return it->get<std::string>();
  };
  const auto user_id = field("user_id");
  const auto timestamp = field("timestamp");
  const auto event_type = field("event_type");
  const auto platform = field("platform");
  return make_event(user_id, timestamp, event_type, platform);
}

struct ParsedLine {
  std::optional<UserEvent> event;
  ErrorKind error = ErrorKind::MalformedRecord;
};

}  // namespace

std::string_view to_token(EventType t) { return kEventTokens[static_cast<std::size_t>(t)]; }

std::string_view to_token(Platform p) { return p == Platform::Web ? "web" : "app"; }

std::optional<EventType> parse_event_type(std::string_view token) {
  for (std::size_t i = 0; i < kEventTokens.size(); ++i) {
    if (kEventTokens[i] == token) return static_cast<EventType>(i);
  }
  return std::nullopt;
}

std::optional<Platform> parse_platform(std::string_view token) {
  if (token == "web") return Platform::Web;
  if (token == "app") return Platform::App;
  return std::nullopt;
}

std::optional<LogFormat> parse_log_format(std::string_view token) {
  if (token == "csv") return LogFormat::Csv;
  if (token == "jsonl") return LogFormat::Jsonl;
  return std::nullopt;
}

EventLog::EventLog(std::vector<UserEvent> events) : events_(std::move(events)) {
  if (events_.empty()) return;
  const auto [lo, hi] = std::minmax_element(
      events_.begin(), events_.end(),
      [](const UserEvent& a, const UserEvent& b) { return a.timestamp < b.timestamp; });
  span_begin_ = lo->timestamp;
  span_end_ = hi->timestamp;
}

UserEvent parse_event_line(std::string_view line, LogFormat format) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return format == LogFormat::Csv ? parse_csv(line) : parse_jsonl(line);
}

std::string format_event_line(const UserEvent& event, LogFormat format) {
  if (format == LogFormat::Csv) {
    std::string out = event.user_id;
    out += ',';
    out += format_rfc3339(event.timestamp);
    out += ',';
    out += to_token(event.event_type);
    out += ',';
    out += to_token(event.platform);
    return out;
  }
  nlohmann::ordered_json doc;
  doc["user_id"] = event.user_id;
  doc["timestamp"] = format_rfc3339(event.timestamp);
  doc["event_type"] = std::string(to_token(event.event_type));
  doc["platform"] = std::string(to_token(event.platform));
  return doc.dump();
}

std::size_t RejectionReport::total() const {
  std::size_t n = 0;
  for (const auto& [kind, lines] : lines) n += lines.size();
  return n;
}

LoadResult load_event_log(const std::filesystem::path& path, LogFormat format,
                          const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());

  std::string line;
  if (format == LogFormat::Csv) {
    bool have_header = false;
    while (std::getline(in, line)) {
      if (!trim(line).empty()) {
        have_header = true;
        break;
      }
    }
    if (!have_header) throw Error(ErrorKind::AllRecordsRejected, path.string() + " has no records");
    std::string_view header = trim(line);
    if (header.substr(0, 3) == "\xEF\xBB\xBF") header.remove_prefix(3);
    if (header != kCsvHeader) {
      throw Error(ErrorKind::MalformedHeader,
                  "expected header '" + std::string(kCsvHeader) + "', got '" + std::string(header) + "'");
    }
  }

  LoadResult result;
  std::vector<UserEvent> events;
  std::vector<std::string> batch;
  std::vector<ParsedLine> parsed;
  std::size_t record_no = 0;
  const std::size_t batch_size = std::max<std::size_t>(options.batch_size, 1);
  constexpr std::size_t kChunk = 1024;

  auto flush = [&] {
    parsed.assign(batch.size(), ParsedLine{});
    parallel_for(chunk_count(batch.size(), kChunk), options.workers, [&](std::size_t c) {
      const std::size_t end = std::min(batch.size(), (c + 1) * kChunk);
      for (std::size_t i = c * kChunk; i < end; ++i) {
        try {
          parsed[i].event = parse_event_line(batch[i], format);
        } catch (const Error& e) {
          parsed[i].error = e.kind();
        }
      }
    });
    const std::size_t first_record = record_no - batch.size() + 1;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (parsed[i].event) {
        events.push_back(std::move(*parsed[i].event));
      } else {
        result.rejections.lines[parsed[i].error].push_back(first_record + i);
      }
    }
    batch.clear();
  };

  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++record_no;
    batch.push_back(std::move(line));
    if (batch.size() == batch_size) flush();
  }
  if (in.bad()) throw Error(ErrorKind::Io, "read failure on " + path.string());
  flush();

  if (events.empty()) {
    throw Error(ErrorKind::AllRecordsRejected,
                path.string() + ": 0 of " + std::to_string(record_no) + " records valid");
  }
  result.log = EventLog(std::move(events));
  return result;
}

void write_event_log(const std::filesystem::path& path, std::span<const UserEvent> events,
                     LogFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  if (format == LogFormat::Csv) out << kCsvHeader << '\n';
  for (const auto& e : events) out << format_event_line(e, format) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

}  // namespace rfme
