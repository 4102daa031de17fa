#include <doctest.h>

#include <random>

#include "rfme/event_model.hpp"
#include "test_support.hpp"

using namespace rfme;
using rfme::testing::TempDir;
using rfme::testing::at;
using rfme::testing::write_file;

namespace {

ErrorKind parse_error(std::string_view line, LogFormat format = LogFormat::Csv) {
  try {
    parse_event_line(line, format);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << line);
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("parse_event_line maps CSV fields") {
  const auto e = parse_event_line("u1,2023-01-05T10:00:00Z,pdp_view,app", LogFormat::Csv);
  CHECK(e == UserEvent{"u1", at("2023-01-05T10:00:00Z"), EventType::PdpView, Platform::App});
}

TEST_CASE("parse_event_line rejects bad records") {
  CHECK(parse_error("u1,2023-01-05T10:00:00Z,teleport,app") == ErrorKind::UnknownEventType);
  CHECK(parse_error(",2023-01-05T10:00:00Z,pdp_view,web") == ErrorKind::EmptyUserId);
  CHECK(parse_error("u1,2023-01-05T10:00:00Z,pdp_view") == ErrorKind::MalformedRecord);
  CHECK(parse_error("u1,2023-01-05T10:00:00Z,pdp_view,app,extra") == ErrorKind::MalformedRecord);
  CHECK(parse_error("u1,yesterday,pdp_view,app") == ErrorKind::MalformedRecord);
  CHECK(parse_error("u1,2023-02-30T10:00:00Z,pdp_view,app") == ErrorKind::MalformedRecord);
  CHECK(parse_error("u1,2023-01-05T10:00:00,pdp_view,app") == ErrorKind::MalformedRecord);
  CHECK(parse_error("u1,2023-01-05T10:00:00Z,pdp_view,tablet") == ErrorKind::MalformedRecord);
}

TEST_CASE("timestamps are normalized to UTC") {
  const auto e = parse_event_line("u1,2023-01-05T05:30:00+05:30,other_visit,web", LogFormat::Csv);
  CHECK(e.timestamp == at("2023-01-05T00:00:00Z"));
  const auto frac = parse_event_line("u1,2023-01-05T10:00:00.987Z,other_visit,web", LogFormat::Csv);
  CHECK(frac.timestamp == at("2023-01-05T10:00:00Z"));
  const auto crlf = parse_event_line("u1,2023-01-04T23:00:00-02:00,lead_dropped,app\r", LogFormat::Csv);
  CHECK(crlf.timestamp == at("2023-01-05T01:00:00Z"));
}

TEST_CASE("parse_event_line reads JSONL objects") {
  const auto e = parse_event_line(
      R"({"user_id":"u9","timestamp":"2023-01-05T10:00:00Z","event_type":"crf_opened","platform":"web"})",
      LogFormat::Jsonl);
  CHECK(e == UserEvent{"u9", at("2023-01-05T10:00:00Z"), EventType::CrfOpened, Platform::Web});
  CHECK(parse_error(R"({"user_id":"u9"})", LogFormat::Jsonl) == ErrorKind::MalformedRecord);
  CHECK(parse_error("not json", LogFormat::Jsonl) == ErrorKind::MalformedRecord);
  CHECK(parse_error(R"({"user_id":"","timestamp":"2023-01-05T10:00:00Z","event_type":"pdp_view","platform":"web"})",
                    LogFormat::Jsonl) == ErrorKind::EmptyUserId);
}

TEST_CASE("format then parse is the identity for every type, platform and format") {
  std::mt19937_64 gen(11);
  for (auto format : {LogFormat::Csv, LogFormat::Jsonl}) {
    for (auto type : kAllEventTypes) {
      for (auto platform : {Platform::Web, Platform::App}) {
        const Instant t = Instant{std::chrono::seconds{1600000000 + static_cast<long>(gen() % 100000000)}};
        const UserEvent e{"user-" + std::to_string(gen() % 1000), t, type, platform};
        CHECK(parse_event_line(format_event_line(e, format), format) == e);
      }
    }
  }
}

TEST_CASE("load_event_log") {
  TempDir dir("load");
  const std::string header = std::string(kCsvHeader) + "\n";

  SUBCASE("all valid") {
    write_file(dir / "ok.csv", header +
                                   "u1,2023-01-05T10:00:00Z,pdp_view,app\n"
                                   "u2,2023-01-06T10:00:00Z,lead_dropped,web\n"
                                   "u1,2023-01-04T10:00:00Z,other_visit,app\n");
    const auto r = load_event_log(dir / "ok.csv", LogFormat::Csv);
    CHECK(r.log.size() == 3);
    CHECK(r.rejections.empty());
    CHECK(r.log.span_begin() == at("2023-01-04T10:00:00Z"));
    CHECK(r.log.span_end() == at("2023-01-06T10:00:00Z"));
  }
  SUBCASE("one malformed line is reported by record number") {
    write_file(dir / "mixed.csv", header +
                                      "u1,2023-01-05T10:00:00Z,pdp_view,app\n"
                                      "u2,2023-01-06T10:00:00Z,lead_dropped,web\n"
                                      "u3,not-a-time,pdp_view,app\n");
    const auto r = load_event_log(dir / "mixed.csv", LogFormat::Csv);
    CHECK(r.log.size() == 2);
    REQUIRE(r.rejections.lines.size() == 1);
    CHECK(r.rejections.lines.at(ErrorKind::MalformedRecord) == std::vector<std::size_t>{3});
  }
  SUBCASE("empty file") {
    write_file(dir / "empty.csv", "");
    CHECK_THROWS_AS(load_event_log(dir / "empty.csv", LogFormat::Csv), Error);
    try {
      load_event_log(dir / "empty.csv", LogFormat::Csv);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AllRecordsRejected);
    }
  }
  SUBCASE("every record bad") {
    write_file(dir / "bad.jsonl", "{}\n[1,2]\n");
    try {
      load_event_log(dir / "bad.jsonl", LogFormat::Jsonl);
      FAIL("expected AllRecordsRejected");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::AllRecordsRejected);
    }
  }
  SUBCASE("missing file and wrong header") {
    try {
      load_event_log(dir / "nope.csv", LogFormat::Csv);
      FAIL("expected Io");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Io);
    }
    write_file(dir / "hdr.csv", "uid,ts,type,platform\nu1,2023-01-05T10:00:00Z,pdp_view,app\n");
    try {
      load_event_log(dir / "hdr.csv", LogFormat::Csv);
      FAIL("expected MalformedHeader");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::MalformedHeader);
    }
  }
}

TEST_CASE("valid + rejected always equals the record count, for any batching and workers") {
  TempDir dir("load_prop");
  std::mt19937_64 gen(5);
  const std::vector<std::string> bad = {"u1,2023-01-05T10:00:00Z,teleport,app",
                                        ",2023-01-05T10:00:00Z,pdp_view,web", "u1,2023", "u,,,"};
  for (int trial = 0; trial < 20; ++trial) {
    for (auto format : {LogFormat::Csv, LogFormat::Jsonl}) {
      std::string text = format == LogFormat::Csv ? std::string(kCsvHeader) + "\n" : "";
      std::size_t valid = 0;
      const int lines = 1 + static_cast<int>(gen() % 200);
      std::vector<UserEvent> expected;
      for (int i = 0; i < lines; ++i) {
        if (gen() % 4 == 0) {
          text += bad[gen() % bad.size()] + "\n";
        } else {
          const UserEvent e{"u" + std::to_string(gen() % 50),
                            Instant{std::chrono::seconds{1672500000 + static_cast<long>(gen() % 5000000)}},
                            kAllEventTypes[gen() % 6], gen() % 2 ? Platform::Web : Platform::App};
          text += format_event_line(e, format) + "\n";
          expected.push_back(e);
          ++valid;
        }
      }
      const auto path = dir / ("t" + std::to_string(trial) + (format == LogFormat::Csv ? ".csv" : ".jsonl"));
      write_file(path, text);
      if (valid == 0) continue;
      const auto serial = load_event_log(path, format, LoadOptions{1, 7});
      const auto parallel = load_event_log(path, format, LoadOptions{4, 64});
      CHECK(serial.log.size() == valid);
      CHECK(serial.rejections.total() == static_cast<std::size_t>(lines) - valid);
      CHECK(serial.log.events() == expected);
      CHECK(parallel.log.events() == serial.log.events());
      CHECK(parallel.rejections.lines == serial.rejections.lines);
    }
  }
}
