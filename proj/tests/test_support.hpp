#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "rfme/event_model.hpp"
#include "rfme/time.hpp"

namespace rfme::testing {

inline Instant at(const std::string& rfc3339) { return *parse_rfc3339(rfc3339); }
inline Date day(const std::string& ymd) { return *parse_date(ymd); }

inline UserEvent ev(const std::string& user, const std::string& ts, EventType type,
                    Platform platform = Platform::App) {
  return UserEvent{user, at(ts), type, platform};
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("rfme_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Random events for `users` users spread over [first, first + days) days.
inline std::vector<UserEvent> random_events(std::mt19937_64& gen, int users, int events, Date first,
                                            int days) {
  std::uniform_int_distribution<int> user(0, users - 1);
  std::uniform_int_distribution<long> second(0, static_cast<long>(days) * 86400 - 1);
  std::uniform_int_distribution<int> type(0, 5);
  std::vector<UserEvent> out;
  for (int i = 0; i < events; ++i) {
    out.push_back(UserEvent{"user" + std::to_string(user(gen)),
                            Instant{first} + std::chrono::seconds{second(gen)},
                            static_cast<EventType>(type(gen)),
                            gen() % 2 ? Platform::App : Platform::Web});
  }
  return out;
}

}  // namespace rfme::testing
