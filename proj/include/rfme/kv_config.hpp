#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "rfme/error.hpp"

namespace rfme {

/// Flat `key = value` document. Lines starting with '#' and blank lines are
/// ignored; surrounding whitespace is trimmed. Repeated keys keep the last
/// value so a later line (or a command-line override) wins.
class KeyValueDoc {
 public:
  KeyValueDoc() = default;

  static KeyValueDoc parse(std::string_view text, ErrorKind on_error = ErrorKind::ConfigInvalid);
  static KeyValueDoc load(const std::filesystem::path& path,
                          ErrorKind on_error = ErrorKind::ConfigInvalid);

  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  bool contains(const std::string& key) const { return entries_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

std::string_view trim(std::string_view s);

}  // namespace rfme
