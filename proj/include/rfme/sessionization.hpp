#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rfme/event_model.hpp"

namespace rfme {

inline constexpr std::chrono::seconds kDefaultSessionGap = std::chrono::minutes{30};

/// A maximal run of one user's events with no inter-event gap above the
/// inactivity threshold.
struct Session {
  std::string user_id;
  Instant start;
  Instant end;
  std::uint32_t event_count = 0;
  /// Indexed by activity_index(): filter, pdp, lead, crf, shortlist.
  std::array<bool, kActivityCount> activity_flags{};
  std::uint32_t pdp_view_count = 0;
  std::uint32_t lead_drop_count = 0;

  bool has(EventType t) const {
    const auto idx = activity_index(t);
    return idx && activity_flags[*idx];
  }

  friend bool operator==(const Session&, const Session&) = default;
};

/// Groups events per user and splits each user's time-ordered events wherever
/// the gap to the previous event strictly exceeds `gap`. Output is ordered by
/// (user_id, start) regardless of input order or worker count. Throws
/// InvalidArgument when gap <= 0.
std::vector<Session> sessionize(std::span<const UserEvent> events, std::chrono::seconds gap,
                                int workers = 1);

inline std::vector<Session> sessionize(const EventLog& log, std::chrono::seconds gap,
                                       int workers = 1) {
  return sessionize(std::span<const UserEvent>(log.events()), gap, workers);
}

/// Contiguous [begin, end) ranges of a sessionize() result, one per user.
std::vector<std::span<const Session>> group_by_user(std::span<const Session> sessions);

inline constexpr std::string_view kSessionCsvHeader =
    "user_id,start,end,event_count,pdp_views,leads,flag_filter,flag_pdp,flag_lead,flag_crf,"
    "flag_shortlist";

void write_sessions_csv(const std::filesystem::path& path, std::span<const Session> sessions);

}  // namespace rfme
