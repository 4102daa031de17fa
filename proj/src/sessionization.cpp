#include "rfme/sessionization.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "rfme/parallel.hpp"

namespace rfme {
namespace {

void add_event(Session& s, const UserEvent& e) {
  ++s.event_count;
  s.end = std::max(s.end, e.timestamp);
  if (const auto idx = activity_index(e.event_type)) s.activity_flags[*idx] = true;
  if (e.event_type == EventType::PdpView) ++s.pdp_view_count;
  if (e.event_type == EventType::LeadDropped) ++s.lead_drop_count;
}

}  // namespace

std::vector<Session> sessionize(std::span<const UserEvent> events, std::chrono::seconds gap,
                                int workers) {
  if (gap <= std::chrono::seconds::zero()) {
    throw Error(ErrorKind::InvalidArgument, "session gap must be positive");
  }
  // Sorting indices by (user, time, type) makes the grouping independent of
  // the input permutation.
  std::vector<std::size_t> order(events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = events[a];
    const auto& eb = events[b];
    if (ea.user_id != eb.user_id) return ea.user_id < eb.user_id;
    if (ea.timestamp != eb.timestamp) return ea.timestamp < eb.timestamp;
    return ea.event_type < eb.event_type;
  });

  std::vector<std::size_t> user_starts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || events[order[i]].user_id != events[order[i - 1]].user_id) user_starts.push_back(i);
  }
  user_starts.push_back(order.size());
  const std::size_t n_users = user_starts.size() - 1;

  std::vector<std::vector<Session>> per_user(n_users);
  parallel_for(n_users, workers, [&](std::size_t u) {
    auto& out = per_user[u];
    for (std::size_t i = user_starts[u]; i < user_starts[u + 1]; ++i) {
      const auto& e = events[order[i]];
      if (out.empty() || e.timestamp - out.back().end > gap) {
        Session s;
        s.user_id = e.user_id;
        s.start = e.timestamp;
        s.end = e.timestamp;
        out.push_back(std::move(s));
      }
      add_event(out.back(), e);
    }
  });

  std::vector<Session> sessions;
  for (auto& v : per_user) {
    std::move(v.begin(), v.end(), std::back_inserter(sessions));
  }
  return sessions;
}

std::vector<std::span<const Session>> group_by_user(std::span<const Session> sessions) {
  std::vector<std::span<const Session>> groups;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= sessions.size(); ++i) {
    if (i == sessions.size() || sessions[i].user_id != sessions[begin].user_id) {
      groups.push_back(sessions.subspan(begin, i - begin));
      begin = i;
    }
  }
  return groups;
}

void write_sessions_csv(const std::filesystem::path& path, std::span<const Session> sessions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << kSessionCsvHeader << '\n';
  for (const auto& s : sessions) {
    out << s.user_id << ',' << format_rfc3339(s.start) << ',' << format_rfc3339(s.end) << ','
        << s.event_count << ',' << s.pdp_view_count << ',' << s.lead_drop_count;
    for (bool f : s.activity_flags) out << ',' << (f ? 1 : 0);
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

}  // namespace rfme
