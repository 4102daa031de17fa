#include "rfme/features.hpp"

#include <algorithm>
#include <fstream>

#include "rfme/parallel.hpp"

namespace rfme {

std::int64_t compute_recency(std::span<const Session> sessions, Date reference_date) {
  if (sessions.empty()) throw Error(ErrorKind::NoActivityInWindow, "user has no sessions in window");
  Instant latest = sessions.front().start;
  for (const auto& s : sessions) latest = std::max(latest, s.start);
  return days_between(utc_date(latest), reference_date);
}

std::int64_t compute_frequency(std::span<const Session> sessions) {
  return static_cast<std::int64_t>(sessions.size());
}

std::int64_t compute_monetary(std::int64_t pdp_total, std::int64_t lead_total,
                              const MonetaryWeights& weights) {
  return pdp_total * weights.pdp_weight + lead_total * weights.lead_weight;
}

std::int64_t compute_engagement(std::span<const Session> sessions) {
  std::int64_t total = 0;
  for (const auto& s : sessions) {
    total += std::count(s.activity_flags.begin(), s.activity_flags.end(), true);
  }
  return total;
}

std::vector<RfmeVector> build_feature_matrix(std::span<const UserEvent> events,
                                             const WindowSpec& window,
                                             const FeatureOptions& options) {
  if (window.window_days < 1) throw Error(ErrorKind::InvalidArgument, "window_days must be >= 1");
  if (options.weights.pdp_weight < 1 || options.weights.lead_weight < 1) {
    throw Error(ErrorKind::InvalidArgument, "monetary weights must be positive");
  }

  std::vector<UserEvent> in_window;
  std::copy_if(events.begin(), events.end(), std::back_inserter(in_window),
               [&](const UserEvent& e) { return window.contains(e.timestamp); });

  const auto sessions = sessionize(std::span<const UserEvent>(in_window), options.gap, options.workers);
  const auto groups = group_by_user(sessions);
  if (groups.empty()) {
    throw Error(ErrorKind::EmptyWindow, "no user is active between " +
                                            format_date(window.first_day()) + " and " +
                                            format_date(window.reference_date));
  }

  std::vector<RfmeVector> vectors(groups.size());
  parallel_for(groups.size(), options.workers, [&](std::size_t i) {
    const auto user_sessions = groups[i];
    std::int64_t pdp_total = 0;
    std::int64_t lead_total = 0;
    for (const auto& s : user_sessions) {
      pdp_total += s.pdp_view_count;
      lead_total += s.lead_drop_count;
    }
    auto& v = vectors[i];
    v.user_id = user_sessions.front().user_id;
    v.recency = compute_recency(user_sessions, window.reference_date);
    v.frequency = compute_frequency(user_sessions);
    v.monetary = compute_monetary(pdp_total, lead_total, options.weights);
    v.engagement = compute_engagement(user_sessions);
  });
  return vectors;
}

void write_features_csv(const std::filesystem::path& path, std::span<const RfmeVector> vectors) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << kFeatureCsvHeader << '\n';
  for (const auto& v : vectors) {
    out << v.user_id << ',' << v.recency << ',' << v.frequency << ',' << v.monetary << ','
        << v.engagement << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

}  // namespace rfme
