#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rfme/event_model.hpp"
#include "rfme/sessionization.hpp"
#include "rfme/time.hpp"

namespace rfme {

inline constexpr int kDefaultWindowDays = 45;

/// Trailing window of whole UTC days ending at (and including) reference_date.
struct WindowSpec {
  Date reference_date;
  int window_days = kDefaultWindowDays;

  Date first_day() const { return reference_date - std::chrono::days{window_days - 1}; }
  bool contains(Date d) const { return d >= first_day() && d <= reference_date; }
  bool contains(Instant t) const { return contains(utc_date(t)); }
};

struct MonetaryWeights {
  std::int64_t pdp_weight = 1;
  std::int64_t lead_weight = 7;
};

struct RfmeVector {
  std::string user_id;
  std::int64_t recency = 0;
  std::int64_t frequency = 0;
  std::int64_t monetary = 0;
  std::int64_t engagement = 0;

  friend bool operator==(const RfmeVector&, const RfmeVector&) = default;
};

/// Days from the UTC date of the latest session start to reference_date.
/// Throws NoActivityInWindow for an empty span.
std::int64_t compute_recency(std::span<const Session> sessions, Date reference_date);

std::int64_t compute_frequency(std::span<const Session> sessions);

std::int64_t compute_monetary(std::int64_t pdp_total, std::int64_t lead_total,
                              const MonetaryWeights& weights = {});

/// Number of (session, activity type) pairs: each session adds one per
/// distinct activity it contains, so at most five.
std::int64_t compute_engagement(std::span<const Session> sessions);

struct FeatureOptions {
  std::chrono::seconds gap = kDefaultSessionGap;
  MonetaryWeights weights;
  int workers = 1;
};

/// One vector per user with at least one in-window session, sorted by
/// user_id. Events outside the window are discarded before sessionizing, so
/// they cannot influence any feature. Throws EmptyWindow when no user is
/// active in the window and InvalidArgument for a bad window or weights.
std::vector<RfmeVector> build_feature_matrix(std::span<const UserEvent> events,
                                             const WindowSpec& window,
                                             const FeatureOptions& options = {});

inline std::vector<RfmeVector> build_feature_matrix(const EventLog& log, const WindowSpec& window,
                                                    const FeatureOptions& options = {}) {
  return build_feature_matrix(std::span<const UserEvent>(log.events()), window, options);
}

inline constexpr std::string_view kFeatureCsvHeader = "user_id,recency,frequency,monetary,engagement";

void write_features_csv(const std::filesystem::path& path, std::span<const RfmeVector> vectors);

}  // namespace rfme
