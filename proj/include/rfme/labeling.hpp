#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfme/clustering.hpp"

namespace rfme {

enum class Segment { HighValue, Promising, NeedsAttention, NeedsActivation };

inline constexpr std::array<Segment, 4> kAllSegments = {
    Segment::HighValue, Segment::Promising, Segment::NeedsAttention, Segment::NeedsActivation};

std::string_view to_token(Segment s);
std::optional<Segment> parse_segment(std::string_view token);

struct ClusterProfile {
  int cluster_id = 0;
  /// Raw-space means in feature order (recency, frequency, monetary, engagement).
  Point means{};
  std::size_t count = 0;
  double share = 0.0;
};

/// Per-cluster raw means and member counts. Throws EmptyCluster when a
/// cluster has no members (unless allow_empty, which reports zero means), and
/// InvalidArgument / IndexOutOfRange on inconsistent inputs.
std::vector<ClusterProfile> profile_clusters(int k, std::span<const RfmeVector> vectors,
                                             std::span<const int> assignments,
                                             bool allow_empty = false);

/// Maps four profiles onto the segment names; result[i] is the segment of
/// profiles[i]. Throws WrongClusterCount unless exactly four are given.
///
/// The three FME means are min-max normalized across the profiles and
/// averaged into a composite. The two highest composites become HighValue
/// and Promising (ties: higher monetary, then higher frequency). Of the other
/// two, the more recent one (smaller recency) is NeedsAttention (ties: higher
/// frequency) and the remaining one NeedsActivation.
std::vector<Segment> label_clusters(std::span<const ClusterProfile> profiles);

/// Segment token for k == 4 labelings, "cluster-<id>" otherwise.
std::vector<std::string> cluster_names(std::span<const ClusterProfile> profiles);

inline constexpr std::string_view kSegmentCsvHeader =
    "cluster_id,segment,recency_mean,frequency_mean,monetary_mean,engagement_mean,count,share";

void write_segment_report(const std::filesystem::path& path,
                          std::span<const ClusterProfile> profiles,
                          std::span<const std::string> names);

}  // namespace rfme
