#include "rfme/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "rfme/format.hpp"

namespace rfme {
namespace {

constexpr std::array<std::string_view, 4> kSegmentTokens = {"high_value", "promising",
                                                            "needs_attention", "needs_activation"};
constexpr std::size_t kRecency = 0, kFrequency = 1, kMonetary = 2, kEngagement = 3;

}  // namespace

std::string_view to_token(Segment s) { return kSegmentTokens[static_cast<std::size_t>(s)]; }

std::optional<Segment> parse_segment(std::string_view token) {
  for (std::size_t i = 0; i < kSegmentTokens.size(); ++i) {
    if (kSegmentTokens[i] == token) return static_cast<Segment>(i);
  }
  return std::nullopt;
}

std::vector<ClusterProfile> profile_clusters(int k, std::span<const RfmeVector> vectors,
                                             std::span<const int> assignments,
                                             bool allow_empty) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (vectors.size() != assignments.size()) {
    throw Error(ErrorKind::InvalidArgument, "vectors and assignments differ in length");
  }
  std::vector<ClusterProfile> profiles(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) profiles[static_cast<std::size_t>(c)].cluster_id = c;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    const int a = assignments[i];
    if (a < 0 || a >= k) throw Error(ErrorKind::IndexOutOfRange, "assignment out of range");
    auto& p = profiles[static_cast<std::size_t>(a)];
    const Point x = to_point(vectors[i]);
    for (std::size_t f = 0; f < kFeatureDim; ++f) p.means[f] += x[f];
    ++p.count;
  }
  for (auto& p : profiles) {
    if (p.count == 0) {
      if (allow_empty) continue;
      throw Error(ErrorKind::EmptyCluster, "cluster " + std::to_string(p.cluster_id) + " is empty");
    }
    for (auto& m : p.means) m /= static_cast<double>(p.count);
    p.share = static_cast<double>(p.count) / static_cast<double>(vectors.size());
  }
  return profiles;
}

std::vector<Segment> label_clusters(std::span<const ClusterProfile> profiles) {
  if (profiles.size() != 4) {
    throw Error(ErrorKind::WrongClusterCount,
                "segment names need exactly 4 clusters, got " + std::to_string(profiles.size()));
  }
  std::array<double, 4> composite{};
  for (std::size_t f : {kFrequency, kMonetary, kEngagement}) {
    double lo = profiles[0].means[f], hi = lo;
    for (const auto& p : profiles) {
      lo = std::min(lo, p.means[f]);
      hi = std::max(hi, p.means[f]);
    }
    for (std::size_t i = 0; i < 4; ++i) {
      composite[i] += hi > lo ? (profiles[i].means[f] - lo) / (hi - lo) : 0.0;
    }
  }
  for (auto& c : composite) c /= 3.0;

  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (composite[a] != composite[b]) return composite[a] > composite[b];
    const auto& ma = profiles[a].means;
    const auto& mb = profiles[b].means;
    if (ma[kMonetary] != mb[kMonetary]) return ma[kMonetary] > mb[kMonetary];
    if (ma[kFrequency] != mb[kFrequency]) return ma[kFrequency] > mb[kFrequency];
    return profiles[a].cluster_id < profiles[b].cluster_id;
  });

  std::vector<Segment> labels(4);
  labels[order[0]] = Segment::HighValue;
  labels[order[1]] = Segment::Promising;
  std::size_t attention = order[2];
  std::size_t activation = order[3];
  const auto& a = profiles[attention].means;
  const auto& b = profiles[activation].means;
  const bool swap = b[kRecency] < a[kRecency] ||
                    (b[kRecency] == a[kRecency] &&
                     (b[kFrequency] > a[kFrequency] ||
                      (b[kFrequency] == a[kFrequency] &&
                       profiles[activation].cluster_id < profiles[attention].cluster_id)));
  if (swap) std::swap(attention, activation);
  labels[attention] = Segment::NeedsAttention;
  labels[activation] = Segment::NeedsActivation;
  return labels;
}

std::vector<std::string> cluster_names(std::span<const ClusterProfile> profiles) {
  std::vector<std::string> names;
  if (profiles.size() == 4) {
    for (Segment s : label_clusters(profiles)) names.emplace_back(to_token(s));
  } else {
    for (const auto& p : profiles) names.push_back("cluster-" + std::to_string(p.cluster_id));
  }
  return names;
}

void write_segment_report(const std::filesystem::path& path,
                          std::span<const ClusterProfile> profiles,
                          std::span<const std::string> names) {
  if (names.size() != profiles.size()) {
    throw Error(ErrorKind::InvalidArgument, "one name per profile required");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << kSegmentCsvHeader << '\n';
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    out << p.cluster_id << ',' << names[i];
    for (double m : p.means) out << ',' << format_double(m);
    out << ',' << p.count << ',' << format_double(p.share) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

}  // namespace rfme
