#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rfme/event_model.hpp"
#include "rfme/features.hpp"
#include "rfme/kv_config.hpp"
#include "rfme/labeling.hpp"

namespace rfme {

/// Behavioral archetype for synthetic users.
///
/// Per user: the last visit falls `recency` days before the reference date,
/// with recency uniform in [recency_min, recency_max]. The session count is
/// 1 + Poisson(visit_rate - 1); the other sessions land on distinct hourly
/// slots between the window start and the last-visit day. Each session
/// performs activity i with probability activity_prob[i] (filter, pdp, lead,
/// crf, shortlist); a PDP-active session views 1 + Poisson(mean_pdp_views - 1)
/// pages and a lead-active session drops 1 + Poisson(mean_leads - 1) leads.
/// Every session opens with one other_visit event.
struct ArchetypeSpec {
  Segment segment = Segment::NeedsActivation;
  double user_share = 0.0;
  double visit_rate = 1.0;
  int recency_min = 0;
  int recency_max = 0;
  std::array<double, kActivityCount> activity_prob{};
  double mean_pdp_views = 1.0;
  double mean_leads = 1.0;
};

using GroundTruth = std::map<std::string, Segment>;

struct SynthResult {
  EventLog log;
  GroundTruth truth;
};

struct SynthConfig {
  std::vector<ArchetypeSpec> archetypes;
  std::size_t n_users = 1000;
  WindowSpec window{std::chrono::sys_days{std::chrono::year{2023} / 1 / 11}, kDefaultWindowDays};
  std::uint64_t seed = 0;
  Platform platform = Platform::App;
};

/// Four archetypes whose expected feature means match the app-user cluster
/// means (R/F/M/E): needs activation 29/3/7/3, needs attention 19/4/7/3,
/// promising 23/20/73/25, high value 24/57/242/77. Shares and recency bands
/// are chosen so the groups are well separated after z-scoring.
std::vector<ArchetypeSpec> four_segment_archetypes();

/// Largest-remainder apportionment of n over the shares (ties to the lower
/// index). Counts always sum to n.
std::vector<std::size_t> apportion(std::span<const double> shares, std::size_t n);

/// Throws InvalidSpec when shares do not sum to 1, a rate or probability is
/// out of range, or a recency band does not fit the window.
void validate_archetypes(std::span<const ArchetypeSpec> specs, int window_days);

/// Deterministic in (config); each user draws from its own stream derived
/// from (seed, user index). Every user has at least one in-window session.
SynthResult generate(const SynthConfig& config);

/// Key-value generator spec. Keys: n_users, seed, reference_date,
/// window_days, platform, preset (four_segment), archetypes (comma list of
/// segment tokens), and per archetype `<segment>.share`, `.visit_rate`,
/// `.recency_min`, `.recency_max`, `.p_filter`, `.p_pdp`, `.p_lead`,
/// `.p_crf`, `.p_shortlist`, `.mean_pdp_views`, `.mean_leads`.
SynthConfig parse_synth_config(const KeyValueDoc& doc);
std::string format_synth_config(const SynthConfig& config);

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth);

}  // namespace rfme
