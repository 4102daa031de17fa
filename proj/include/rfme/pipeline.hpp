#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfme/clustering.hpp"
#include "rfme/event_model.hpp"
#include "rfme/features.hpp"
#include "rfme/kv_config.hpp"
#include "rfme/labeling.hpp"

namespace rfme {

enum class PlatformFilter { Web, App, Both };

/// Inclusive range of UTC days.
struct DateSpan {
  Date start;
  Date end;

  int days() const { return static_cast<int>(days_between(start, end)) + 1; }
  bool contains(Date d) const { return d >= start && d <= end; }
};

struct RunConfig {
  std::filesystem::path input;
  LogFormat format = LogFormat::Csv;
  PlatformFilter platform = PlatformFilter::Both;
  std::optional<DateSpan> train;
  std::optional<DateSpan> test;
  int window_days = kDefaultWindowDays;
  std::chrono::seconds session_gap = kDefaultSessionGap;
  MonetaryWeights weights;
  /// nullopt selects k with the elbow over [k_min, k_max].
  std::optional<int> k;
  int k_min = 1;
  int k_max = 7;
  std::optional<std::uint64_t> seed;
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-4;
  bool standardize = true;
  std::filesystem::path output_dir = ".";
  int workers = 1;
};

/// Every key accepted by parse_run_config.
inline constexpr std::array<std::string_view, 21> kRunConfigKeys = {
    "input",      "format",     "platform",    "train_start", "train_end",   "test_start",
    "test_end",   "window_days", "session_gap_minutes", "pdp_weight", "lead_weight", "k",
    "k_min",      "k_max",      "seed",        "n_init",      "max_iter",    "tol",
    "standardize", "output_dir", "workers"};

/// Throws ConfigInvalid for unknown keys or unparseable values.
RunConfig parse_run_config(const KeyValueDoc& doc);

/// Checks what a training run needs (input, train span, seed, sane ranges,
/// and train end < test start when a test span is given).
void validate_for_train(const RunConfig& config);
/// Checks what scoring needs (input, test span, and the span ordering when a
/// train span is also given).
void validate_for_score(const RunConfig& config);

struct RunReport {
  std::string split;
  std::string platform;
  Date reference_date;
  int window_requested = 0;
  int window_effective = 0;
  std::size_t users = 0;
  std::optional<ElbowCurve> elbow;
  int k = 0;
  bool converged = false;
  int iterations_run = 0;
  double wcss = 0.0;
  std::vector<ClusterProfile> profiles;
  std::vector<std::string> names;

  bool window_clipped() const { return window_effective < window_requested; }
  nlohmann::ordered_json to_json() const;
};

struct RunOutcome {
  KMeansModel model;
  std::vector<std::string> cluster_names;
  std::vector<RfmeVector> features;
  std::vector<int> assignments;
  RunReport report;
  /// Ingestion statistics; kept out of the written report because they
  /// depend on records outside the analysed span.
  std::size_t events_loaded = 0;
  RejectionReport rejections;
};

/// Train: filter to platform and train span, build features at reference
/// date = train end (window clipped to the span), fit, label, and write
/// model.json, segments_train.csv, elbow.csv, features_train.csv,
/// scatter_rf.csv, scatter_me.csv and run_report.json to output_dir.
RunOutcome run_train(const RunConfig& config);

/// Score the test span against a trained model artifact and write
/// segments_test.csv, features_test.csv, scatter_rf_test.csv,
/// scatter_me_test.csv and run_report_test.json. Throws ModelMissing and
/// FeatureOrderMismatch.
RunOutcome run_score(const RunConfig& config, const std::filesystem::path& model_path);

}  // namespace rfme
