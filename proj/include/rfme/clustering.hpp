#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rfme/features.hpp"

namespace rfme {

inline constexpr std::size_t kFeatureDim = 4;
using Point = std::array<double, kFeatureDim>;

inline constexpr std::array<std::string_view, kFeatureDim> kFeatureOrder = {
    "recency", "frequency", "monetary", "engagement"};

Point to_point(const RfmeVector& v);
std::vector<Point> to_points(std::span<const RfmeVector> vectors);

double squared_distance(const Point& a, const Point& b);

// ---------------------------------------------------------------------------
// Standardization

/// Per-feature z-score parameters. A feature with zero spread keeps std 1, so
/// it is only shifted.
struct StandardizationParams {
  Point mean{0.0, 0.0, 0.0, 0.0};
  Point std{1.0, 1.0, 1.0, 1.0};

  static StandardizationParams identity() { return {}; }
  Point apply(const Point& p) const;
  Point invert(const Point& z) const;

  friend bool operator==(const StandardizationParams&, const StandardizationParams&) = default;
};

/// Population (divide-by-n) mean and std. Throws EmptyInput.
StandardizationParams standardize_fit(std::span<const Point> points);
std::vector<Point> standardize_apply(const StandardizationParams& params,
                                     std::span<const Point> points);

// ---------------------------------------------------------------------------
// K-means

struct KMeansOptions {
  int k = 4;
  std::uint64_t seed = 0;
  int n_init = 10;
  int max_iter = 300;
  /// Converged when the summed squared centroid shift is at most
  /// tol * (mean per-feature variance of the clustered data).
  double tol = 1e-4;
  bool standardize = true;
  int workers = 1;
};

struct KMeansModel {
  int k = 0;
  /// In standardized space (raw space when standardization is disabled).
  std::vector<Point> centroids;
  StandardizationParams standardization;
  bool standardized = true;
  std::uint64_t seed = 0;
  int n_init = 0;
  int max_iter = 0;
  double tol = 0.0;
  int iterations_run = 0;
  bool converged = false;
  /// Assignment-consistent WCSS in the clustering space.
  double wcss = 0.0;

  std::vector<Point> raw_centroids() const;
};

struct KMeansFit {
  KMeansModel model;
  std::vector<int> assignments;
  /// WCSS after every assignment step, one trace per restart, in restart
  /// order. The last entry of each trace is the final assignment.
  std::vector<std::vector<double>> wcss_traces;
};

/// Best of n_init k-means++ seeded Lloyd runs. Throws EmptyInput,
/// KExceedsDistinctPoints, or InvalidArgument for bad options.
KMeansFit kmeans_fit(std::span<const Point> points, const KMeansOptions& options);

/// Nearest centroid for raw-space points; ties go to the lowest index.
std::vector<int> kmeans_predict(const KMeansModel& model, std::span<const Point> points);

/// Sum of squared distances to the assigned centroids. Throws IndexOutOfRange
/// (and InvalidArgument on a length mismatch).
double wcss(std::span<const Point> points, std::span<const Point> centroids,
            std::span<const int> assignments);

std::size_t count_distinct(std::span<const Point> points);

// ---------------------------------------------------------------------------
// Elbow

struct ElbowPoint {
  int k = 0;
  double wcss = 0.0;
};

struct ElbowCurve {
  std::vector<ElbowPoint> points;
  int selected_k = 0;
};

struct ElbowOptions {
  int k_min = 1;
  int k_max = 7;
  std::uint64_t seed = 0;
  int n_init = 10;
  int max_iter = 300;
  double tol = 1e-4;
  bool standardize = true;
  int workers = 1;
};

struct ElbowResult {
  ElbowCurve curve;
  /// fits[i] is the fit for k = k_min + i.
  std::vector<KMeansFit> fits;

  const KMeansFit& fit_for(int k) const;
};

/// Knee of a WCSS curve: the interior k maximizing
/// wcss(k-1) - 2 wcss(k) + wcss(k+1); ties go to the smaller k. Curves with
/// no interior point select their first k.
int select_knee(std::span<const ElbowPoint> points);

/// Fits every k in [k_min, k_max] with the same seed schedule. Each k > k_min
/// also tries a warm start from the previous best centroids plus the point
/// farthest from its centroid, so the curve never increases.
ElbowResult elbow_fit(std::span<const Point> points, const ElbowOptions& options);

inline ElbowCurve elbow_curve(std::span<const Point> points, const ElbowOptions& options) {
  return elbow_fit(points, options).curve;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::ordered_json model_to_json(const KMeansModel& model);
/// Throws FeatureOrderMismatch when the document's feature order differs and
/// InvalidArgument for a structurally invalid document.
KMeansModel model_from_json(const nlohmann::json& doc);

}  // namespace rfme
