#include "rfme/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rfme/parallel.hpp"
#include "rfme/random.hpp"

namespace rfme {
namespace {

// Fixed chunk size: partial sums are formed per chunk and reduced in chunk
// order, so floating-point results do not depend on the worker count.
constexpr std::size_t kChunk = 4096;

struct Assignment {
  std::vector<int> labels;
  std::vector<double> dist2;
  double wcss = 0.0;
};

struct ChunkPartial {
  std::vector<Point> sums;
  std::vector<std::size_t> counts;
  double wcss = 0.0;
};

int nearest(const Point& p, std::span<const Point> centroids, double& best_d2) {
  int best = 0;
  best_d2 = squared_distance(p, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d2 = squared_distance(p, centroids[c]);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(c);
    }
  }
  return best;
}

/// Assigns every point and accumulates per-cluster sums in one pass.
Assignment assign(std::span<const Point> points, std::span<const Point> centroids, int workers,
                  std::vector<Point>& sums, std::vector<std::size_t>& counts) {
  const std::size_t k = centroids.size();
  const std::size_t n_chunks = chunk_count(points.size(), kChunk);
  Assignment out;
  out.labels.resize(points.size());
  out.dist2.resize(points.size());
  std::vector<ChunkPartial> partials(n_chunks);

  parallel_for(n_chunks, workers, [&](std::size_t c) {
    auto& part = partials[c];
    part.sums.assign(k, Point{});
    part.counts.assign(k, 0);
    const std::size_t end = std::min(points.size(), (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      double d2 = 0.0;
      const int label = nearest(points[i], centroids, d2);
      out.labels[i] = label;
      out.dist2[i] = d2;
      part.wcss += d2;
      auto& s = part.sums[static_cast<std::size_t>(label)];
      for (std::size_t f = 0; f < kFeatureDim; ++f) s[f] += points[i][f];
      ++part.counts[static_cast<std::size_t>(label)];
    }
  });

  sums.assign(k, Point{});
  counts.assign(k, 0);
  for (const auto& part : partials) {
    out.wcss += part.wcss;
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t f = 0; f < kFeatureDim; ++f) sums[j][f] += part.sums[j][f];
      counts[j] += part.counts[j];
    }
  }
  return out;
}

/// Moves the farthest point (from its own centroid) into each empty cluster.
/// Donor clusters keep at least one member.
void repair_empty_clusters(std::span<const Point> points, Assignment& a, std::vector<Point>& sums,
                           std::vector<std::size_t>& counts) {
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] != 0) continue;
    std::size_t pick = points.size();
    double pick_d2 = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto donor = static_cast<std::size_t>(a.labels[i]);
      if (counts[donor] > 1 && a.dist2[i] > pick_d2) {
        pick_d2 = a.dist2[i];
        pick = i;
      }
    }
    // Unreachable while k <= distinct points <= n.
    if (pick == points.size()) throw Error(ErrorKind::EmptyCluster, "no point available to reseed");
    const auto donor = static_cast<std::size_t>(a.labels[pick]);
    for (std::size_t f = 0; f < kFeatureDim; ++f) sums[donor][f] -= points[pick][f];
    --counts[donor];
    sums[j] = points[pick];
    counts[j] = 1;
    a.labels[pick] = static_cast<int>(j);
    a.dist2[pick] = 0.0;
  }
}

struct RunResult {
  std::vector<Point> centroids;
  std::vector<int> labels;
  double wcss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

RunResult lloyd(std::span<const Point> points, std::vector<Point> centroids, int max_iter,
                double tol_abs, int workers) {
  RunResult run;
  std::vector<Point> sums;
  std::vector<std::size_t> counts;
  for (int iter = 1; iter <= max_iter; ++iter) {
    Assignment a = assign(points, centroids, workers, sums, counts);
    run.trace.push_back(a.wcss);
    repair_empty_clusters(points, a, sums, counts);

    double shift = 0.0;
    for (std::size_t j = 0; j < centroids.size(); ++j) {
      Point next;
      for (std::size_t f = 0; f < kFeatureDim; ++f) {
        next[f] = sums[j][f] / static_cast<double>(counts[j]);
      }
      shift += squared_distance(next, centroids[j]);
      centroids[j] = next;
    }
    run.iterations = iter;
    if (shift <= tol_abs) {
      run.converged = true;
      break;
    }
  }
  Assignment final_assignment = assign(points, centroids, workers, sums, counts);
  run.trace.push_back(final_assignment.wcss);
  run.wcss = final_assignment.wcss;
  run.labels = std::move(final_assignment.labels);
  run.centroids = std::move(centroids);
  return run;
}

/// Greedy k-means++: each new center is the best (lowest resulting potential)
/// of 2 + floor(ln k) candidates drawn proportionally to squared distance.
std::vector<Point> kmeanspp_init(std::span<const Point> points, int k, Rng& rng) {
  const std::size_t n = points.size();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  std::vector<Point> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(points[rng.below(n)]);

  std::vector<double> closest(n);
  for (std::size_t i = 0; i < n; ++i) closest[i] = squared_distance(points[i], centers[0]);
  std::vector<double> cumulative(n);
  std::vector<double> candidate_closest(n);
  std::vector<double> best_closest(n);

  for (int c = 1; c < k; ++c) {
    std::partial_sum(closest.begin(), closest.end(), cumulative.begin());
    const double potential = cumulative.back();
    std::size_t best_index = 0;
    double best_potential = std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
      const double r = rng.uniform() * potential;
      // First index whose cumulative weight exceeds r: never a zero-weight
      // point, so the new center is distinct from the existing ones.
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
      if (it == cumulative.end()) {
        it = std::lower_bound(cumulative.begin(), cumulative.end(), potential);
      }
      const auto index = static_cast<std::size_t>(it - cumulative.begin());
      double cand_potential = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        candidate_closest[i] = std::min(closest[i], squared_distance(points[i], points[index]));
        cand_potential += candidate_closest[i];
      }
      if (cand_potential < best_potential) {
        best_potential = cand_potential;
        best_index = index;
        best_closest.swap(candidate_closest);
      }
    }
    centers.push_back(points[best_index]);
    closest.swap(best_closest);
  }
  return centers;
}

void validate(const KMeansOptions& o) {
  if (o.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (o.n_init < 1) throw Error(ErrorKind::InvalidArgument, "n_init must be >= 1");
  if (o.max_iter < 1) throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  if (!(o.tol >= 0.0)) throw Error(ErrorKind::InvalidArgument, "tol must be >= 0");
}

double mean_variance(std::span<const Point> points) {
  Point mean{};
  for (const auto& p : points) {
    for (std::size_t f = 0; f < kFeatureDim; ++f) mean[f] += p[f];
  }
  for (auto& m : mean) m /= static_cast<double>(points.size());
  double total = 0.0;
  for (const auto& p : points) total += squared_distance(p, mean);
  return total / static_cast<double>(points.size() * kFeatureDim);
}

struct Prepared {
  StandardizationParams params;
  std::vector<Point> space;
  double tol_abs = 0.0;
};

Prepared prepare(std::span<const Point> points, bool standardize, double tol) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "no points to cluster");
  Prepared p;
  p.params = standardize ? standardize_fit(points) : StandardizationParams::identity();
  p.space = standardize_apply(p.params, points);
  p.tol_abs = tol * mean_variance(p.space);
  return p;
}

/// Runs n_init seeded restarts, plus optional explicit initializations tried
/// after them; keeps the lowest WCSS (earliest on ties).
KMeansFit fit_prepared(const Prepared& prep, std::size_t distinct, const KMeansOptions& o,
                       const std::vector<std::vector<Point>>& extra_inits) {
  validate(o);
  if (static_cast<std::size_t>(o.k) > distinct) {
    throw Error(ErrorKind::KExceedsDistinctPoints,
                "k=" + std::to_string(o.k) + " exceeds " + std::to_string(distinct) + " distinct points");
  }
  KMeansFit fit;
  RunResult best;
  bool have_best = false;
  const auto consider = [&](RunResult run) {
    fit.wcss_traces.push_back(run.trace);
    if (!have_best || run.wcss < best.wcss) {
      best = std::move(run);
      have_best = true;
    }
  };
  for (int r = 0; r < o.n_init; ++r) {
    Rng rng(mix_seed(o.seed, static_cast<std::uint64_t>(r)));
    consider(lloyd(prep.space, kmeanspp_init(prep.space, o.k, rng), o.max_iter, prep.tol_abs,
                   o.workers));
  }
  for (const auto& init : extra_inits) {
    consider(lloyd(prep.space, init, o.max_iter, prep.tol_abs, o.workers));
  }

  auto& m = fit.model;
  m.k = o.k;
  m.centroids = std::move(best.centroids);
  m.standardization = prep.params;
  m.standardized = o.standardize;
  m.seed = o.seed;
  m.n_init = o.n_init;
  m.max_iter = o.max_iter;
  m.tol = o.tol;
  m.iterations_run = best.iterations;
  m.converged = best.converged;
  m.wcss = best.wcss;
  fit.assignments = std::move(best.labels);
  return fit;
}

}  // namespace

Point to_point(const RfmeVector& v) {
  return {static_cast<double>(v.recency), static_cast<double>(v.frequency),
          static_cast<double>(v.monetary), static_cast<double>(v.engagement)};
}

std::vector<Point> to_points(std::span<const RfmeVector> vectors) {
  std::vector<Point> out;
  out.reserve(vectors.size());
  for (const auto& v : vectors) out.push_back(to_point(v));
  return out;
}

double squared_distance(const Point& a, const Point& b) {
  double d2 = 0.0;
  for (std::size_t f = 0; f < kFeatureDim; ++f) {
    const double d = a[f] - b[f];
    d2 += d * d;
  }
  return d2;
}

Point StandardizationParams::apply(const Point& p) const {
  Point z;
  for (std::size_t f = 0; f < kFeatureDim; ++f) z[f] = (p[f] - mean[f]) / std[f];
  return z;
}

Point StandardizationParams::invert(const Point& z) const {
  Point p;
  for (std::size_t f = 0; f < kFeatureDim; ++f) p[f] = z[f] * std[f] + mean[f];
  return p;
}

StandardizationParams standardize_fit(std::span<const Point> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "cannot standardize zero vectors");
  StandardizationParams params;
  const double n = static_cast<double>(points.size());
  for (std::size_t f = 0; f < kFeatureDim; ++f) {
    double sum = 0.0;
    for (const auto& p : points) sum += p[f];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& p : points) ss += (p[f] - mean) * (p[f] - mean);
    const double sd = std::sqrt(ss / n);
    params.mean[f] = mean;
    // Rounding in the mean can leave a tiny spread on a constant column.
    params.std[f] = sd > 1e-12 * std::max(1.0, std::abs(mean)) ? sd : 1.0;
  }
  return params;
}

std::vector<Point> standardize_apply(const StandardizationParams& params,
                                     std::span<const Point> points) {
  std::vector<Point> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(params.apply(p));
  return out;
}

std::vector<Point> KMeansModel::raw_centroids() const {
  std::vector<Point> raw;
  raw.reserve(centroids.size());
  for (const auto& c : centroids) raw.push_back(standardization.invert(c));
  return raw;
}

std::size_t count_distinct(std::span<const Point> points) {
  std::vector<Point> copy(points.begin(), points.end());
  std::sort(copy.begin(), copy.end());
  return static_cast<std::size_t>(std::unique(copy.begin(), copy.end()) - copy.begin());
}

KMeansFit kmeans_fit(std::span<const Point> points, const KMeansOptions& options) {
  validate(options);
  const Prepared prep = prepare(points, options.standardize, options.tol);
  return fit_prepared(prep, count_distinct(prep.space), options, {});
}

std::vector<int> kmeans_predict(const KMeansModel& model, std::span<const Point> points) {
  if (model.centroids.empty()) throw Error(ErrorKind::InvalidArgument, "model has no centroids");
  std::vector<int> labels;
  labels.reserve(points.size());
  for (const auto& p : points) {
    double d2 = 0.0;
    labels.push_back(nearest(model.standardization.apply(p), model.centroids, d2));
  }
  return labels;
}

double wcss(std::span<const Point> points, std::span<const Point> centroids,
            std::span<const int> assignments) {
  if (points.size() != assignments.size()) {
    throw Error(ErrorKind::InvalidArgument, "points and assignments differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int a = assignments[i];
    if (a < 0 || static_cast<std::size_t>(a) >= centroids.size()) {
      throw Error(ErrorKind::IndexOutOfRange, "assignment " + std::to_string(a) + " at point " +
                                                  std::to_string(i) + " has no centroid");
    }
    total += squared_distance(points[i], centroids[static_cast<std::size_t>(a)]);
  }
  return total;
}

const KMeansFit& ElbowResult::fit_for(int k) const {
  const int idx = k - curve.points.front().k;
  if (idx < 0 || static_cast<std::size_t>(idx) >= fits.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "no fit for k=" + std::to_string(k));
  }
  return fits[static_cast<std::size_t>(idx)];
}

int select_knee(std::span<const ElbowPoint> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "empty elbow curve");
  int selected = points.front().k;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    const double second_diff = points[i - 1].wcss - 2.0 * points[i].wcss + points[i + 1].wcss;
    if (second_diff > best) {
      best = second_diff;
      selected = points[i].k;
    }
  }
  return selected;
}

ElbowResult elbow_fit(std::span<const Point> points, const ElbowOptions& options) {
  if (options.k_min < 1 || options.k_max < options.k_min) {
    throw Error(ErrorKind::InvalidArgument, "need 1 <= k_min <= k_max");
  }
  const Prepared prep = prepare(points, options.standardize, options.tol);
  const std::size_t distinct = count_distinct(prep.space);

  ElbowResult result;
  for (int k = options.k_min; k <= options.k_max; ++k) {
    KMeansOptions ko;
    ko.k = k;
    ko.seed = options.seed;
    ko.n_init = options.n_init;
    ko.max_iter = options.max_iter;
    ko.tol = options.tol;
    ko.standardize = options.standardize;
    ko.workers = options.workers;

    std::vector<std::vector<Point>> extra;
    if (!result.fits.empty() && static_cast<std::size_t>(k) <= distinct) {
      const auto& prev = result.fits.back();
      std::vector<Point> init = prev.model.centroids;
      std::size_t far = 0;
      double far_d2 = -1.0;
      for (std::size_t i = 0; i < prep.space.size(); ++i) {
        const double d2 = squared_distance(
            prep.space[i], init[static_cast<std::size_t>(prev.assignments[i])]);
        if (d2 > far_d2) {
          far_d2 = d2;
          far = i;
        }
      }
      init.push_back(prep.space[far]);
      extra.push_back(std::move(init));
    }
    result.fits.push_back(fit_prepared(prep, distinct, ko, extra));
    result.curve.points.push_back({k, result.fits.back().model.wcss});
  }
  result.curve.selected_k = select_knee(result.curve.points);
  return result;
}

nlohmann::ordered_json model_to_json(const KMeansModel& model) {
  nlohmann::ordered_json doc;
  doc["feature_order"] = std::vector<std::string>(kFeatureOrder.begin(), kFeatureOrder.end());
  doc["k"] = model.k;
  doc["seed"] = model.seed;
  doc["n_init"] = model.n_init;
  doc["max_iter"] = model.max_iter;
  doc["tol"] = model.tol;
  doc["standardized"] = model.standardized;
  doc["standardization"] = {{"mean", model.standardization.mean},
                            {"std", model.standardization.std}};
  doc["centroids_standardized"] = model.centroids;
  doc["centroids_raw"] = model.raw_centroids();
  doc["wcss"] = model.wcss;
  doc["converged"] = model.converged;
  doc["iterations_run"] = model.iterations_run;
  return doc;
}

KMeansModel model_from_json(const nlohmann::json& doc) {
  try {
    const auto order = doc.at("feature_order").get<std::vector<std::string>>();
    if (!std::equal(order.begin(), order.end(), kFeatureOrder.begin(), kFeatureOrder.end())) {
      throw Error(ErrorKind::FeatureOrderMismatch,
                  "model feature order does not match recency,frequency,monetary,engagement");
    }
    KMeansModel m;
    m.k = doc.at("k").get<int>();
    m.seed = doc.at("seed").get<std::uint64_t>();
    m.n_init = doc.at("n_init").get<int>();
    m.max_iter = doc.at("max_iter").get<int>();
    m.tol = doc.at("tol").get<double>();
    m.standardized = doc.at("standardized").get<bool>();
    m.standardization.mean = doc.at("standardization").at("mean").get<Point>();
    m.standardization.std = doc.at("standardization").at("std").get<Point>();
    m.centroids = doc.at("centroids_standardized").get<std::vector<Point>>();
    m.wcss = doc.at("wcss").get<double>();
    m.converged = doc.at("converged").get<bool>();
    m.iterations_run = doc.at("iterations_run").get<int>();
    if (m.k < 1 || m.centroids.size() != static_cast<std::size_t>(m.k)) {
      throw Error(ErrorKind::InvalidArgument, "centroid count does not match k");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("invalid model document: ") + e.what());
  }
}

}  // namespace rfme
