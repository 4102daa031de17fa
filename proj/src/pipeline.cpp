#include "rfme/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "rfme/format.hpp"

namespace rfme {
namespace {

[[noreturn]] void invalid(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorKind::ConfigInvalid, key + " = '" + value + "': expected " + expected);
}

template <class Int>
Int parse_integer(const std::string& key, const std::string& value) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) invalid(key, value, "an integer");
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used == value.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  invalid(key, value, "a number");
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "off" || value == "0" || value == "no") return false;
  invalid(key, value, "true or false");
}

Date parse_day(const std::string& key, const std::string& value) {
  const auto d = parse_date(value);
  if (!d) invalid(key, value, "a YYYY-MM-DD date");
  return *d;
}

std::optional<DateSpan> parse_span(const KeyValueDoc& doc, const std::string& name) {
  const auto start = doc.get(name + "_start");
  const auto end = doc.get(name + "_end");
  if (!start && !end) return std::nullopt;
  if (!start || !end) {
    throw Error(ErrorKind::ConfigInvalid, name + "_start and " + name + "_end must be given together");
  }
  return DateSpan{parse_day(name + "_start", *start), parse_day(name + "_end", *end)};
}

std::string_view to_token(PlatformFilter p) {
  switch (p) {
    case PlatformFilter::Web: return "web";
    case PlatformFilter::App: return "app";
    case PlatformFilter::Both: return "both";
  }
  return "both";
}

void validate_common(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); };
  if (c.input.empty()) fail("input is required");
  for (const auto* span : {&c.train, &c.test}) {
    if (*span && (*span)->end < (*span)->start) fail("date span ends before it starts");
  }
  if (c.train && c.test && !(c.train->end < c.test->start)) fail("train end must precede test start");
  if (c.window_days < 1) fail("window_days must be >= 1");
  if (c.session_gap <= std::chrono::seconds::zero()) fail("session_gap_minutes must be > 0");
  if (c.weights.pdp_weight < 1 || c.weights.lead_weight < 1) fail("monetary weights must be positive");
  if (c.workers < 1) fail("workers must be >= 1");
}

std::vector<UserEvent> select_events(const EventLog& log, PlatformFilter platform,
                                     const DateSpan& span) {
  std::vector<UserEvent> out;
  for (const auto& e : log.events()) {
    if (platform == PlatformFilter::Web && e.platform != Platform::Web) continue;
    if (platform == PlatformFilter::App && e.platform != Platform::App) continue;
    if (!span.contains(utc_date(e.timestamp))) continue;
    out.push_back(e);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_output(path);
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

void write_scatter(const std::filesystem::path& path, const char* header,
                   std::span<const RfmeVector> features, std::span<const int> assignments,
                   std::span<const std::string> names, bool recency_frequency) {
  auto out = open_output(path);
  out << header << '\n';
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& v = features[i];
    const auto c = static_cast<std::size_t>(assignments[i]);
    out << v.user_id << ',';
    if (recency_frequency) {
      out << v.recency << ',' << v.frequency;
    } else {
      out << v.monetary << ',' << v.engagement;
    }
    out << ',' << c << ',' << names[c] << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

void write_elbow(const std::filesystem::path& path, const ElbowCurve& curve) {
  auto out = open_output(path);
  out << "k,wcss,selected\n";
  for (const auto& p : curve.points) {
    out << p.k << ',' << format_double(p.wcss) << ',' << (p.k == curve.selected_k ? 1 : 0) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

struct SplitData {
  WindowSpec window;
  std::vector<RfmeVector> features;
  std::size_t events_loaded = 0;
  RejectionReport rejections;
};

SplitData load_split(const RunConfig& config, const DateSpan& span) {
  auto loaded = load_event_log(config.input, config.format, LoadOptions{config.workers});
  SplitData data;
  data.events_loaded = loaded.log.size();
  data.rejections = std::move(loaded.rejections);
  data.window = WindowSpec{span.end, std::min(config.window_days, span.days())};
  const auto events = select_events(loaded.log, config.platform, span);
  data.features = build_feature_matrix(std::span<const UserEvent>(events), data.window,
                                       FeatureOptions{config.session_gap, config.weights, config.workers});
  return data;
}

/// Training outputs carry no suffix on the scatter and report files.
void write_split_outputs(const std::filesystem::path& dir, const RunOutcome& outcome) {
  const std::string& split = outcome.report.split;
  const std::string suffix = split == "train" ? "" : "_" + split;
  write_features_csv(dir / ("features_" + split + ".csv"), outcome.features);
  write_segment_report(dir / ("segments_" + split + ".csv"), outcome.report.profiles,
                       outcome.cluster_names);
  write_scatter(dir / ("scatter_rf" + suffix + ".csv"),
                "user_id,recency,frequency,cluster_id,segment", outcome.features,
                outcome.assignments, outcome.cluster_names, true);
  write_scatter(dir / ("scatter_me" + suffix + ".csv"),
                "user_id,monetary,engagement,cluster_id,segment", outcome.features,
                outcome.assignments, outcome.cluster_names, false);
  write_text(dir / ("run_report" + suffix + ".json"), outcome.report.to_json().dump(2) + "\n");
}

RunReport base_report(const std::string& split, const RunConfig& config, const SplitData& data,
                      const KMeansModel& model, std::vector<ClusterProfile> profiles,
                      std::vector<std::string> names) {
  RunReport r;
  r.split = split;
  r.platform = std::string(to_token(config.platform));
  r.reference_date = data.window.reference_date;
  r.window_requested = config.window_days;
  r.window_effective = data.window.window_days;
  r.users = data.features.size();
  r.k = model.k;
  r.converged = model.converged;
  r.iterations_run = model.iterations_run;
  r.wcss = model.wcss;
  r.profiles = std::move(profiles);
  r.names = std::move(names);
  return r;
}

}  // namespace

RunConfig parse_run_config(const KeyValueDoc& doc) {
  for (const auto& [key, value] : doc.entries()) {
    if (std::find(kRunConfigKeys.begin(), kRunConfigKeys.end(), key) == kRunConfigKeys.end()) {
      throw Error(ErrorKind::ConfigInvalid, "unknown key '" + key + "'");
    }
  }
  RunConfig c;
  if (const auto v = doc.get("input")) c.input = *v;
  if (const auto v = doc.get("format")) {
    const auto f = parse_log_format(*v);
    if (!f) invalid("format", *v, "csv or jsonl");
    c.format = *f;
  }
  if (const auto v = doc.get("platform")) {
    if (*v == "web") c.platform = PlatformFilter::Web;
    else if (*v == "app") c.platform = PlatformFilter::App;
    else if (*v == "both") c.platform = PlatformFilter::Both;
    else invalid("platform", *v, "web, app or both");
  }
  c.train = parse_span(doc, "train");
  c.test = parse_span(doc, "test");
  if (const auto v = doc.get("window_days")) c.window_days = parse_integer<int>("window_days", *v);
  if (const auto v = doc.get("session_gap_minutes")) {
    c.session_gap = std::chrono::minutes{parse_integer<int>("session_gap_minutes", *v)};
  }
  if (const auto v = doc.get("pdp_weight")) c.weights.pdp_weight = parse_integer<std::int64_t>("pdp_weight", *v);
  if (const auto v = doc.get("lead_weight")) c.weights.lead_weight = parse_integer<std::int64_t>("lead_weight", *v);
  if (const auto v = doc.get("k"); v && *v != "auto") c.k = parse_integer<int>("k", *v);
  if (const auto v = doc.get("k_min")) c.k_min = parse_integer<int>("k_min", *v);
  if (const auto v = doc.get("k_max")) c.k_max = parse_integer<int>("k_max", *v);
  if (const auto v = doc.get("seed")) c.seed = parse_integer<std::uint64_t>("seed", *v);
  if (const auto v = doc.get("n_init")) c.n_init = parse_integer<int>("n_init", *v);
  if (const auto v = doc.get("max_iter")) c.max_iter = parse_integer<int>("max_iter", *v);
  if (const auto v = doc.get("tol")) c.tol = parse_real("tol", *v);
  if (const auto v = doc.get("standardize")) c.standardize = parse_flag("standardize", *v);
  if (const auto v = doc.get("output_dir")) c.output_dir = *v;
  if (const auto v = doc.get("workers")) c.workers = parse_integer<int>("workers", *v);
  return c;
}

void validate_for_train(const RunConfig& c) {
  validate_common(c);
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigInvalid, msg); };
  if (!c.train) fail("train_start and train_end are required for training");
  if (!c.seed) fail("seed is required for training");
  if (c.k && *c.k < 1) fail("k must be >= 1");
  if (!c.k && (c.k_min < 1 || c.k_max < c.k_min)) fail("need 1 <= k_min <= k_max");
  if (c.n_init < 1 || c.max_iter < 1 || !(c.tol >= 0.0)) fail("need n_init >= 1, max_iter >= 1, tol >= 0");
}

void validate_for_score(const RunConfig& c) {
  validate_common(c);
  if (!c.test) throw Error(ErrorKind::ConfigInvalid, "test_start and test_end are required for scoring");
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["split"] = split;
  doc["platform"] = platform;
  doc["reference_date"] = format_date(reference_date);
  doc["window"] = {{"requested_days", window_requested},
                   {"effective_days", window_effective},
                   {"clipped", window_clipped()},
                   {"first_day", format_date(reference_date - std::chrono::days{window_effective - 1})},
                   {"last_day", format_date(reference_date)}};
  doc["users"] = users;
  if (elbow) {
    auto points = nlohmann::ordered_json::array();
    for (const auto& p : elbow->points) points.push_back({{"k", p.k}, {"wcss", p.wcss}});
    doc["elbow"] = {{"points", points}, {"selected_k", elbow->selected_k}};
  }
  doc["k"] = k;
  doc["convergence"] = {{"converged", converged}, {"iterations_run", iterations_run}, {"wcss", wcss}};
  auto segments = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    segments.push_back({{"cluster_id", p.cluster_id},
                        {"segment", names[i]},
                        {"recency_mean", p.means[0]},
                        {"frequency_mean", p.means[1]},
                        {"monetary_mean", p.means[2]},
                        {"engagement_mean", p.means[3]},
                        {"count", p.count},
                        {"share", p.share}});
  }
  doc["segments"] = segments;
  return doc;
}

RunOutcome run_train(const RunConfig& config) {
  validate_for_train(config);
  SplitData data = load_split(config, *config.train);
  const auto points = to_points(data.features);

  RunOutcome outcome;
  std::optional<ElbowCurve> elbow;
  if (config.k) {
    KMeansOptions o;
    o.k = *config.k;
    o.seed = *config.seed;
    o.n_init = config.n_init;
    o.max_iter = config.max_iter;
    o.tol = config.tol;
    o.standardize = config.standardize;
    o.workers = config.workers;
    auto fit = kmeans_fit(points, o);
    outcome.model = std::move(fit.model);
    outcome.assignments = std::move(fit.assignments);
  } else {
    ElbowOptions o;
    o.k_min = config.k_min;
    o.k_max = config.k_max;
    o.seed = *config.seed;
    o.n_init = config.n_init;
    o.max_iter = config.max_iter;
    o.tol = config.tol;
    o.standardize = config.standardize;
    o.workers = config.workers;
    auto result = elbow_fit(points, o);
    const auto& fit = result.fit_for(result.curve.selected_k);
    outcome.model = fit.model;
    outcome.assignments = fit.assignments;
    elbow = result.curve;
  }

  auto profiles = profile_clusters(outcome.model.k, data.features, outcome.assignments);
  outcome.cluster_names = cluster_names(profiles);
  outcome.report = base_report("train", config, data, outcome.model, profiles,
                               outcome.cluster_names);
  outcome.report.elbow = elbow;
  outcome.features = std::move(data.features);
  outcome.events_loaded = data.events_loaded;
  outcome.rejections = std::move(data.rejections);

  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir);
  auto model_doc = model_to_json(outcome.model);
  model_doc["segments"] = outcome.cluster_names;
  write_text(dir / "model.json", model_doc.dump(2) + "\n");
  write_elbow(dir / "elbow.csv",
              elbow ? *elbow : ElbowCurve{{{outcome.model.k, outcome.model.wcss}}, outcome.model.k});
  write_split_outputs(dir, outcome);
  return outcome;
}

RunOutcome run_score(const RunConfig& config, const std::filesystem::path& model_path) {
  validate_for_score(config);
  std::ifstream in(model_path);
  if (!in) throw Error(ErrorKind::ModelMissing, "cannot read model " + model_path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(ErrorKind::ModelMissing, model_path.string() + " is not valid JSON");

  RunOutcome outcome;
  outcome.model = model_from_json(doc);
  if (const auto it = doc.find("segments"); it != doc.end()) {
    outcome.cluster_names = it->get<std::vector<std::string>>();
  }
  if (outcome.cluster_names.size() != static_cast<std::size_t>(outcome.model.k)) {
    outcome.cluster_names.clear();
    for (int c = 0; c < outcome.model.k; ++c) outcome.cluster_names.push_back("cluster-" + std::to_string(c));
  }

  SplitData data = load_split(config, *config.test);
  outcome.assignments = kmeans_predict(outcome.model, to_points(data.features));

  // A test split may leave a trained cluster without members.
  auto profiles = profile_clusters(outcome.model.k, data.features, outcome.assignments,
                                   /*allow_empty=*/true);
  outcome.report = base_report("test", config, data, outcome.model, std::move(profiles),
                               outcome.cluster_names);
  outcome.features = std::move(data.features);
  outcome.events_loaded = data.events_loaded;
  outcome.rejections = std::move(data.rejections);

  std::filesystem::create_directories(config.output_dir);
  write_split_outputs(config.output_dir, outcome);
  return outcome;
}

}  // namespace rfme
