#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rfme/clustering.hpp"
#include "rfme/error.hpp"
#include "rfme/event_model.hpp"
#include "rfme/features.hpp"
#include "rfme/labeling.hpp"
#include "rfme/metrics.hpp"
#include "rfme/pipeline.hpp"
#include "rfme/sessionization.hpp"
#include "rfme/synth.hpp"

namespace py = pybind11;
using namespace rfme;

namespace {

// Timestamps cross the boundary as RFC 3339 strings and dates as YYYY-MM-DD,
// matching the on-disk formats.

Instant to_instant(const std::string& text) {
  const auto t = parse_rfc3339(text);
  if (!t) throw Error(ErrorKind::InvalidArgument, "not an RFC 3339 timestamp: " + text);
  return *t;
}

Date to_date(const std::string& text) {
  const auto d = parse_date(text);
  if (!d) throw Error(ErrorKind::InvalidArgument, "not a YYYY-MM-DD date: " + text);
  return *d;
}

EventType to_event_type(const std::string& token) {
  const auto t = parse_event_type(token);
  if (!t) throw Error(ErrorKind::UnknownEventType, token);
  return *t;
}

Platform to_platform(const std::string& token) {
  const auto p = parse_platform(token);
  if (!p) throw Error(ErrorKind::InvalidArgument, "unknown platform: " + token);
  return *p;
}

LogFormat to_format(const std::string& token) {
  const auto f = parse_log_format(token);
  if (!f) throw Error(ErrorKind::InvalidArgument, "format must be csv or jsonl");
  return *f;
}

std::vector<Point> to_point_list(const std::vector<std::vector<double>>& rows) {
  std::vector<Point> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (r.size() != kFeatureDim) throw Error(ErrorKind::InvalidArgument, "each point needs 4 coordinates");
    out.push_back({r[0], r[1], r[2], r[3]});
  }
  return out;
}

std::vector<std::vector<double>> from_point_list(std::span<const Point> pts) {
  std::vector<std::vector<double>> out;
  for (const auto& p : pts) out.emplace_back(p.begin(), p.end());
  return out;
}

std::string dump_model(const KMeansModel& m) { return model_to_json(m).dump(2); }

py::dict outcome_dict(const RunOutcome& o) {
  py::dict d;
  d["report"] = py::module_::import("json").attr("loads")(o.report.to_json().dump());
  d["cluster_names"] = o.cluster_names;
  d["assignments"] = o.assignments;
  d["features"] = o.features;
  d["model"] = o.model;
  d["events_loaded"] = o.events_loaded;
  return d;
}

RunConfig config_from(const std::string& text) {
  return parse_run_config(KeyValueDoc::parse(text));
}

PyObject* g_error_type = nullptr;

}  // namespace

PYBIND11_MODULE(_rfme, m) {
  m.doc() = "RFME customer segmentation engine";

  g_error_type = PyErr_NewException("rfme.RfmeError", PyExc_ValueError, nullptr);
  m.attr("RfmeError") = py::handle(g_error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(g_error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(g_error_type, exc.ptr());
    }
  });

  py::class_<UserEvent>(m, "UserEvent")
      .def(py::init([](std::string user, const std::string& ts, const std::string& type,
                       const std::string& platform) {
             return UserEvent{std::move(user), to_instant(ts), to_event_type(type), to_platform(platform)};
           }),
           py::arg("user_id"), py::arg("timestamp"), py::arg("event_type"), py::arg("platform") = "web")
      .def_readonly("user_id", &UserEvent::user_id)
      .def_property_readonly("timestamp", [](const UserEvent& e) { return format_rfc3339(e.timestamp); })
      .def_property_readonly("event_type", [](const UserEvent& e) { return std::string(to_token(e.event_type)); })
      .def_property_readonly("platform", [](const UserEvent& e) { return std::string(to_token(e.platform)); })
      .def("__eq__", [](const UserEvent& a, const UserEvent& b) { return a == b; })
      .def("__repr__", [](const UserEvent& e) {
        return "UserEvent(" + e.user_id + ", " + format_rfc3339(e.timestamp) + ", " +
               std::string(to_token(e.event_type)) + ", " + std::string(to_token(e.platform)) + ")";
      });

  py::class_<Session>(m, "Session")
      .def_readonly("user_id", &Session::user_id)
      .def_property_readonly("start", [](const Session& s) { return format_rfc3339(s.start); })
      .def_property_readonly("end", [](const Session& s) { return format_rfc3339(s.end); })
      .def_readonly("event_count", &Session::event_count)
      .def_readonly("activity_flags", &Session::activity_flags)
      .def_readonly("pdp_view_count", &Session::pdp_view_count)
      .def_readonly("lead_drop_count", &Session::lead_drop_count);

  py::class_<RfmeVector>(m, "RfmeVector")
      .def_readonly("user_id", &RfmeVector::user_id)
      .def_readonly("recency", &RfmeVector::recency)
      .def_readonly("frequency", &RfmeVector::frequency)
      .def_readonly("monetary", &RfmeVector::monetary)
      .def_readonly("engagement", &RfmeVector::engagement)
      .def("as_tuple", [](const RfmeVector& v) {
        return py::make_tuple(v.recency, v.frequency, v.monetary, v.engagement);
      })
      .def("__repr__", [](const RfmeVector& v) {
        return "RfmeVector(" + v.user_id + ", R=" + std::to_string(v.recency) + ", F=" +
               std::to_string(v.frequency) + ", M=" + std::to_string(v.monetary) + ", E=" +
               std::to_string(v.engagement) + ")";
      });

  py::class_<KMeansModel>(m, "KMeansModel")
      .def_readonly("k", &KMeansModel::k)
      .def_property_readonly("centroids", [](const KMeansModel& mo) { return from_point_list(mo.centroids); })
      .def_property_readonly("raw_centroids",
                             [](const KMeansModel& mo) { return from_point_list(mo.raw_centroids()); })
      .def_readonly("standardized", &KMeansModel::standardized)
      .def_readonly("converged", &KMeansModel::converged)
      .def_readonly("iterations_run", &KMeansModel::iterations_run)
      .def_readonly("wcss", &KMeansModel::wcss)
      .def("to_json", &dump_model)
      .def_static("from_json", [](const std::string& text) { return model_from_json(nlohmann::json::parse(text)); });

  m.def("parse_event_line",
        [](const std::string& line, const std::string& format) { return parse_event_line(line, to_format(format)); },
        py::arg("line"), py::arg("format") = "csv");

  m.def("load_event_log",
        [](const std::filesystem::path& path, const std::string& format, int workers) {
          auto loaded = load_event_log(path, to_format(format), LoadOptions{workers});
          std::map<std::string, std::vector<std::size_t>> rejected;
          for (const auto& [kind, lines] : loaded.rejections.lines) {
            rejected[std::string(to_string(kind))] = lines;
          }
          return py::make_tuple(loaded.log.events(), rejected);
        },
        py::arg("path"), py::arg("format") = "csv", py::arg("workers") = 1,
        "Returns (events, rejected line numbers by error kind).");

  m.def("write_event_log",
        [](const std::filesystem::path& path, const std::vector<UserEvent>& events, const std::string& format) {
          write_event_log(path, events, to_format(format));
        },
        py::arg("path"), py::arg("events"), py::arg("format") = "csv");

  m.def("sessionize",
        [](const std::vector<UserEvent>& events, int gap_minutes, int workers) {
          return sessionize(events, std::chrono::minutes{gap_minutes}, workers);
        },
        py::arg("events"), py::arg("gap_minutes") = 30, py::arg("workers") = 1);

  m.def("compute_monetary", [](std::int64_t pdp, std::int64_t leads) { return compute_monetary(pdp, leads); },
        py::arg("pdp_views"), py::arg("leads"));

  m.def("build_feature_matrix",
        [](const std::vector<UserEvent>& events, const std::string& reference_date, int window_days,
           int gap_minutes, std::int64_t pdp_weight, std::int64_t lead_weight, int workers) {
          FeatureOptions o{std::chrono::minutes{gap_minutes}, MonetaryWeights{pdp_weight, lead_weight}, workers};
          return build_feature_matrix(events, WindowSpec{to_date(reference_date), window_days}, o);
        },
        py::arg("events"), py::arg("reference_date"), py::arg("window_days") = kDefaultWindowDays,
        py::arg("gap_minutes") = 30, py::arg("pdp_weight") = 1, py::arg("lead_weight") = 7,
        py::arg("workers") = 1);

  m.def("kmeans_fit",
        [](const std::vector<std::vector<double>>& points, int k, std::uint64_t seed, int n_init, int max_iter,
           double tol, bool standardize, int workers) {
          const auto fit = kmeans_fit(to_point_list(points),
                                      KMeansOptions{k, seed, n_init, max_iter, tol, standardize, workers});
          return py::make_tuple(fit.model, fit.assignments);
        },
        py::arg("points"), py::arg("k"), py::arg("seed"), py::arg("n_init") = 10, py::arg("max_iter") = 300,
        py::arg("tol") = 1e-4, py::arg("standardize") = true, py::arg("workers") = 1,
        "Returns (model, assignments).");

  m.def("kmeans_predict",
        [](const KMeansModel& model, const std::vector<std::vector<double>>& points) {
          return kmeans_predict(model, to_point_list(points));
        },
        py::arg("model"), py::arg("points"));

  m.def("elbow_curve",
        [](const std::vector<std::vector<double>>& points, int k_min, int k_max, std::uint64_t seed, int n_init,
           bool standardize, int workers) {
          ElbowOptions o;
          o.k_min = k_min;
          o.k_max = k_max;
          o.seed = seed;
          o.n_init = n_init;
          o.standardize = standardize;
          o.workers = workers;
          const auto curve = elbow_curve(to_point_list(points), o);
          std::vector<std::pair<int, double>> pts;
          for (const auto& p : curve.points) pts.emplace_back(p.k, p.wcss);
          return py::make_tuple(pts, curve.selected_k);
        },
        py::arg("points"), py::arg("k_min") = 1, py::arg("k_max") = 7, py::arg("seed") = 0,
        py::arg("n_init") = 10, py::arg("standardize") = true, py::arg("workers") = 1,
        "Returns ([(k, wcss), ...], selected_k).");

  m.def("label_clusters",
        [](const std::vector<std::vector<double>>& means) {
          const auto pts = to_point_list(means);
          std::vector<ClusterProfile> profiles;
          for (std::size_t i = 0; i < pts.size(); ++i) profiles.push_back({static_cast<int>(i), pts[i], 0, 0.0});
          std::vector<std::string> out;
          for (auto s : label_clusters(profiles)) out.emplace_back(to_token(s));
          return out;
        },
        py::arg("means"), "Segment name for each (recency, frequency, monetary, engagement) mean row.");

  m.def("generate",
        [](const std::string& spec_text, std::optional<std::size_t> n_users, std::optional<std::uint64_t> seed) {
          auto doc = KeyValueDoc::parse(spec_text, ErrorKind::InvalidSpec);
          if (n_users) doc.set("n_users", std::to_string(*n_users));
          if (seed) doc.set("seed", std::to_string(*seed));
          auto result = generate(parse_synth_config(doc));
          std::map<std::string, std::string> truth;
          for (const auto& [user, seg] : result.truth) truth[user] = std::string(to_token(seg));
          return py::make_tuple(result.log.events(), truth);
        },
        py::arg("spec") = "preset = four_segment\n", py::arg("n_users") = py::none(), py::arg("seed") = py::none(),
        "Synthetic log from a key = value generator spec. Returns (events, {user_id: segment}).");

  m.def("adjusted_rand_index",
        [](const std::map<std::string, std::string>& a, const std::map<std::string, std::string>& b) {
          return adjusted_rand_index(a, b);
        },
        py::arg("a"), py::arg("b"));
  m.def("cluster_purity",
        [](const std::map<std::string, std::string>& clusters, const std::map<std::string, std::string>& truth) {
          return cluster_purity(clusters, truth);
        },
        py::arg("clusters"), py::arg("truth"));

  m.def("run_train", [](const std::string& config_text) { return outcome_dict(run_train(config_from(config_text))); },
        py::arg("config"), "Train from a key = value run configuration; writes the usual artifacts.");
  m.def("run_score",
        [](const std::string& config_text, const std::filesystem::path& model) {
          return outcome_dict(run_score(config_from(config_text), model));
        },
        py::arg("config"), py::arg("model"));
}
