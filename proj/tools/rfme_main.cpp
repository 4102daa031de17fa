// rfme: train / score / synth / eval front end.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "rfme/metrics.hpp"
#include "rfme/pipeline.hpp"
#include "rfme/synth.hpp"

namespace {

using rfme::KeyValueDoc;

/// Registers one string option per config key so `--key value` overrides
/// the same key from the config file.
void add_overrides(CLI::App& cmd, std::map<std::string, std::string>& overrides) {
  for (auto key : rfme::kRunConfigKeys) {
    const std::string name(key);
    cmd.add_option("--" + name, overrides[name], "override '" + name + "' from the config file");
  }
}

rfme::RunConfig build_config(const std::string& config_path, CLI::App& cmd,
                             const std::map<std::string, std::string>& overrides) {
  KeyValueDoc doc = config_path.empty() ? KeyValueDoc{} : KeyValueDoc::load(config_path);
  for (const auto& [key, value] : overrides) {
    if (cmd.count("--" + key) > 0) doc.set(key, value);
  }
  return rfme::parse_run_config(doc);
}

void print_outcome(const rfme::RunOutcome& out) {
  const auto& r = out.report;
  std::cerr << "loaded " << out.events_loaded << " events";
  if (!out.rejections.empty()) {
    std::cerr << ", rejected " << out.rejections.total() << " records (";
    bool first = true;
    for (const auto& [kind, lines] : out.rejections.lines) {
      std::cerr << (first ? "" : ", ") << rfme::to_string(kind) << ": " << lines.size();
      first = false;
    }
    std::cerr << ")";
  }
  std::cerr << "\n";
  std::cout << r.split << ": " << r.users << " users, reference " << rfme::format_date(r.reference_date)
            << ", window " << r.window_effective << "d" << (r.window_clipped() ? " (clipped)" : "")
            << ", k=" << r.k << "\n";
  for (std::size_t i = 0; i < r.profiles.size(); ++i) {
    const auto& p = r.profiles[i];
    std::printf("  %-18s n=%-8zu R=%.1f F=%.1f M=%.1f E=%.1f\n", r.names[i].c_str(), p.count,
                p.means[0], p.means[1], p.means[2], p.means[3]);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RFME customer segmentation"};
  app.require_subcommand(1);

  std::string train_config;
  std::map<std::string, std::string> train_overrides;
  auto* train = app.add_subcommand("train", "fit the segmentation model on the train span");
  train->add_option("--config", train_config, "key = value run configuration")->check(CLI::ExistingFile);
  add_overrides(*train, train_overrides);

  std::string score_config;
  std::string model_path;
  std::map<std::string, std::string> score_overrides;
  auto* score = app.add_subcommand("score", "assign test-span users to trained segments");
  score->add_option("--config", score_config, "key = value run configuration")->check(CLI::ExistingFile);
  score->add_option("--model", model_path, "model.json written by train")->required();
  add_overrides(*score, score_overrides);

  std::string spec_path;
  std::string out_dir;
  std::string synth_format = "csv";
  std::optional<std::size_t> n_users;
  std::optional<std::uint64_t> synth_seed;
  auto* synth = app.add_subcommand("synth", "generate a labelled synthetic clickstream");
  synth->add_option("--spec", spec_path, "generator spec (key = value)")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_option("--format", synth_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  synth->add_option("--n_users", n_users, "override n_users");
  synth->add_option("--seed", synth_seed, "override seed");

  std::string pred_path;
  std::string truth_path;
  auto* eval = app.add_subcommand("eval", "compare predicted segments with ground truth");
  eval->add_option("--pred", pred_path, "CSV with user_id and a segment column")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path, "ground truth CSV (user_id,segment)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      print_outcome(rfme::run_train(build_config(train_config, *train, train_overrides)));
    } else if (score->parsed()) {
      print_outcome(rfme::run_score(build_config(score_config, *score, score_overrides), model_path));
    } else if (synth->parsed()) {
      auto doc = KeyValueDoc::load(spec_path, rfme::ErrorKind::InvalidSpec);
      if (n_users) doc.set("n_users", std::to_string(*n_users));
      if (synth_seed) doc.set("seed", std::to_string(*synth_seed));
      const auto config = rfme::parse_synth_config(doc);
      const auto result = rfme::generate(config);
      std::filesystem::create_directories(out_dir);
      const auto format = *rfme::parse_log_format(synth_format);
      const auto events_path = std::filesystem::path(out_dir) / ("events." + synth_format);
      rfme::write_event_log(events_path, result.log.events(), format);
      rfme::write_ground_truth(std::filesystem::path(out_dir) / "ground_truth.csv", result.truth);
      std::cout << "wrote " << result.log.size() << " events for " << result.truth.size()
                << " users to " << events_path.string() << "\n";
    } else if (eval->parsed()) {
      const auto pred = rfme::read_labeling_csv(pred_path);
      const auto truth = rfme::read_labeling_csv(truth_path);
      std::printf("{\"n\": %zu, \"ari\": %.6f, \"purity\": %.6f}\n", pred.size(),
                  rfme::adjusted_rand_index(pred, truth), rfme::cluster_purity(pred, truth));
    }
  } catch (const rfme::Error& e) {
    std::cerr << "rfme: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rfme: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
