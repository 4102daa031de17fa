#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "rfme/features.hpp"
#include "rfme/metrics.hpp"
#include "rfme/synth.hpp"
#include "test_support.hpp"

using namespace rfme;

namespace {

ErrorKind error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

SynthConfig segment_config(std::size_t n, std::uint64_t seed) {
  SynthConfig c;
  c.archetypes = four_segment_archetypes();
  c.n_users = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("apportion") {
  CHECK(apportion(std::vector<double>{0.25, 0.25, 0.25, 0.25}, 100) ==
        std::vector<std::size_t>{25, 25, 25, 25});
  CHECK(apportion(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}, 100) ==
        std::vector<std::size_t>{34, 33, 33});
  CHECK(apportion(std::vector<double>{0.05, 0.5, 0.2, 0.25}, 7) == std::vector<std::size_t>{0, 4, 1, 2});
}

TEST_CASE("generate: counts, determinism, window") {
  SynthConfig c;
  for (auto s : kAllSegments) {
    ArchetypeSpec a;
    a.segment = s;
    a.user_share = 0.25;
    a.visit_rate = 3;
    a.recency_min = 0;
    a.recency_max = 44;
    a.activity_prob = {0.5, 0.5, 0.5, 0.5, 0.5};
    c.archetypes.push_back(a);
  }
  c.n_users = 100;
  c.seed = 11;
  const auto r = generate(c);
  CHECK(r.truth.size() == 100);
  std::map<Segment, int> per;
  for (const auto& [u, s] : r.truth) ++per[s];
  for (auto s : kAllSegments) CHECK(per[s] == 25);

  const auto again = generate(c);
  CHECK(again.log.events() == r.log.events());
  CHECK(again.truth == r.truth);
  c.seed = 12;
  CHECK(generate(c).log.events() != r.log.events());

  std::set<std::string> with_events;
  for (const auto& e : r.log.events()) {
    CHECK(c.window.contains(utc_date(e.timestamp)));
    with_events.insert(e.user_id);
  }
  CHECK(with_events.size() == 100);
}

TEST_CASE("zero lead probability produces no leads") {
  auto c = segment_config(2000, 3);
  c.archetypes[2].activity_prob[*activity_index(EventType::LeadDropped)] = 0.0;
  const auto r = generate(c);
  std::size_t leads_total = 0;
  for (const auto& e : r.log.events()) {
    if (e.event_type != EventType::LeadDropped) continue;
    ++leads_total;
    CHECK(r.truth.at(e.user_id) != Segment::NeedsAttention);
  }
  CHECK(leads_total > 0);
}

TEST_CASE("generated feature means match the archetype expectations") {
  // Per session: frequency counts 1; engagement adds each flag with its
  // probability; a PDP-active session contributes its expected view count,
  // a lead-active session its expected lead count times the lead weight.
  auto c = segment_config(40000, 21);
  const auto r = generate(c);
  const auto features = build_feature_matrix(r.log, c.window);
  CHECK(features.size() == c.n_users);

  std::map<Segment, std::array<double, 4>> sum;
  std::map<Segment, int> count;
  for (const auto& f : features) {
    const auto s = r.truth.at(f.user_id);
    sum[s][0] += static_cast<double>(f.recency);
    sum[s][1] += static_cast<double>(f.frequency);
    sum[s][2] += static_cast<double>(f.monetary);
    sum[s][3] += static_cast<double>(f.engagement);
    ++count[s];
  }
  for (const auto& a : c.archetypes) {
    REQUIRE(count[a.segment] >= 2000);
    const auto& p = a.activity_prob;
    const double rate = a.visit_rate;
    const std::array<double, 4> expected = {
        (a.recency_min + a.recency_max) / 2.0, rate,
        rate * (p[1] * a.mean_pdp_views * 1.0 + p[2] * a.mean_leads * 7.0),
        rate * (p[0] + p[1] + p[2] + p[3] + p[4])};
    for (int f = 0; f < 4; ++f) {
      const double mean = sum[a.segment][static_cast<std::size_t>(f)] / count[a.segment];
      INFO(to_token(a.segment), " feature ", f, " mean ", mean, " expected ", expected[static_cast<std::size_t>(f)]);
      CHECK(std::abs(mean - expected[static_cast<std::size_t>(f)]) <= 0.10 * expected[static_cast<std::size_t>(f)]);
    }
  }
}

TEST_CASE("invalid specs") {
  auto c = segment_config(10, 0);
  c.archetypes[0].user_share = 0.5;
  CHECK(error_of([&] { generate(c); }) == ErrorKind::InvalidSpec);
  c = segment_config(10, 0);
  c.archetypes[1].activity_prob[0] = 1.5;
  CHECK(error_of([&] { generate(c); }) == ErrorKind::InvalidSpec);
  c = segment_config(10, 0);
  c.archetypes[1].recency_max = 45;
  CHECK(error_of([&] { generate(c); }) == ErrorKind::InvalidSpec);
  c = segment_config(0, 0);
  CHECK(error_of([&] { generate(c); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("spec document round trip") {
  auto c = segment_config(1234, 99);
  c.platform = Platform::Web;
  c.archetypes[3].mean_leads = 1.25;
  const auto back = parse_synth_config(KeyValueDoc::parse(format_synth_config(c)));
  CHECK(back.n_users == 1234);
  CHECK(back.seed == 99);
  CHECK(back.platform == Platform::Web);
  CHECK(back.window.reference_date == c.window.reference_date);
  REQUIRE(back.archetypes.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(back.archetypes[i].segment == c.archetypes[i].segment);
    CHECK(back.archetypes[i].user_share == c.archetypes[i].user_share);
    CHECK(back.archetypes[i].activity_prob == c.archetypes[i].activity_prob);
    CHECK(back.archetypes[i].mean_leads == c.archetypes[i].mean_leads);
    CHECK(back.archetypes[i].recency_min == c.archetypes[i].recency_min);
  }
  CHECK(error_of([] { parse_synth_config(KeyValueDoc::parse("preset = nope\n")); }) == ErrorKind::InvalidSpec);
  CHECK(error_of([] { parse_synth_config(KeyValueDoc::parse("n_users = many\n")); }) == ErrorKind::InvalidSpec);
}

TEST_CASE("adjusted_rand_index") {
  const std::vector<int> a = {0, 0, 1, 1, 2, 2};
  CHECK(adjusted_rand_index(a, a) == 1.0);
  CHECK(adjusted_rand_index(a, std::vector<int>{5, 5, 3, 3, 9, 9}) == doctest::Approx(1.0));
  CHECK(adjusted_rand_index(std::vector<int>{0, 0, 0}, std::vector<int>{1, 1, 1}) == 1.0);
  CHECK(adjusted_rand_index(std::vector<int>{0, 0, 1, 1}, std::vector<int>{0, 1, 0, 1}) ==
        doctest::Approx(-0.5));
  CHECK(error_of([&] { adjusted_rand_index(a, std::vector<int>{0}); }) == ErrorKind::KeyMismatch);

  std::mt19937_64 gen(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + gen() % 40;
    std::vector<int> x(n), y(n);
    const int kx = 1 + static_cast<int>(gen() % 5), ky = 1 + static_cast<int>(gen() % 5);
    for (auto& v : x) v = static_cast<int>(gen() % static_cast<unsigned>(kx));
    for (auto& v : y) v = static_cast<int>(gen() % static_cast<unsigned>(ky));
    const double ari = adjusted_rand_index(x, y);
    CHECK(ari == doctest::Approx(oracle::pairwise_ari(x, y)).epsilon(1e-9));
    CHECK(ari == doctest::Approx(adjusted_rand_index(y, x)).epsilon(1e-12));
    CHECK(ari <= 1.0 + 1e-12);
  }
}

TEST_CASE("ARI of independent random labels is near zero") {
  std::vector<int> truth(10000);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = static_cast<int>(i % 4);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 gen(seed);
    std::vector<int> guess(truth.size());
    for (auto& g : guess) g = static_cast<int>(gen() % 4);
    worst = std::max(worst, std::abs(adjusted_rand_index(guess, truth)));
  }
  CHECK(worst < 0.02);
}

TEST_CASE("cluster_purity") {
  std::vector<int> truth(100);
  for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = static_cast<int>(i % 4);
  CHECK(cluster_purity(truth, truth) == 1.0);
  CHECK(cluster_purity(std::vector<int>(100, 0), truth) == 0.25);

  std::vector<int> clusters(100), classes(100);
  for (int i = 0; i < 100; ++i) {
    clusters[static_cast<std::size_t>(i)] = i < 50 ? 0 : 1;
    classes[static_cast<std::size_t>(i)] = i < 45 || (i >= 50 && i < 55) ? 0 : 1;
  }
  CHECK(cluster_purity(clusters, classes) == doctest::Approx(0.9));
  CHECK(error_of([] { cluster_purity(std::vector<int>{}, std::vector<int>{}); }) == ErrorKind::EmptyInput);
  CHECK(error_of([] { cluster_purity(std::vector<int>{1}, std::vector<int>{1, 2}); }) == ErrorKind::KeyMismatch);
}

TEST_CASE("keyed metrics and csv") {
  testing::TempDir dir("metrics");
  testing::write_file(dir / "truth.csv", "user_id,segment\na,x\nb,x\nc,y\nd,y\n");
  testing::write_file(dir / "pred.csv", "user_id,recency,segment\nd,1,p\nc,1,p\nb,2,q\na,9,q\n");
  const auto truth = read_labeling_csv(dir / "truth.csv");
  const auto pred = read_labeling_csv(dir / "pred.csv");
  CHECK(pred.at("a") == "q");
  CHECK(adjusted_rand_index(pred, truth) == 1.0);
  CHECK(cluster_purity(pred, truth) == 1.0);

  Labeling partial = truth;
  partial.erase("a");
  partial["z"] = "x";
  CHECK(error_of([&] { adjusted_rand_index(partial, truth); }) == ErrorKind::KeyMismatch);
}
