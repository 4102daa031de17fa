#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "rfme/labeling.hpp"
#include "test_support.hpp"

using namespace rfme;

namespace {

using S = Segment;

std::vector<ClusterProfile> profiles_of(const std::vector<Point>& means) {
  std::vector<ClusterProfile> out;
  for (std::size_t i = 0; i < means.size(); ++i) {
    out.push_back({static_cast<int>(i), means[i], 10, 1.0 / static_cast<double>(means.size())});
  }
  return out;
}

/// Labels every ordering of the four rows and checks each row keeps its name.
void check_all_permutations(const std::vector<Point>& rows, const std::vector<Segment>& expected) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  int seen = 0;
  do {
    std::vector<Point> permuted;
    for (auto i : order) permuted.push_back(rows[i]);
    const auto labels = label_clusters(profiles_of(permuted));
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
      CHECK(labels[pos] == expected[order[pos]]);
    }
    ++seen;
  } while (std::next_permutation(order.begin(), order.end()));
  CHECK(seen == 24);
}

}  // namespace

TEST_CASE("segment tokens") {
  for (auto s : kAllSegments) CHECK(parse_segment(to_token(s)) == s);
  CHECK(to_token(S::NeedsAttention) == "needs_attention");
  CHECK_FALSE(parse_segment("vip"));
}

TEST_CASE("app training centroids keep their segment names") {
  check_all_permutations({{29, 3, 7, 3}, {19, 4, 7, 3}, {23, 20, 73, 25}, {24, 57, 242, 77}},
                         {S::NeedsActivation, S::NeedsAttention, S::Promising, S::HighValue});
}

TEST_CASE("web training centroids keep their segment names") {
  check_all_permutations({{26, 1, 2, 2}, {16, 2, 3, 3}, {21, 11, 31, 21}, {21, 41, 123, 75}},
                         {S::NeedsActivation, S::NeedsAttention, S::Promising, S::HighValue});
}

TEST_CASE("recency tie goes to the higher frequency") {
  check_all_permutations({{20, 2, 5, 2}, {20, 5, 5, 2}, {10, 30, 100, 30}, {10, 60, 200, 60}},
                         {S::NeedsActivation, S::NeedsAttention, S::Promising, S::HighValue});
}

TEST_CASE("composite tie goes to the higher monetary") {
  // Rows 2 and 3 share the same composite (F and M swap their normalized ranks).
  check_all_permutations({{5, 0, 0, 0}, {1, 0, 0, 0}, {9, 10, 0, 10}, {9, 0, 10, 10}},
                         {S::NeedsActivation, S::NeedsAttention, S::Promising, S::HighValue});
}

TEST_CASE("labels are a bijection and invariant to monetary scale") {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> v(0, 50);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Point> rows(4);
    for (auto& r : rows) {
      for (auto& x : r) x = v(gen);
    }
    const auto labels = label_clusters(profiles_of(rows));
    CHECK(std::set<Segment>(labels.begin(), labels.end()).size() == 4);

    auto scaled = rows;
    const double factor = 0.5 + static_cast<double>(gen() % 100);
    for (auto& r : scaled) r[2] *= factor;
    CHECK(label_clusters(profiles_of(scaled)) == labels);
  }
}

TEST_CASE("label_clusters requires four profiles") {
  for (std::size_t k : {0, 1, 3, 5}) {
    std::vector<Point> rows(k, Point{1, 1, 1, 1});
    try {
      label_clusters(profiles_of(rows));
      FAIL("expected WrongClusterCount");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::WrongClusterCount);
    }
  }
}

TEST_CASE("cluster_names") {
  const auto four = profiles_of({{29, 3, 7, 3}, {19, 4, 7, 3}, {23, 20, 73, 25}, {24, 57, 242, 77}});
  CHECK(cluster_names(four) ==
        std::vector<std::string>{"needs_activation", "needs_attention", "promising", "high_value"});
  const auto three = profiles_of({{1, 1, 1, 1}, {2, 2, 2, 2}, {3, 3, 3, 3}});
  CHECK(cluster_names(three) == std::vector<std::string>{"cluster-0", "cluster-1", "cluster-2"});
}

TEST_CASE("profile_clusters") {
  SUBCASE("means are raw arithmetic means") {
    const std::vector<RfmeVector> v = {{"a", 10, 2, 4, 2}, {"b", 20, 4, 10, 4}, {"c", 3, 3, 3, 3}};
    const auto p = profile_clusters(2, v, std::vector<int>{0, 0, 1});
    CHECK(p[0].means == Point{15, 3, 7, 3});
    CHECK(p[1].means == Point{3, 3, 3, 3});
    CHECK(p[0].count == 2);
    CHECK(p[0].cluster_id == 0);
    CHECK(p[1].cluster_id == 1);
  }
  SUBCASE("shares follow member counts") {
    std::vector<RfmeVector> v;
    std::vector<int> a;
    for (int c = 0; c < 4; ++c) {
      for (int i = 0; i < 10 * (c + 1); ++i) {
        v.push_back({"u", 1, 1, 1, 1});
        a.push_back(c);
      }
    }
    const auto p = profile_clusters(4, v, a);
    double total = 0;
    for (int c = 0; c < 4; ++c) {
      CHECK(p[static_cast<std::size_t>(c)].share == doctest::Approx(0.1 * (c + 1)).epsilon(1e-12));
      total += p[static_cast<std::size_t>(c)].share;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
  SUBCASE("empty cluster") {
    const std::vector<RfmeVector> v = {{"a", 1, 1, 1, 1}};
    try {
      profile_clusters(2, v, std::vector<int>{0});
      FAIL("expected EmptyCluster");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::EmptyCluster);
    }
    const auto p = profile_clusters(2, v, std::vector<int>{0}, true);
    CHECK(p[1].count == 0);
    CHECK(p[1].share == 0.0);
  }
}

TEST_CASE("segment report csv") {
  testing::TempDir dir("labels");
  const auto p = profiles_of({{29, 3, 7, 3}, {19, 4, 7, 3}, {23, 20, 73, 25}, {24, 57, 242, 77}});
  write_segment_report(dir / "s.csv", p, cluster_names(p));
  const auto text = testing::read_file(dir / "s.csv");
  CHECK(text.rfind(std::string(kSegmentCsvHeader) + "\n", 0) == 0);
  CHECK(text.find("\n3,high_value,24,57,242,77,10,0.25\n") != std::string::npos);
}
