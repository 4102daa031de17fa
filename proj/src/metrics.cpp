#include "rfme/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "rfme/error.hpp"
#include "rfme/kv_config.hpp"

namespace rfme {
namespace {

double pairs(double n) { return n * (n - 1.0) / 2.0; }

/// Dense codes for arbitrary integer labels.
std::vector<std::size_t> encode(std::span<const int> labels, std::size_t& n_classes) {
  std::map<int, std::size_t> codes;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(codes.emplace(l, codes.size()).first->second);
  n_classes = codes.size();
  return out;
}

void require_same_length(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::KeyMismatch,
                "labelings cover " + std::to_string(a) + " and " + std::to_string(b) + " items");
  }
}

std::pair<std::vector<int>, std::vector<int>> align(const Labeling& a, const Labeling& b) {
  require_same_length(a.size(), b.size());
  std::map<std::string, int> names_a;
  std::map<std::string, int> names_b;
  std::vector<int> la;
  std::vector<int> lb;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw Error(ErrorKind::KeyMismatch, "key '" + ia->first + "' not in both labelings");
    la.push_back(names_a.emplace(ia->second, static_cast<int>(names_a.size())).first->second);
    lb.push_back(names_b.emplace(ib->second, static_cast<int>(names_b.size())).first->second);
  }
  return {std::move(la), std::move(lb)};
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) fields.emplace_back(trim(f));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  require_same_length(a.size(), b.size());
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::size_t ka = 0, kb = 0;
  const auto ca = encode(a, ka);
  const auto cb = encode(b, kb);
  std::vector<double> table(ka * kb, 0.0);
  std::vector<double> rows(ka, 0.0), cols(kb, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    table[ca[i] * kb + cb[i]] += 1.0;
    rows[ca[i]] += 1.0;
    cols[cb[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (double c : table) index += pairs(c);
  for (double r : rows) sum_rows += pairs(r);
  for (double c : cols) sum_cols += pairs(c);
  const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
  const double max_index = (sum_rows + sum_cols) / 2.0;
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

double cluster_purity(std::span<const int> clusters, std::span<const int> truth) {
  require_same_length(clusters.size(), truth.size());
  if (clusters.empty()) throw Error(ErrorKind::EmptyInput, "purity of an empty labeling");
  std::size_t kc = 0, kt = 0;
  const auto cc = encode(clusters, kc);
  const auto ct = encode(truth, kt);
  std::vector<std::size_t> table(kc * kt, 0);
  for (std::size_t i = 0; i < cc.size(); ++i) ++table[cc[i] * kt + ct[i]];
  std::size_t majority = 0;
  for (std::size_t c = 0; c < kc; ++c) {
    majority += *std::max_element(table.begin() + static_cast<std::ptrdiff_t>(c * kt),
                                  table.begin() + static_cast<std::ptrdiff_t>((c + 1) * kt));
  }
  return static_cast<double>(majority) / static_cast<double>(clusters.size());
}

double adjusted_rand_index(const Labeling& a, const Labeling& b) {
  const auto [la, lb] = align(a, b);
  return adjusted_rand_index(la, lb);
}

double cluster_purity(const Labeling& clusters, const Labeling& truth) {
  const auto [lc, lt] = align(clusters, truth);
  return cluster_purity(lc, lt);
}

Labeling read_labeling_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::EmptyInput, path.string() + " is empty");
  const auto header = split(std::string(trim(line)));
  std::size_t column = 1;
  if (const auto it = std::find(header.begin(), header.end(), "segment"); it != header.end()) {
    column = static_cast<std::size_t>(it - header.begin());
  }
  if (header.size() <= column || column == 0) {
    throw Error(ErrorKind::MalformedHeader, path.string() + ": need user_id and a label column");
  }
  Labeling labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(std::string(trim(line)));
    if (fields.size() <= column || fields[0].empty()) {
      throw Error(ErrorKind::MalformedRecord, path.string() + ":" + std::to_string(line_no));
    }
    if (!labels.emplace(fields[0], fields[column]).second) {
      throw Error(ErrorKind::MalformedRecord, path.string() + ": duplicate key " + fields[0]);
    }
  }
  return labels;
}

}  // namespace rfme
