#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>

namespace rfme {

/// Adjusted Rand index of two label vectors over the same items (pair
/// counting on the contingency table). Two trivial partitions that agree give
/// 1.0. Throws KeyMismatch when the lengths differ.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

/// Fraction of items that fall in the majority truth class of their cluster.
/// Throws KeyMismatch on a length mismatch and EmptyInput for no items.
double cluster_purity(std::span<const int> clusters, std::span<const int> truth);

/// Item key -> label.
using Labeling = std::map<std::string, std::string>;

/// Keyed versions; both labelings must cover the same keys (KeyMismatch).
double adjusted_rand_index(const Labeling& a, const Labeling& b);
double cluster_purity(const Labeling& clusters, const Labeling& truth);

/// Reads `user_id,<...>` CSV with a header. The label is taken from the
/// `segment` column when present, otherwise from the second column.
Labeling read_labeling_csv(const std::filesystem::path& path);

}  // namespace rfme
