#include "rfme/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "rfme/format.hpp"
#include "rfme/random.hpp"

namespace rfme {
namespace {

constexpr int kSlotsPerDay = 24;
constexpr std::uint64_t kShuffleStream = ~std::uint64_t{0};

constexpr std::array<std::string_view, kActivityCount> kProbKeys = {"p_filter", "p_pdp", "p_lead",
                                                                    "p_crf", "p_shortlist"};

void emit_session(const std::string& user_id, Instant start, const ArchetypeSpec& spec,
                  Platform platform, Rng& rng, std::vector<UserEvent>& out) {
  std::vector<EventType> types{EventType::OtherVisit};
  const auto& p = spec.activity_prob;
  if (rng.bernoulli(p[0])) types.push_back(EventType::FilterApplied);
  if (rng.bernoulli(p[1])) {
    const auto views = 1 + rng.poisson(spec.mean_pdp_views - 1.0);
    types.insert(types.end(), views, EventType::PdpView);
  }
  if (rng.bernoulli(p[4])) types.push_back(EventType::Shortlisted);
  if (rng.bernoulli(p[3])) types.push_back(EventType::CrfOpened);
  if (rng.bernoulli(p[2])) {
    const auto leads = 1 + rng.poisson(spec.mean_leads - 1.0);
    types.insert(types.end(), leads, EventType::LeadDropped);
  }
  // A session lasts at most ~20 minutes inside its hourly slot, leaving a
  // gap of more than 30 minutes before the next slot.
  const long spacing = types.size() > 60 ? std::max<long>(1, 600 / static_cast<long>(types.size())) : 10;
  for (std::size_t i = 0; i < types.size(); ++i) {
    out.push_back(UserEvent{user_id, start + std::chrono::seconds{spacing * static_cast<long>(i)},
                            types[i], platform});
  }
}

std::string user_id_for(std::size_t index, std::size_t n_users) {
  const std::string digits = std::to_string(index + 1);
  const std::size_t width = std::max<std::size_t>(6, std::to_string(n_users).size());
  return "u" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

double number(const KeyValueDoc& doc, const std::string& key, double fallback) {
  const auto v = doc.get(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double x = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(key);
    return x;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidSpec, "key '" + key + "' is not a number: " + *v);
  }
}

}  // namespace

std::vector<ArchetypeSpec> four_segment_archetypes() {
  return {
      {Segment::HighValue, 0.05, 57.0, 22, 26, {0.35, 0.55, 0.12, 0.13, 0.20}, 5.73, 1.3},
      {Segment::Promising, 0.50, 20.0, 21, 25, {0.35, 0.50, 0.10, 0.12, 0.18}, 5.62, 1.2},
      {Segment::NeedsAttention, 0.20, 4.0, 17, 21, {0.20, 0.40, 0.03, 0.04, 0.08}, 3.85, 1.0},
      {Segment::NeedsActivation, 0.25, 3.0, 27, 31, {0.30, 0.50, 0.05, 0.05, 0.10}, 3.96, 1.0},
  };
}

std::vector<std::size_t> apportion(std::span<const double> shares, std::size_t n) {
  std::vector<std::size_t> counts(shares.size());
  std::vector<double> remainders(shares.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double quota = shares[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(quota));
    remainders[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % order.size()) {
    ++counts[order[i]];
    ++assigned;
  }
  while (assigned > n) {
    // Only reachable through rounding when shares sum slightly above 1.
    auto it = std::max_element(counts.begin(), counts.end());
    --*it;
    --assigned;
  }
  return counts;
}

void validate_archetypes(std::span<const ArchetypeSpec> specs, int window_days) {
  if (specs.empty()) throw Error(ErrorKind::InvalidSpec, "no archetypes");
  double total = 0.0;
  for (const auto& s : specs) {
    const std::string name(to_token(s.segment));
    if (!(s.user_share >= 0.0 && s.user_share <= 1.0)) {
      throw Error(ErrorKind::InvalidSpec, name + ": share outside [0, 1]");
    }
    total += s.user_share;
    if (!(s.visit_rate >= 1.0)) throw Error(ErrorKind::InvalidSpec, name + ": visit_rate must be >= 1");
    if (!(s.mean_pdp_views >= 1.0) || !(s.mean_leads >= 1.0)) {
      throw Error(ErrorKind::InvalidSpec, name + ": per-session means must be >= 1");
    }
    for (double p : s.activity_prob) {
      if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidSpec, name + ": probability outside [0, 1]");
    }
    if (s.recency_min < 0 || s.recency_max < s.recency_min || s.recency_max > window_days - 1) {
      throw Error(ErrorKind::InvalidSpec,
                  name + ": recency band must satisfy 0 <= min <= max <= window_days - 1");
    }
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorKind::InvalidSpec, "shares must sum to 1");
}

SynthResult generate(const SynthConfig& config) {
  if (config.n_users < 1) throw Error(ErrorKind::InvalidSpec, "n_users must be >= 1");
  if (config.window.window_days < 1) throw Error(ErrorKind::InvalidSpec, "window_days must be >= 1");
  validate_archetypes(config.archetypes, config.window.window_days);

  std::vector<double> shares;
  for (const auto& a : config.archetypes) shares.push_back(a.user_share);
  const auto counts = apportion(shares, config.n_users);
  std::vector<std::size_t> archetype_of;
  archetype_of.reserve(config.n_users);
  for (std::size_t a = 0; a < counts.size(); ++a) archetype_of.insert(archetype_of.end(), counts[a], a);
  Rng shuffle_rng(mix_seed(config.seed, kShuffleStream));
  for (std::size_t i = archetype_of.size(); i > 1; --i) {
    std::swap(archetype_of[i - 1], archetype_of[shuffle_rng.below(i)]);
  }

  const Date first_day = config.window.first_day();
  SynthResult result;
  std::vector<UserEvent> events;
  std::vector<int> slots;
  for (std::size_t u = 0; u < config.n_users; ++u) {
    const auto& spec = config.archetypes[archetype_of[u]];
    const std::string user_id = user_id_for(u, config.n_users);
    result.truth.emplace(user_id, spec.segment);
    Rng rng(mix_seed(config.seed, u));

    const int recency = static_cast<int>(rng.between(spec.recency_min, spec.recency_max));
    const int days_available = config.window.window_days - recency;
    const int capacity = days_available * kSlotsPerDay;
    const auto wanted = 1 + rng.poisson(spec.visit_rate - 1.0);
    const int n_sessions = static_cast<int>(std::min<std::uint64_t>(wanted, static_cast<std::uint64_t>(capacity)));

    // The last session sits on the last-visit day; the rest take distinct
    // slots anywhere up to that day.
    const int last_slot = (days_available - 1) * kSlotsPerDay + static_cast<int>(rng.below(kSlotsPerDay));
    slots.clear();
    for (int s = 0; s < capacity; ++s) {
      if (s != last_slot) slots.push_back(s);
    }
    for (int i = 0; i < n_sessions - 1; ++i) {
      const auto j = static_cast<std::size_t>(i) + rng.below(slots.size() - static_cast<std::size_t>(i));
      std::swap(slots[static_cast<std::size_t>(i)], slots[j]);
    }
    slots.resize(static_cast<std::size_t>(n_sessions - 1));
    slots.push_back(last_slot);
    std::sort(slots.begin(), slots.end());

    for (int slot : slots) {
      const Instant start = Instant{first_day} + std::chrono::days{slot / kSlotsPerDay} +
                            std::chrono::hours{slot % kSlotsPerDay} +
                            std::chrono::minutes{rng.below(10)};
      emit_session(user_id, start, spec, config.platform, rng, events);
    }
  }
  result.log = EventLog(std::move(events));
  return result;
}

SynthConfig parse_synth_config(const KeyValueDoc& doc) {
  SynthConfig config;
  const auto preset = doc.get("preset").value_or("four_segment");
  if (preset == "four_segment") {
    config.archetypes = four_segment_archetypes();
  } else if (preset != "none") {
    throw Error(ErrorKind::InvalidSpec, "unknown preset '" + preset + "'");
  }

  if (const auto v = doc.get("archetypes")) {
    std::vector<ArchetypeSpec> selected;
    std::stringstream list(*v);
    std::string token;
    while (std::getline(list, token, ',')) {
      const auto seg = parse_segment(trim(token));
      if (!seg) throw Error(ErrorKind::InvalidSpec, "unknown segment '" + token + "'");
      const auto it = std::find_if(config.archetypes.begin(), config.archetypes.end(),
                                   [&](const ArchetypeSpec& a) { return a.segment == *seg; });
      selected.push_back(it != config.archetypes.end() ? *it : ArchetypeSpec{*seg});
    }
    config.archetypes = std::move(selected);
  }

  for (auto& a : config.archetypes) {
    const std::string prefix = std::string(to_token(a.segment)) + ".";
    a.user_share = number(doc, prefix + "share", a.user_share);
    a.visit_rate = number(doc, prefix + "visit_rate", a.visit_rate);
    a.recency_min = static_cast<int>(number(doc, prefix + "recency_min", a.recency_min));
    a.recency_max = static_cast<int>(number(doc, prefix + "recency_max", a.recency_max));
    for (std::size_t i = 0; i < kActivityCount; ++i) {
      a.activity_prob[i] = number(doc, prefix + std::string(kProbKeys[i]), a.activity_prob[i]);
    }
    a.mean_pdp_views = number(doc, prefix + "mean_pdp_views", a.mean_pdp_views);
    a.mean_leads = number(doc, prefix + "mean_leads", a.mean_leads);
  }

  const double n_users = number(doc, "n_users", static_cast<double>(config.n_users));
  if (n_users < 1 || n_users != std::floor(n_users)) throw Error(ErrorKind::InvalidSpec, "n_users must be a positive integer");
  config.n_users = static_cast<std::size_t>(n_users);
  if (const auto v = doc.get("seed")) {
    try {
      config.seed = std::stoull(*v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidSpec, "seed must be an unsigned integer");
    }
  }
  if (const auto v = doc.get("reference_date")) {
    const auto d = parse_date(*v);
    if (!d) throw Error(ErrorKind::InvalidSpec, "reference_date must be YYYY-MM-DD");
    config.window.reference_date = *d;
  }
  config.window.window_days = static_cast<int>(number(doc, "window_days", config.window.window_days));
  if (const auto v = doc.get("platform")) {
    const auto p = parse_platform(*v);
    if (!p) throw Error(ErrorKind::InvalidSpec, "platform must be web or app");
    config.platform = *p;
  }
  validate_archetypes(config.archetypes, config.window.window_days);
  return config;
}

std::string format_synth_config(const SynthConfig& config) {
  std::ostringstream out;
  out << "preset = none\n";
  out << "n_users = " << config.n_users << "\n";
  out << "seed = " << config.seed << "\n";
  out << "reference_date = " << format_date(config.window.reference_date) << "\n";
  out << "window_days = " << config.window.window_days << "\n";
  out << "platform = " << to_token(config.platform) << "\n";
  out << "archetypes = ";
  for (std::size_t i = 0; i < config.archetypes.size(); ++i) {
    out << (i ? "," : "") << to_token(config.archetypes[i].segment);
  }
  out << "\n";
  for (const auto& a : config.archetypes) {
    const std::string p(to_token(a.segment));
    out << "\n" << p << ".share = " << format_double(a.user_share) << "\n";
    out << p << ".visit_rate = " << format_double(a.visit_rate) << "\n";
    out << p << ".recency_min = " << a.recency_min << "\n";
    out << p << ".recency_max = " << a.recency_max << "\n";
    for (std::size_t i = 0; i < kActivityCount; ++i) {
      out << p << "." << kProbKeys[i] << " = " << format_double(a.activity_prob[i]) << "\n";
    }
    out << p << ".mean_pdp_views = " << format_double(a.mean_pdp_views) << "\n";
    out << p << ".mean_leads = " << format_double(a.mean_leads) << "\n";
  }
  return out.str();
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << "user_id,segment\n";
  for (const auto& [user, segment] : truth) out << user << ',' << to_token(segment) << '\n';
  if (!out) throw Error(ErrorKind::Io, "write failure on " + path.string());
}

}  // namespace rfme
