#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <mutex>

#include "hetlab/analysis.hpp"
#include "hetlab/parallel.hpp"
#include "hetlab/rng.hpp"
#include "json.hpp"

namespace hetlab {

std::string_view to_string(SearchMode m) {
  return m == SearchMode::Table1Literal ? "table1_literal" : "direct_conditions";
}

SearchMode search_mode_from_string(std::string_view s) {
  if (s == "table1_literal") return SearchMode::Table1Literal;
  if (s == "direct_conditions") return SearchMode::DirectConditions;
  throw Error(ErrorCode::Config, "unknown search mode \"" + std::string(s) +
                                     "\" (expected table1_literal or direct_conditions)");
}

CoefficientBox CoefficientBox::point(const CoefficientSet& c) {
  CoefficientBox box;
  for (std::size_t k = 0; k < kCoefficientCount; ++k) {
    const double v = c.*kCoefficientFields[k].second;
    box.bounds[k] = {v, v};
  }
  return box;
}

bool CoefficientBox::valid() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const auto& b) {
    return std::isfinite(b.first) && std::isfinite(b.second) && b.first <= b.second;
  });
}

std::string box_to_json(const CoefficientBox& box, int indent) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < kCoefficientCount; ++k)
    j[std::string(kCoefficientFields[k].first)] = {box.bounds[k].first, box.bounds[k].second};
  return j.dump(indent);
}

CoefficientBox box_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("malformed box JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::Parse, "box JSON must be an object");
  for (const auto& [key, value] : j.items()) {
    const bool known = std::any_of(kCoefficientFields.begin(), kCoefficientFields.end(),
                                   [&](const CoefficientField& f) { return f.first == key; });
    if (!known) throw Error(ErrorCode::Parse, "unknown box key \"" + key + "\"");
  }
  CoefficientBox box;
  for (std::size_t k = 0; k < kCoefficientCount; ++k) {
    const std::string key(kCoefficientFields[k].first);
    auto it = j.find(key);
    if (it == j.end()) throw Error(ErrorCode::Parse, "missing box key \"" + key + "\"");
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
      throw Error(ErrorCode::Parse, "box entry \"" + key + "\" must be [lower, upper]");
    box.bounds[k] = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    if (!(box.bounds[k].first <= box.bounds[k].second))
      throw Error(ErrorCode::Config, "box entry \"" + key + "\" has lower > upper");
  }
  return box;
}

CoefficientSet sample_coefficients(const CoefficientBox& box, std::uint64_t seed,
                                   std::uint64_t index) {
  auto rng = SplitMix64::for_sample(seed, index);
  CoefficientSet c;
  for (std::size_t k = 0; k < kCoefficientCount; ++k) {
    const auto [lo, hi] = box.bounds[k];
    const double u = rng.uniform();
    c.*kCoefficientFields[k].second = lo == hi ? lo : lo + (hi - lo) * u;
  }
  return c;
}

namespace {

// Histogram categories. C-rows are tallied in both modes; the remaining
// checks gate acceptance.
constexpr std::array<std::string_view, 24> kCheckNames{
    "C1",  "C2",  "C3",  "C4",  "C5",  "C6",  "C7",  "C8",
    "C9",  "C10", "C11", "C12", "C13", "C14", "C15", "C16",
    "C17", "C18", "item_i", "item_ii_signs", "item_ii_p12", "item_iii",
    "H3_direct", "delta_nonzero"};

constexpr std::size_t kItemI = 18, kItemIISigns = 19, kItemIIP12 = 20, kItemIII = 21,
                      kH3Direct = 22, kDelta = 23;

using FailureMask = std::uint32_t;

FailureMask evaluate(SearchMode mode, const CoefficientSet& c) {
  FailureMask mask = 0;
  const auto table = check_table1(c);
  for (std::size_t i = 0; i < table.table1.size(); ++i)
    if (!table.table1[i].pass) mask |= 1u << i;

  EquilibriumPair eq;
  try {
    eq = compute_equilibria(c);
  } catch (const Error&) {
    return mask | (1u << kItemI);
  }
  const auto& la = eq.a.eigenvalues;
  const auto& lb = eq.b.eigenvalues;
  if (!(la[0] < 0 && la[1] > 0 && lb[0] < 0 && lb[1] < 0)) mask |= 1u << kItemIISigns;
  if (!(la[2] < 0 && la[3] < 0 && lb[2] > 0 && lb[3] > 0)) mask |= 1u << kItemIII;

  if (mode == SearchMode::DirectConditions) {
    try {
      const auto h = check_hypotheses(c);
      if (!h.condition3_direct.pass) mask |= 1u << kH3Direct;
      if (!(h.delta_product != 0.0)) mask |= 1u << kDelta;
    } catch (const Error&) {
      mask |= 1u << kH3Direct;
    }
  }

  const FailureMask table_bits = (1u << 18) - 1;
  const FailureMask gating = mode == SearchMode::Table1Literal ? mask : (mask & ~table_bits);
  // The P12 scan is the expensive check; run it only for otherwise accepted sets.
  if (gating == 0) {
    try {
      const auto eqs = p12_interior_equilibria(c);
      if (std::any_of(eqs.begin(), eqs.end(), [](const P12Equilibrium& e) { return e.inside_d; }))
        mask |= 1u << kItemIIP12;
    } catch (const Error&) {
      mask |= 1u << kItemIIP12;
    }
  }
  return mask;
}

bool accepted(SearchMode mode, FailureMask mask) {
  const FailureMask table_bits = (1u << 18) - 1;
  return (mode == SearchMode::Table1Literal ? mask : (mask & ~table_bits)) == 0;
}

}  // namespace

std::vector<std::string> search_failures(SearchMode mode, const CoefficientSet& c) {
  const FailureMask mask = evaluate(mode, c);
  std::vector<std::string> out;
  if (accepted(mode, mask)) return out;
  for (std::size_t i = 0; i < kCheckNames.size(); ++i)
    if (mask & (1u << i)) out.emplace_back(kCheckNames[i]);
  return out;
}

SearchResult find_coefficients(const SearchConfig& cfg) {
  if (cfg.max_samples < 1) throw Error(ErrorCode::Config, "max_samples must be >= 1");
  if (!cfg.box.valid()) throw Error(ErrorCode::Config, "invalid coefficient box");

  constexpr std::uint64_t kBlock = 4096;
  std::array<std::uint64_t, kCheckNames.size()> counts{};
  std::vector<FailureMask> masks;

  for (std::uint64_t start = 0; start < cfg.max_samples; start += kBlock) {
    const std::uint64_t len = std::min(kBlock, cfg.max_samples - start);
    masks.assign(len, 0);
    parallel_for(len, cfg.threads, [&](std::size_t i) {
      masks[i] = evaluate(cfg.mode, sample_coefficients(cfg.box, cfg.rng_seed, start + i));
    });
    for (std::uint64_t i = 0; i < len; ++i) {
      if (accepted(cfg.mode, masks[i])) {
        return SearchSuccess{sample_coefficients(cfg.box, cfg.rng_seed, start + i), start + i};
      }
    }
    for (FailureMask m : masks)
      for (std::size_t b = 0; b < kCheckNames.size(); ++b)
        if (m & (1u << b)) ++counts[b];
  }

  SearchFailure failure;
  failure.samples = cfg.max_samples;
  for (std::size_t b = 0; b < kCheckNames.size(); ++b)
    if (counts[b] > 0) failure.failure_histogram[std::string(kCheckNames[b])] = counts[b];
  return failure;
}

double openness_probe(const CoefficientSet& c, double rel_eps, std::size_t n, std::uint64_t seed) {
  if (!check_table1(c).table1_all_pass())
    throw Error(ErrorCode::PreconditionViolated, "base coefficient set fails the sign table");
  if (!(rel_eps >= 0.0) || !std::isfinite(rel_eps))
    throw Error(ErrorCode::Config, "rel_eps must be a nonnegative finite number");
  if (n == 0) throw Error(ErrorCode::Config, "n must be >= 1");

  std::size_t passing = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto rng = SplitMix64::for_sample(seed, i);
    CoefficientSet p = c;
    for (const auto& field : kCoefficientFields)
      p.*field.second *= 1.0 + rel_eps * (2.0 * rng.uniform() - 1.0);
    if (check_table1(p).table1_all_pass()) ++passing;
  }
  return static_cast<double>(passing) / static_cast<double>(n);
}

}  // namespace hetlab
