#pragma once

// Closed-form equilibria and eigenvalues on L1, the coefficient sign table,
// the cycle hypotheses, and coefficient search.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hetlab/model.hpp"

namespace hetlab {

enum class EquilibriumLabel { XiA, XiB };
enum class StabilityRole { Sink, Saddle, Source };

std::string_view to_string(EquilibriumLabel label);
std::string_view to_string(StabilityRole role);

struct EquilibriumRecord {
  EquilibriumLabel label = EquilibriumLabel::XiA;
  double x1_value = 0.0;
  // Ordered by axis: lambda_k is the eigenvalue along L_k.
  std::array<double, 4> eigenvalues{};
  StabilityRole role_in_p12 = StabilityRole::Saddle;
  StabilityRole role_in_s134 = StabilityRole::Saddle;

  StateVector point() const { return {x1_value, 0.0, 0.0, 0.0}; }
};

struct EquilibriumPair {
  EquilibriumRecord a;  // xi_a, negative root
  EquilibriumRecord b;  // xi_b, positive root

  const EquilibriumRecord& operator[](EquilibriumLabel l) const {
    return l == EquilibriumLabel::XiA ? a : b;
  }
};

// Roots of 1 + b11 x + c1 x^2 in ascending order, by the cancellation-free
// formula. Throws NoRealEquilibria or DegenerateCoefficient (c1 == 0).
std::pair<double, double> quadratic_roots(const CoefficientSet& c);

// Diagonal Jacobian entries at (x, 0, 0, 0), using the quadratic relation to
// simplify the radial entry.
std::array<double, 4> eigenvalues_on_axis(const CoefficientSet& c, double x);

// Throws NoRealEquilibria, DegenerateCoefficient, or SignPatternViolation.
EquilibriumPair compute_equilibria(const CoefficientSet& c);

enum class PrincipalPlane { P13, P14, Tie };
std::string_view to_string(PrincipalPlane p);

// Plane of the strongest expanding direction at xi_b, by direct comparison of
// lambda_3 and lambda_4. Throws NotASaddleInS134.
PrincipalPlane principal_plane(const CoefficientSet& c);

// ---------------------------------------------------------------------------
// Condition reports

enum class Sense { Less, Greater };
std::string_view to_string(Sense s);

struct ConditionRow {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  Sense sense = Sense::Less;
  bool pass = false;
};

enum class HypothesisStatus { Pass, Fail, Deferred, Skipped };
std::string_view to_string(HypothesisStatus s);

struct HypothesisEntry {
  std::string id;
  HypothesisStatus status = HypothesisStatus::Skipped;
  std::string evidence;
};

struct Condition3Direct {
  double cbar_a = 0.0, cbar_b = 0.0;  // weakest contraction magnitudes
  double ebar_a = 0.0, ebar_b = 0.0;  // strongest expansions
  double contraction_product = 0.0;
  double expansion_product = 0.0;
  bool pass = false;
};

struct ConditionReport {
  double discriminant = 0.0;

  std::vector<ConditionRow> table1;  // C1..C18 when populated

  bool hypotheses_populated = false;
  HypothesisEntry ha, hb, hc, hd;
  Condition3Direct condition3_direct;
  ConditionRow condition3_printed_3;
  ConditionRow condition3_printed_4;
  double delta_linear = 0.0;
  double delta_product = 0.0;
  double rho3 = 0.0;
  double rho4 = 0.0;

  bool table1_all_pass() const;
  const ConditionRow* row(std::string_view id) const;
};

// Evaluates C1..C18 exactly as printed in the sign table; C11-C13 are sign
// conditions only.
ConditionReport check_table1(const CoefficientSet& c);

// Populates the hypothesis section. `connections_verified` carries the
// outcome of numerical shooting; Hc is Deferred when it is absent.
// Throws NoRealEquilibria when the equilibria do not exist.
ConditionReport check_hypotheses(const CoefficientSet& c,
                                 std::optional<bool> connections_verified = std::nullopt);

// Both sections merged; never throws on coefficient values.
ConditionReport check_all(const CoefficientSet& c,
                          std::optional<bool> connections_verified = std::nullopt);

// Isotropy subgroup of a generic point of a coordinate subspace.
std::vector<SymmetryElement> isotropy_of(SubspaceId id);
// Isotypic components of R^4 under the group, as sets of coordinate axes.
std::vector<std::vector<std::size_t>> isotypic_components();

// ---------------------------------------------------------------------------
// Equilibria in P12 off the axes

struct P12Equilibrium {
  double x1 = 0.0;
  double x2 = 0.0;  // positive branch
  bool inside_d = false;
};

struct P12Options {
  double half_width = 50.0;
  std::size_t grid_cells = 200000;
  double tolerance = 1e-10;
};

// Throws DegenerateCoefficient when b12 or b22 vanish.
std::vector<P12Equilibrium> p12_interior_equilibria(const CoefficientSet& c,
                                                    const P12Options& opts = {});

// ---------------------------------------------------------------------------
// Construction items (i)-(iv)

struct ConstructionItem {
  bool pass = false;
  std::string detail;
};

struct ConstructionReport {
  bool roots_available = false;
  double x_a = 0.0;
  double x_b = 0.0;
  std::optional<EquilibriumPair> equilibria;

  ConstructionItem item_i;
  ConstructionItem item_ii;
  ConstructionItem item_iii;
  ConstructionItem item_iv;

  std::vector<P12Equilibrium> p12_equilibria;
  bool p12_interior_empty = false;
  // b12 > 0 makes x1' > 0 along the x2-direction of P12; without it the
  // existence of the P12 connection rests on shooting alone.
  bool b12_monotonicity_available = false;

  std::optional<PrincipalPlane> principal;
  bool principal_is_p13 = false;

  std::vector<std::string> notes;

  bool items_i_to_iii() const { return item_i.pass && item_ii.pass && item_iii.pass; }
};

ConstructionReport check_construction(const CoefficientSet& c);

// ---------------------------------------------------------------------------
// Coefficient search

enum class SearchMode { Table1Literal, DirectConditions };
std::string_view to_string(SearchMode m);
SearchMode search_mode_from_string(std::string_view s);  // throws Config

struct CoefficientBox {
  std::array<std::pair<double, double>, kCoefficientCount> bounds{};

  static CoefficientBox point(const CoefficientSet& c);
  bool valid() const;
};

std::string box_to_json(const CoefficientBox& box, int indent = 2);
// Format: {"b11": [lo, hi], ...} with every coefficient key present.
CoefficientBox box_from_json(std::string_view text);

struct SearchConfig {
  SearchMode mode = SearchMode::Table1Literal;
  CoefficientBox box;
  std::uint64_t max_samples = 100000;
  std::uint64_t rng_seed = 0;
  unsigned threads = 0;  // 0 = default worker count
};

struct SearchSuccess {
  CoefficientSet coeffs;
  std::uint64_t sample_index = 0;
};

struct SearchFailure {
  std::uint64_t samples = 0;
  std::map<std::string, std::uint64_t> failure_histogram;
};

using SearchResult = std::variant<SearchSuccess, SearchFailure>;

// Deterministic regardless of worker count: the lowest accepted sample index
// wins.
SearchResult find_coefficients(const SearchConfig& cfg);

// Sample i of the search: box-uniform coefficients from the per-sample stream.
CoefficientSet sample_coefficients(const CoefficientBox& box, std::uint64_t seed,
                                   std::uint64_t index);

// Named checks that failed for a candidate; empty when it is accepted.
std::vector<std::string> search_failures(SearchMode mode, const CoefficientSet& c);

// Fraction of relative perturbations of size rel_eps that still satisfy the
// sign table. Throws PreconditionViolated if the base set does not.
double openness_probe(const CoefficientSet& c, double rel_eps, std::size_t n,
                      std::uint64_t seed);

}  // namespace hetlab
