#include "hetlab/report_json.hpp"

#include <cmath>

namespace hetlab {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json row(const ConditionRow& r) {
  return Json{{"id", r.id},
              {"lhs", number(r.lhs)},
              {"rhs", number(r.rhs)},
              {"sense", std::string(to_string(r.sense))},
              {"pass", r.pass}};
}

Json row(std::string id, double lhs, double rhs, std::string sense, bool pass) {
  return Json{{"id", std::move(id)},
              {"lhs", number(lhs)},
              {"rhs", number(rhs)},
              {"sense", std::move(sense)},
              {"pass", pass}};
}

Json hypothesis(const HypothesisEntry& h) {
  return Json{{"id", h.id},
              {"lhs", nullptr},
              {"rhs", nullptr},
              {"sense", nullptr},
              {"pass", h.status == HypothesisStatus::Pass},
              {"status", std::string(to_string(h.status))},
              {"evidence", h.evidence}};
}

Json item(const ConstructionItem& it) { return Json{{"pass", it.pass}, {"detail", it.detail}}; }

Json proportion(const Proportion& p) {
  return Json{{"count", p.count},
              {"fraction", number(p.fraction)},
              {"ci95", Json::array({number(p.ci_low), number(p.ci_high)})}};
}

template <class T>
Json optional_string(const std::optional<T>& v) {
  return v ? Json(std::string(to_string(*v))) : Json(nullptr);
}

Json optional_bool(const std::optional<bool>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json to_json(const StateVector& x) { return Json::array({x[0], x[1], x[2], x[3]}); }

Json to_json(const ConditionReport& r) {
  Json out = Json::array();
  for (const auto& c : r.table1) out.push_back(row(c));
  if (!r.hypotheses_populated) {
    for (const auto* h : {&r.ha, &r.hb, &r.hc, &r.hd})
      if (!h->id.empty()) out.push_back(hypothesis(*h));
    return out;
  }
  for (const auto* h : {&r.ha, &r.hb, &r.hc, &r.hd}) out.push_back(hypothesis(*h));
  const auto& d = r.condition3_direct;
  Json direct = row("H3_direct", d.contraction_product, d.expansion_product, ">", d.pass);
  direct["detail"] = Json{{"cbar_a", number(d.cbar_a)},
                          {"cbar_b", number(d.cbar_b)},
                          {"ebar_a", number(d.ebar_a)},
                          {"ebar_b", number(d.ebar_b)}};
  out.push_back(direct);
  out.push_back(row(r.condition3_printed_3));
  out.push_back(row(r.condition3_printed_4));
  out.push_back(row("delta_linear", r.delta_linear, 0.0, "!=", r.delta_linear != 0.0));
  out.push_back(row("delta_product", r.delta_product, 0.0, "!=", r.delta_product != 0.0));
  out.push_back(row("rho3", r.rho3, 1.0, ">", r.rho3 > 1.0));
  out.push_back(row("rho4", r.rho4, 1.0, ">", r.rho4 > 1.0));
  return out;
}

Json to_json(const ConstructionReport& r) {
  Json out;
  out["roots_available"] = r.roots_available;
  out["x_a"] = r.roots_available ? number(r.x_a) : Json(nullptr);
  out["x_b"] = r.roots_available ? number(r.x_b) : Json(nullptr);
  if (r.equilibria) {
    Json eq = Json::array();
    for (const auto* e : {&r.equilibria->a, &r.equilibria->b}) {
      Json lam = Json::array();
      for (double v : e->eigenvalues) lam.push_back(number(v));
      eq.push_back(Json{{"label", std::string(to_string(e->label))},
                        {"x1", number(e->x1_value)},
                        {"eigenvalues", lam},
                        {"role_in_p12", std::string(to_string(e->role_in_p12))},
                        {"role_in_s134", std::string(to_string(e->role_in_s134))}});
    }
    out["equilibria"] = eq;
  } else {
    out["equilibria"] = nullptr;
  }
  out["item_i"] = item(r.item_i);
  out["item_ii"] = item(r.item_ii);
  out["item_iii"] = item(r.item_iii);
  out["item_iv"] = item(r.item_iv);
  Json p12 = Json::array();
  for (const auto& e : r.p12_equilibria)
    p12.push_back(Json{{"x1", number(e.x1)}, {"x2", number(e.x2)}, {"inside_d", e.inside_d}});
  out["p12_equilibria"] = p12;
  out["p12_interior_empty"] = r.p12_interior_empty;
  out["b12_monotonicity_available"] = r.b12_monotonicity_available;
  out["principal_plane"] = optional_string(r.principal);
  out["notes"] = r.notes;
  return out;
}

Json to_json(const ConnectionRecord& r, bool include_path) {
  Json out{{"from", std::string(to_string(r.from))},
           {"to", std::string(to_string(r.to))},
           {"carrier", std::string(to_string(r.carrier))},
           {"shoot_offset", r.shoot_offset},
           {"verified", r.verified},
           {"terminal_distance", number(r.terminal_distance)},
           {"transit_time", number(r.transit_time)},
           {"max_carrier_drift", number(r.max_carrier_drift)},
           {"peak_plane_radius", number(r.peak_plane_radius)},
           {"termination", std::string(to_string(r.termination))},
           {"path_points", r.path.size()}};
  if (include_path) {
    Json path = Json::array();
    for (const auto& x : r.path) path.push_back(to_json(x));
    out["path"] = path;
  }
  return out;
}

Json to_json(const ClassifyConfig& cfg) {
  return Json{{"radius_a", cfg.radius_a},
              {"radius_b", cfg.radius_b},
              {"section_radius", cfg.section_radius},
              {"angle_tolerance", cfg.angle_tolerance},
              {"loops_max", cfg.loops_max},
              {"decisive_loops", cfg.decisive_loops},
              {"distance_floor", cfg.distance_floor},
              {"phase_time_floor", cfg.phase_time_floor},
              {"phase_time_factor", cfg.phase_time_factor},
              {"auto_section_radius", cfg.auto_section_radius},
              {"rel_tol", cfg.integrator.rel_tol},
              {"abs_tol", cfg.integrator.abs_tol},
              {"max_step", cfg.integrator.max_step},
              {"blowup_norm", cfg.integrator.blowup_norm},
              {"ci_level", 0.95}};
}

Json to_json(const BasinReport& r) {
  Json counts;
  for (std::size_t i = 0; i < kOutcomeCount; ++i)
    counts[std::string(to_string(static_cast<Outcome>(i)))] = r.counts[i];
  return Json{{"cycle", std::string(to_string(r.cycle)) + "cycle"},
              {"eps", r.eps},
              {"n", r.n},
              {"seed", r.seed},
              {"counts", counts},
              {"attracted_p13", proportion(r.attracted_p13)},
              {"attracted_p14", proportion(r.attracted_p14)},
              {"config", to_json(r.classify)}};
}

Json to_json(const IndexEstimate& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels)
    levels.push_back(Json{{"eps", l.eps},
                          {"n", l.n},
                          {"attracted", l.attracted},
                          {"fraction", number(l.fraction)}});
  return Json{{"target", r.target},
              {"base_point", to_json(r.base_point)},
              {"seed", r.seed},
              {"levels", levels},
              {"slope", r.slope ? number(*r.slope) : Json(nullptr)},
              {"verdict", std::string(to_string(r.verdict))}};
}

Json to_json(const AdjudicationReport& r) {
  Json out;
  out["coefficients"] = Json::parse(coefficients_to_json(r.coeffs, -1));
  Json eps = Json::array();
  for (double e : r.budget.eps) eps.push_back(e);
  out["budget"] = Json{{"eps", eps},
                       {"samples", r.budget.samples},
                       {"seed", r.budget.seed},
                       {"skip_basin", r.budget.skip_basin}};
  out["conditions"] = to_json(r.conditions);
  out["construction"] = to_json(r.construction);
  out["principal_plane"] = optional_string(r.principal);
  out["delta_linear"] = r.delta_linear ? number(*r.delta_linear) : Json(nullptr);
  out["delta_sign"] = !r.delta_linear      ? Json(nullptr)
                      : *r.delta_linear > 0 ? Json(1)
                      : *r.delta_linear < 0 ? Json(-1)
                                            : Json(0);
  Json conns = Json::array();
  for (const auto& c : r.connections) conns.push_back(to_json(c));
  out["connections"] = conns;
  out["connections_verified"] = r.connections_verified;
  out["section_radius"] = r.section_radius;
  Json basins = Json::array();
  for (const auto& b : r.basins) basins.push_back(to_json(b));
  out["basins"] = basins;
  out["predicted_cycle"] =
      r.predicted ? Json(std::string(to_string(*r.predicted)) + "cycle") : Json(nullptr);
  out["simulated_cycle"] = std::string(to_string(r.simulated));
  out["flags"] = Json{{"printed_vs_direct_agree", optional_bool(r.printed_vs_direct_agree)},
                      {"prediction_vs_simulation_agree",
                       optional_bool(r.prediction_vs_simulation_agree)},
                      {"simulated_attractor_is_principal",
                       optional_bool(r.simulated_attractor_is_principal)}};
  out["skipped"] = r.skipped;
  out["anomalies"] = r.anomalies;
  return out;
}

Json to_json(const SearchFailure& f) {
  Json hist = Json::object();
  for (const auto& [k, v] : f.failure_histogram) hist[k] = v;
  return Json{{"status", "search_exhausted"}, {"samples", f.samples}, {"failure_histogram", hist}};
}

Json envelope(Json manifest, Json payload) {
  return Json{{"manifest", std::move(manifest)}, {"payload", std::move(payload)}};
}

}  // namespace hetlab
