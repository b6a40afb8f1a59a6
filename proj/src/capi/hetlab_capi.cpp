#include "hetlab/hetlab.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include "hetlab/analysis.hpp"
#include "hetlab/experiments.hpp"
#include "hetlab/integrator.hpp"
#include "hetlab/model.hpp"
#include "hetlab/report_json.hpp"

struct hetlab_coeffs {
  hetlab::CoefficientSet c;
};

namespace {

thread_local std::string g_last_error;

hetlab_status status_of(hetlab::ErrorCode code) {
  using hetlab::ErrorCode;
  switch (code) {
    case ErrorCode::Domain: return HETLAB_E_DOMAIN;
    case ErrorCode::Parse: return HETLAB_E_PARSE;
    case ErrorCode::Config: return HETLAB_E_CONFIG;
    case ErrorCode::NoRealEquilibria: return HETLAB_E_NO_REAL_EQUILIBRIA;
    case ErrorCode::SignPatternViolation: return HETLAB_E_SIGN_PATTERN;
    case ErrorCode::DegenerateCoefficient: return HETLAB_E_DEGENERATE;
    case ErrorCode::NotASaddleInS134: return HETLAB_E_NOT_SADDLE;
    case ErrorCode::NoUnstableDirection: return HETLAB_E_NO_UNSTABLE_DIRECTION;
    case ErrorCode::PreconditionViolated: return HETLAB_E_PRECONDITION;
    case ErrorCode::Io: return HETLAB_E_IO;
  }
  return HETLAB_E_INTERNAL;
}

hetlab_status fail(hetlab_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs body, translating exceptions into status codes.
template <class F>
hetlab_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return HETLAB_OK;
  } catch (const hetlab::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(HETLAB_E_PARSE, e.what());
  } catch (const std::exception& e) {
    return fail(HETLAB_E_INTERNAL, e.what());
  } catch (...) {
    return fail(HETLAB_E_INTERNAL, "unknown exception");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

hetlab::StateVector state(const double x[4]) { return {x[0], x[1], x[2], x[3]}; }

double hetlab::CoefficientSet::* field(const char* name) {
  for (const auto& [n, member] : hetlab::kCoefficientFields)
    if (n == name) return member;
  throw hetlab::Error(hetlab::ErrorCode::Parse, std::string("unknown coefficient \"") + name + "\"");
}

hetlab::CycleId cycle_from(const char* s) {
  const std::string v = s;
  if (v == "P13cycle" || v == "P13") return hetlab::CycleId::P13Cycle;
  if (v == "P14cycle" || v == "P14") return hetlab::CycleId::P14Cycle;
  throw hetlab::Error(hetlab::ErrorCode::Config, "unknown cycle \"" + v + "\"");
}

#define REQUIRE(cond, what) \
  if (!(cond)) return fail(HETLAB_E_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* hetlab_version(void) { return HETLAB_VERSION; }

const char* hetlab_status_name(hetlab_status s) {
  switch (s) {
    case HETLAB_OK: return "ok";
    case HETLAB_E_DOMAIN: return "Domain";
    case HETLAB_E_PARSE: return "Parse";
    case HETLAB_E_CONFIG: return "Config";
    case HETLAB_E_NO_REAL_EQUILIBRIA: return "NoRealEquilibria";
    case HETLAB_E_SIGN_PATTERN: return "SignPatternViolation";
    case HETLAB_E_DEGENERATE: return "DegenerateCoefficient";
    case HETLAB_E_NOT_SADDLE: return "NotASaddleInS134";
    case HETLAB_E_NO_UNSTABLE_DIRECTION: return "NoUnstableDirection";
    case HETLAB_E_PRECONDITION: return "PreconditionViolated";
    case HETLAB_E_IO: return "Io";
    case HETLAB_E_INVALID_ARGUMENT: return "InvalidArgument";
    case HETLAB_E_INTERNAL: return "Internal";
  }
  return "?";
}

const char* hetlab_last_error(void) { return g_last_error.c_str(); }

void hetlab_string_free(char* s) { std::free(s); }

hetlab_status hetlab_coeffs_from_json(const char* json, hetlab_coeffs** out) {
  REQUIRE(json && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new hetlab_coeffs{hetlab::coefficients_from_json(json)}; });
}

hetlab_status hetlab_coeffs_reference(hetlab_coeffs** out) {
  REQUIRE(out, "null argument");
  return guarded([&] { *out = new hetlab_coeffs{hetlab::reference_coefficients()}; });
}

hetlab_status hetlab_coeffs_to_json(const hetlab_coeffs* c, char** out) {
  REQUIRE(c && out, "null argument");
  return guarded([&] { *out = dup(hetlab::coefficients_to_json(c->c)); });
}

hetlab_status hetlab_coeffs_get(const hetlab_coeffs* c, const char* name, double* value) {
  REQUIRE(c && name && value, "null argument");
  return guarded([&] { *value = c->c.*field(name); });
}

hetlab_status hetlab_coeffs_set(hetlab_coeffs* c, const char* name, double value) {
  REQUIRE(c && name, "null argument");
  return guarded([&] {
    auto member = field(name);
    if (!std::isfinite(value))
      throw hetlab::Error(hetlab::ErrorCode::Domain, std::string("non-finite value for ") + name);
    c->c.*member = value;
  });
}

void hetlab_coeffs_free(hetlab_coeffs* c) { delete c; }

hetlab_status hetlab_eval_field(const hetlab_coeffs* c, const double x[4], double f[4]) {
  REQUIRE(c && x && f, "null argument");
  return guarded([&] {
    const auto v = hetlab::eval_field(c->c, state(x));
    for (std::size_t i = 0; i < 4; ++i) f[i] = v[i];
  });
}

hetlab_status hetlab_eval_jacobian(const hetlab_coeffs* c, const double x[4], double jac[16]) {
  REQUIRE(c && x && jac, "null argument");
  return guarded([&] {
    const auto J = hetlab::eval_jacobian(c->c, state(x));
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) jac[4 * i + j] = J[i][j];
  });
}

hetlab_status hetlab_check(const hetlab_coeffs* c, char** report_json, int* table1_pass) {
  REQUIRE(c && report_json, "null argument");
  return guarded([&] {
    const auto cond = hetlab::check_all(c->c);
    const auto cons = hetlab::check_construction(c->c);
    hetlab::Json j{{"conditions", hetlab::to_json(cond)}, {"construction", hetlab::to_json(cons)}};
    *report_json = dup(j.dump(2));
    if (table1_pass) *table1_pass = cond.table1_all_pass() ? 1 : 0;
  });
}

hetlab_status hetlab_find(const char* mode, const char* box_json, uint64_t seed,
                          uint64_t max_samples, unsigned threads, char** result_json, int* found) {
  REQUIRE(mode && box_json && result_json, "null argument");
  return guarded([&] {
    hetlab::SearchConfig cfg;
    cfg.mode = hetlab::search_mode_from_string(mode);
    cfg.box = hetlab::box_from_json(box_json);
    cfg.rng_seed = seed;
    cfg.max_samples = max_samples;
    cfg.threads = threads;
    const auto res = hetlab::find_coefficients(cfg);
    hetlab::Json j;
    if (const auto* s = std::get_if<hetlab::SearchSuccess>(&res)) {
      j = hetlab::Json{{"status", "found"},
                       {"sample_index", s->sample_index},
                       {"coefficients", hetlab::Json::parse(hetlab::coefficients_to_json(s->coeffs))}};
      if (found) *found = 1;
    } else {
      j = hetlab::to_json(std::get<hetlab::SearchFailure>(res));
      if (found) *found = 0;
    }
    *result_json = dup(j.dump(2));
  });
}

hetlab_status hetlab_simulate(const hetlab_coeffs* c, const double x0[4], double tmax, char** csv,
                              char** info_json) {
  REQUIRE(c && x0 && csv, "null argument");
  return guarded([&] {
    hetlab::IntegratorConfig cfg;
    cfg.max_time = tmax;
    const auto traj = hetlab::integrate(c->c, state(x0), cfg);
    std::string text = hetlab::trajectory_to_csv(traj);
    if (info_json) {
      hetlab::Json j{{"termination", std::string(hetlab::to_string(traj.reason))},
                     {"accepted_steps", traj.accepted_steps},
                     {"rejected_steps", traj.rejected_steps},
                     {"final_time", traj.final_time()},
                     {"final_state", hetlab::to_json(traj.final_state())},
                     {"rel_tol", cfg.rel_tol},
                     {"abs_tol", cfg.abs_tol},
                     {"max_step", cfg.max_step}};
      *info_json = dup(j.dump(2));
    }
    *csv = dup(text);
  });
}

hetlab_status hetlab_basin_fraction(const hetlab_coeffs* c, const char* cycle, double eps,
                                    uint64_t n, uint64_t seed, unsigned threads,
                                    char** report_json, char** samples_csv) {
  REQUIRE(c && cycle && report_json, "null argument");
  return guarded([&] {
    hetlab::BasinConfig cfg;
    cfg.threads = threads;
    cfg.keep_samples = samples_csv != nullptr;
    const auto rep = hetlab::basin_fraction(c->c, cycle_from(cycle), eps, n, seed, cfg);
    *report_json = dup(hetlab::to_json(rep).dump(2));
    if (samples_csv) *samples_csv = dup(hetlab::samples_to_csv(rep));
  });
}

hetlab_status hetlab_stability_index(const hetlab_coeffs* c, const char* cycle,
                                     double arc_fraction, const double sink[4], unsigned levels,
                                     uint64_t n, uint64_t seed, unsigned threads,
                                     char** report_json) {
  REQUIRE(c && report_json, "null argument");
  REQUIRE(cycle || sink, "either a cycle or a sink point is required");
  return guarded([&] {
    const auto ladder = hetlab::default_ladder(levels);
    hetlab::IndexEstimate est;
    if (cycle) {
      hetlab::BasinConfig cfg;
      cfg.threads = threads;
      const auto conn = hetlab::verify_connection(c->c, hetlab::EquilibriumLabel::XiA,
                                                  hetlab::EquilibriumLabel::XiB,
                                                  hetlab::SubspaceId::P12, cfg.shooting);
      est = hetlab::stability_index_estimate(c->c, conn, arc_fraction, cycle_from(cycle), ladder,
                                             n, seed, cfg);
    } else {
      est = hetlab::stability_index_estimate_sink(c->c, state(sink), ladder, n, seed, threads);
    }
    *report_json = dup(hetlab::to_json(est).dump(2));
  });
}

hetlab_status hetlab_adjudicate(const hetlab_coeffs* c, const char* budget_json,
                                char** report_json) {
  REQUIRE(c && report_json, "null argument");
  return guarded([&] {
    hetlab::AdjudicationBudget budget;
    bool sample_csv = false;
    if (budget_json) {
      const auto b = nlohmann::json::parse(budget_json);
      if (!b.is_object()) throw hetlab::Error(hetlab::ErrorCode::Parse, "budget must be an object");
      for (const auto& [key, value] : b.items()) {
        if (key == "eps") budget.eps = value.get<std::vector<double>>();
        else if (key == "samples") budget.samples = value.get<std::size_t>();
        else if (key == "seed") budget.seed = value.get<std::uint64_t>();
        else if (key == "skip_basin") budget.skip_basin = value.get<bool>();
        else if (key == "threads") budget.basin.threads = value.get<unsigned>();
        else if (key == "sample_csv") sample_csv = value.get<bool>();
        else throw hetlab::Error(hetlab::ErrorCode::Parse, "unknown budget key \"" + key + "\"");
      }
    }
    budget.basin.keep_samples = sample_csv;
    const auto rep = hetlab::adjudicate(c->c, budget);
    hetlab::Json j = hetlab::to_json(rep);
    if (sample_csv)
      for (std::size_t i = 0; i < rep.basins.size(); ++i)
        j["basins"][i]["samples_csv"] = hetlab::samples_to_csv(rep.basins[i]);
    *report_json = dup(j.dump(2));
  });
}

}  // extern "C"
