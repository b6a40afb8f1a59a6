// Command-line front end over the hetlab C API.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetlab/hetlab.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitCondition = 2;
constexpr int kExitExhausted = 3;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Owned {
  char* p = nullptr;
  ~Owned() { hetlab_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

using CoeffsPtr = std::unique_ptr<hetlab_coeffs, decltype(&hetlab_coeffs_free)>;

void check(hetlab_status s, const std::string& what) {
  if (s != HETLAB_OK)
    throw InputError(what + ": " + hetlab_status_name(s) + ": " + hetlab_last_error());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write " + path.string());
}

// Accepts a bare coefficient object or the output of `find`.
CoeffsPtr load_coeffs(const std::string& path) {
  std::string text = read_file(path);
  try {
    const auto j = Json::parse(text);
    if (j.is_object() && j.contains("payload") && j["payload"].contains("coefficients"))
      text = j["payload"]["coefficients"].dump();
  } catch (const nlohmann::json::exception&) {
    // Malformed JSON is reported by the library with its own message.
  }
  hetlab_coeffs* c = nullptr;
  check(hetlab_coeffs_from_json(text.c_str(), &c), path);
  return CoeffsPtr(c, &hetlab_coeffs_free);
}

struct Manifest {
  std::string command;
  Json inputs = Json::object();
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
  bool timestamp = true;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Json json() const {
    Json m;
    m["command"] = command;
    m["inputs"] = inputs;
    m["config"] = config;
    m["seed"] = seed ? Json(*seed) : Json(nullptr);
    m["tool_version"] = hetlab_version();
    if (timestamp) {
      const std::time_t now = std::time(nullptr);
      char buf[32];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
      m["timestamp"] = buf;
      m["duration_s"] =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    return m;
  }

  std::string wrap(const Json& payload) const {
    return Json{{"manifest", json()}, {"payload", payload}}.dump(2) + "\n";
  }
};

std::vector<double> parse_state(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size() && tok.find_first_not_of(" \t", used) != std::string::npos)
        throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw InputError("--x0: cannot parse \"" + tok + "\"");
    }
  }
  if (v.size() != 4) throw InputError("--x0 needs four comma-separated numbers");
  return v;
}

std::string eps_tag(double e) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0e", e);
  return buf;
}

// --------------------------------------------------------------------------

int cmd_check(const std::string& coeffs_path, bool no_timestamp) {
  Manifest m{"check"};
  m.timestamp = !no_timestamp;
  m.inputs["coeffs"] = coeffs_path;
  const auto c = load_coeffs(coeffs_path);
  Owned report;
  int pass = 0;
  check(hetlab_check(c.get(), &report.p, &pass), "check");
  std::cout << m.wrap(Json::parse(report.str()));
  return pass ? kExitOk : kExitCondition;
}

int cmd_find(const std::string& mode, const std::string& box_path, std::uint64_t seed,
             std::uint64_t max, const std::string& out, bool no_timestamp) {
  Manifest m{"find"};
  m.timestamp = !no_timestamp;
  m.inputs["box"] = box_path;
  m.config = Json{{"mode", mode}, {"max_samples", max}};
  m.seed = seed;
  const std::string box = read_file(box_path);
  Owned result;
  int found = 0;
  check(hetlab_find(mode.c_str(), box.c_str(), seed, max, 0, &result.p, &found), "find");
  const std::string text = m.wrap(Json::parse(result.str()));
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return found ? kExitOk : kExitExhausted;
}

int cmd_simulate(const std::string& coeffs_path, const std::string& x0s, double tmax,
                 const std::string& out, bool no_timestamp) {
  Manifest m{"simulate"};
  m.timestamp = !no_timestamp;
  m.inputs["coeffs"] = coeffs_path;
  const auto x0 = parse_state(x0s);
  m.config = Json{{"x0", x0}, {"tmax", tmax}};
  if (!(tmax >= 0.0)) throw InputError("--tmax must be a nonnegative number");
  const auto c = load_coeffs(coeffs_path);
  Owned csv, info;
  check(hetlab_simulate(c.get(), x0.data(), tmax, &csv.p, &info.p), "simulate");
  write_file(out, csv.str());
  m.inputs["out"] = out;
  write_file(out + ".manifest.json", m.wrap(Json::parse(info.str())));
  return kExitOk;
}

int cmd_adjudicate(const std::string& coeffs_path, const std::vector<double>& eps,
                   std::size_t samples, std::uint64_t seed, bool skip_basin, bool sample_csv,
                   const std::string& out_dir, bool no_timestamp) {
  Manifest m{"adjudicate"};
  m.timestamp = !no_timestamp;
  m.inputs["coeffs"] = coeffs_path;
  m.seed = seed;
  Json budget{{"eps", eps}, {"samples", samples}, {"seed", seed}, {"skip_basin", skip_basin},
              {"sample_csv", sample_csv}};
  m.config = budget;
  m.config["out"] = out_dir;

  const auto c = load_coeffs(coeffs_path);

  // Fail before any integration if the output directory is unusable.
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw InputError("cannot create output directory " + out_dir);
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream p(probe);
    if (!p) throw InputError("output directory " + out_dir + " is not writable");
  }
  fs::remove(probe, ec);

  Owned report;
  check(hetlab_adjudicate(c.get(), budget.dump().c_str(), &report.p), "adjudicate");
  Json rep = Json::parse(report.str());

  write_file(dir / "condition.json", m.wrap(rep["conditions"]));
  write_file(dir / "construction.json", m.wrap(rep["construction"]));
  write_file(dir / "connections.json", m.wrap(rep["connections"]));
  for (auto& b : rep["basins"]) {
    const std::string stem =
        "basin_" + b["cycle"].get<std::string>() + "_eps" + eps_tag(b["eps"].get<double>());
    if (b.contains("samples_csv")) {
      write_file(dir / (stem + ".csv"), b["samples_csv"].get<std::string>());
      b.erase("samples_csv");
    }
    write_file(dir / (stem + ".json"), m.wrap(b));
  }
  write_file(dir / "adjudication.json", m.wrap(rep));

  std::cout << "simulated attractor: " << rep["simulated_cycle"].get<std::string>() << "\n";
  for (const auto& a : rep["anomalies"]) std::cout << "anomaly: " << a.get<std::string>() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetlab: heteroclinic cycle laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hetlab_version()));

  std::string coeffs, box, out, mode = "table1_literal", x0;
  std::uint64_t seed = 1, max = 100000;
  std::size_t samples = 1000;
  double tmax = 50.0;
  std::vector<double> eps{1e-2, 1e-3};
  bool no_timestamp = false, skip_basin = false, sample_csv = false;

  auto* check_cmd = app.add_subcommand("check", "evaluate the sign table, hypotheses and construction");
  check_cmd->add_option("--coeffs", coeffs, "coefficient JSON file")->required();
  check_cmd->add_flag("--no-timestamp", no_timestamp);

  auto* find_cmd = app.add_subcommand("find", "search a coefficient box");
  find_cmd->add_option("--mode", mode, "table1_literal or direct_conditions");
  find_cmd->add_option("--box", box, "box JSON file")->required();
  find_cmd->add_option("--seed", seed);
  find_cmd->add_option("--max", max, "maximum number of samples");
  find_cmd->add_option("--out", out, "output file (default: standard output)");
  find_cmd->add_flag("--no-timestamp", no_timestamp);

  auto* sim_cmd = app.add_subcommand("simulate", "integrate one trajectory to CSV");
  sim_cmd->add_option("--coeffs", coeffs)->required();
  sim_cmd->add_option("--x0", x0, "initial state \"x1,x2,x3,x4\"")->required();
  sim_cmd->add_option("--tmax", tmax);
  sim_cmd->add_option("--out", out, "CSV path; the manifest goes to PATH.manifest.json")->required();
  sim_cmd->add_flag("--no-timestamp", no_timestamp);

  auto* adj_cmd = app.add_subcommand("adjudicate", "run the full pipeline into a report directory");
  adj_cmd->add_option("--coeffs", coeffs)->required();
  adj_cmd->add_option("--eps", eps, "tube radii")->delimiter(',');
  adj_cmd->add_option("--samples", samples, "samples per basin estimate");
  adj_cmd->add_option("--seed", seed);
  adj_cmd->add_option("--out", out, "report directory")->required();
  adj_cmd->add_flag("--skip-basin", skip_basin);
  adj_cmd->add_flag("--sample-csv", sample_csv, "write per-sample outcome CSVs");
  adj_cmd->add_flag("--no-timestamp", no_timestamp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*check_cmd) return cmd_check(coeffs, no_timestamp);
    if (*find_cmd) return cmd_find(mode, box, seed, max, out, no_timestamp);
    if (*sim_cmd) return cmd_simulate(coeffs, x0, tmax, out, no_timestamp);
    if (*adj_cmd)
      return cmd_adjudicate(coeffs, eps, samples, seed, skip_basin, sample_csv, out, no_timestamp);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
