#include "omtube/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "omtube/error.hpp"

namespace omtube {

namespace {

using nlohmann::json;

DriftModel drift_from(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "drift must be an object");
  if (j.contains("coeffs")) return DriftModel(j.at("coeffs").get<std::vector<double>>());
  if (j.contains("preset")) {
    const auto name = j.at("preset").get<std::string>();
    if (name == "ou" && j.contains("theta")) return DriftModel::ornstein_uhlenbeck(j.at("theta").get<double>());
    return DriftModel::preset(name);
  }
  throw Error(ErrorKind::InvalidInput, "drift needs either \"preset\" or \"coeffs\"");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

DriftModel parse_drift(std::string_view json_text) {
  try {
    return drift_from(parse_json(json_text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad drift: ") + e.what());
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw Error(ErrorKind::InvalidInput, "config must be a JSON object");
  ExperimentConfig cfg;
  try {
    auto& s = cfg.system;
    if (j.contains("drift")) s.drift = drift_from(j.at("drift"));
    read(j, "c", s.c);
    read(j, "l", s.l);
    read(j, "x0", s.x0);
    read(j, "xf", s.xf);
    read(j, "kappa", s.kappa);
    if (j.contains("sim")) {
      const auto& sim = j.at("sim");
      read(sim, "dt", cfg.sim.dt);
      read(sim, "horizon", cfg.sim.horizon);
      read(sim, "seed", cfg.sim.seed);
      read(sim, "scheme_kappa", cfg.sim.scheme_kappa);
      read(sim, "implicit_tol", cfg.sim.implicit_tol);
    }
    if (j.contains("experiment")) {
      const auto& ex = j.at("experiment");
      read(ex, "n_paths", cfg.n_paths);
      read(ex, "bin_edges", cfg.bin_edges);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidInput, std::string("bad config value: ") + e.what());
  }
  if (cfg.bin_edges.empty()) cfg.bin_edges = default_bin_edges(cfg.sim.horizon);
  return cfg;
}

ExperimentConfig load_config(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + filename);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace omtube
