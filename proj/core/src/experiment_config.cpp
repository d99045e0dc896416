#include "csradar/experiment_config.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csradar {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "family",        "p",
    "n_tx",          "n_rx",
    "n_doppler",     "sparsity",
    "snr_db",        "trials",
    "seed",          "magnitude_model",
    "magnitude_a",   "magnitude_b",
    "floor_multiple", "lambda",
    "max_iters",     "rel_tol",
    "support_threshold", "normalized",
    "jobs",          "out_dir",
    "dense_oracle",  "force",
};

MagnitudeModel::Kind magnitude_kind(const std::string& s) {
  if (s == "constant") return MagnitudeModel::Kind::constant;
  if (s == "uniform") return MagnitudeModel::Kind::uniform;
  if (s == "log_normal") return MagnitudeModel::Kind::log_normal;
  throw std::runtime_error("config: unknown magnitude_model '" + s + "'");
}

std::string magnitude_name(MagnitudeModel::Kind k) {
  switch (k) {
    case MagnitudeModel::Kind::constant: return "constant";
    case MagnitudeModel::Kind::uniform: return "uniform";
    case MagnitudeModel::Kind::log_normal: return "log_normal";
  }
  return "constant";
}

}  // namespace

ExperimentConfig experiment_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (!j.is_object()) throw std::runtime_error("config: expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kKnownKeys.count(key))
      throw std::runtime_error("config: unknown key '" + key + "'");
  for (const char* key : {"p", "n_tx", "n_rx"})
    if (!j.contains(key))
      throw std::runtime_error(std::string("config: missing key '") + key + "'");

  ExperimentConfig cfg;
  TrialConfig& t = cfg.trial;
  t.p = j.at("p").get<int>();
  t.n_tx = j.at("n_tx").get<int>();
  t.n_rx = j.at("n_rx").get<int>();
  t.family = waveform_family_from_string(j.value("family", "kerdock"));
  t.n_doppler = j.value("n_doppler", t.p);
  t.sparsity = j.value("sparsity", std::int64_t{10});
  if (j.contains("snr_db")) {
    const auto& v = j.at("snr_db");
    if (v.is_string()) {
      if (v.get<std::string>() != "inf")
        throw std::runtime_error("config: snr_db must be a number or \"inf\"");
      t.snr_db = std::numeric_limits<double>::infinity();
    } else {
      t.snr_db = v.get<double>();
    }
  }
  t.trials = j.value("trials", 50);
  t.master_seed = j.value("seed", std::uint64_t{1});
  t.magnitude.kind = magnitude_kind(j.value("magnitude_model", "constant"));
  t.magnitude.a = j.value("magnitude_a", 1.0);
  t.magnitude.b = j.value("magnitude_b", 1.0);
  t.floor_multiple = j.value("floor_multiple", 0.0);
  t.solver.lambda = j.value("lambda", 0.0);
  t.solver.max_iters = j.value("max_iters", 2000);
  t.solver.rel_tol = j.value("rel_tol", 1e-8);
  t.solver.support_threshold = j.value("support_threshold", 1e-3);
  t.solver.normalized = j.value("normalized", true);
  t.jobs = j.value("jobs", 1);
  cfg.out_dir = j.value("out_dir", std::string{});
  cfg.dense_oracle = j.value("dense_oracle", false);
  cfg.force = j.value("force", false);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return experiment_config_from_json(os.str());
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  const TrialConfig& t = cfg.trial;
  json j;
  j["family"] = to_string(t.family);
  j["p"] = t.p;
  j["n_tx"] = t.n_tx;
  j["n_rx"] = t.n_rx;
  j["n_doppler"] = t.n_doppler;
  j["sparsity"] = t.sparsity;
  if (std::isinf(t.snr_db))
    j["snr_db"] = "inf";
  else
    j["snr_db"] = t.snr_db;
  j["trials"] = t.trials;
  j["seed"] = t.master_seed;
  j["magnitude_model"] = magnitude_name(t.magnitude.kind);
  j["magnitude_a"] = t.magnitude.a;
  j["magnitude_b"] = t.magnitude.b;
  j["floor_multiple"] = t.floor_multiple;
  j["lambda"] = t.solver.lambda;
  j["max_iters"] = t.solver.max_iters;
  j["rel_tol"] = t.solver.rel_tol;
  j["support_threshold"] = t.solver.support_threshold;
  j["normalized"] = t.solver.normalized;
  j["jobs"] = t.jobs;
  j["out_dir"] = cfg.out_dir;
  j["dense_oracle"] = cfg.dense_oracle;
  j["force"] = cfg.force;
  return j.dump(2);
}

}  // namespace csradar
