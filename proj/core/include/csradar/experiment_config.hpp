#pragma once

#include <string>

#include "csradar/harness.hpp"

namespace csradar {

// Flat JSON experiment description. Required keys: p, n_tx, n_rx. Optional
// keys (with defaults): family ("kerdock"), n_doppler (= p), sparsity (10),
// snr_db (20, or the string "inf"), trials (50), seed (1),
// magnitude_model ("constant"), magnitude_a (1), magnitude_b (1),
// floor_multiple (0), lambda (0 = derive from sigma), max_iters (2000),
// rel_tol (1e-8), support_threshold (1e-3), normalized (true), jobs (1),
// out_dir (""), dense_oracle (false), force (false).
// Unknown keys are rejected by name.
struct ExperimentConfig {
  TrialConfig trial;
  std::string out_dir;
  bool dense_oracle = false;
  bool force = false;
};

ExperimentConfig experiment_config_from_json(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_to_json(const ExperimentConfig& cfg);

}  // namespace csradar
