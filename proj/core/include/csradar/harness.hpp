#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csradar/scene_grid.hpp"
#include "csradar/sensing.hpp"
#include "csradar/solver.hpp"
#include "csradar/types.hpp"
#include "csradar/waveforms.hpp"

namespace csradar {

struct TrialConfig {
  WaveformFamily family = WaveformFamily::kerdock;
  int p = 37;          // N_s = N_tau = sequence length
  int n_tx = 6;
  int n_rx = 6;
  int n_doppler = 37;  // N_f <= N_s
  std::int64_t sparsity = 10;
  double snr_db = 20.0;  // +infinity for noiseless
  MagnitudeModel magnitude;
  // > 0: rescale scene amplitudes so the smallest magnitude equals this
  // multiple of the detectability floor min_amplitude(sigma, ...), keeping
  // the noise level fixed at the sigma implied by snr_db for the unscaled
  // scene. The floor-to-amplitude ratio is scale invariant, so this pins the
  // margin without circularity.
  double floor_multiple = 0.0;
  int trials = 50;
  std::uint64_t master_seed = 1;
  LassoConfig solver;  // solver.lambda <= 0 selects default_lambda(sigma)
  int jobs = 1;
};

struct TrialRecord {
  int trial = 0;
  std::uint64_t geometry_seed = 0;
  std::uint64_t scene_seed = 0;
  std::uint64_t noise_seed = 0;
  double sigma = 0.0;
  double lambda = 0.0;
  bool converged = false;
  bool support_exact = false;
  double relative_error = 0.0;  // ||x_debiased - x|| / ||x||
  double error_bound = 0.0;     // 5 sigma sqrt(3 N_R N_s) / ||y||
  std::int64_t cells = 0;
  std::vector<std::int64_t> true_support;
  std::vector<std::int64_t> detected_support;
  std::vector<std::int64_t> lasso_cells;  // cells with nonzero lasso magnitude
  std::vector<double> lasso_magnitudes;   // aligned with lasso_cells
  std::string error;  // nonempty if the trial threw; other fields undefined
};

/// Derived-seed splitter shared by all campaign code: stream `index` of the
/// given master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Monte-Carlo recovery campaign: per trial a fresh geometry, scene and noise
/// realization, solved with the debiased lasso. Individual trial failures are
/// recorded, never abort the campaign.
std::vector<TrialRecord> run_trials(const TrialConfig& cfg);

double success_rate(const std::vector<TrialRecord>& records);

struct RocCurve {
  std::vector<double> thresholds;  // strictly descending
  std::vector<double> pd;
  std::vector<double> pfa;
};

/// 200 logarithmically spaced thresholds from the max recovered magnitude
/// down to 1e-6 of it.
std::vector<double> default_thresholds(const std::vector<TrialRecord>& records,
                                       int count = 200);

/// Detection = on-support lasso magnitude above threshold (counted against
/// S per trial); false alarm = off-support magnitude above threshold
/// (counted against N - S). Averaged over trials.
RocCurve roc(const std::vector<TrialRecord>& records,
             std::vector<double> thresholds);

/// P_d at the largest threshold whose P_fa does not exceed pfa_target.
double pd_at_pfa(const RocCurve& curve, double pfa_target);

struct TheoryReport {
  std::string bound_name;
  double bound_value = 0.0;
  double empirical_max = 0.0;
  double empirical_min = 0.0;
  int violations = 0;
  int trials = 0;
  double claimed_failure_probability = -1.0;  // < 0: theory gives none
  bool hypothesis_ok = false;
  std::string hypothesis_detail;
  bool forced = false;
};

/// max(N_R N_T, 32 N_T^3 log(N_tau N_f N_beta)) <= N_s and
/// log^2(N_tau N_f N_beta) <= N_T <= N_R; detail describes both.
bool check_hypotheses(const TrialConfig& cfg, bool need_second,
                      std::string* detail);

/// ||A||_op^2 <= 2 N_f N_R^2 N_T^2 over cfg.trials random geometries;
/// claimed failure probability 8 N_tau^-2 N_R^-1. Refuses when the operator
/// hypothesis fails unless force.
TheoryReport verify_operator_norm_bound(const TrialConfig& cfg,
                                        bool force = false);

/// max cross inner product <= 16 N_R log(N_tau N_f N_R N_T), dense Gram.
TheoryReport verify_coherence_bound(const TrialConfig& cfg,
                                    bool force = false);

/// All column norms^2 inside [N_R N_T / 3, 5 N_R N_T / 3]; claimed failure
/// probability 8 N_tau^-2 N_R^-1.
TheoryReport verify_column_norms(const TrialConfig& cfg, bool force = false);

enum class BernsteinModel {
  bounded,        // |m_kj| <= 1/sqrt(n) everywhere
  unit_diagonal,  // unit diagonal, |m_kj| <= 1/sqrt(n) off it
};

/// Empirical tail rates for the quadratic-form concentration bounds, one
/// report per inequality applicable to the model:
///   bounded:       P(|<Ma,b>| > m t)      <= 4m exp(-t^2 n / (4m))
///                  P(|<Ma,a>| > 2m t)     <= 8m exp(-t^2 n / (2m))
///   unit_diagonal: P(|<Ma,b>| > s + m t)  <= 4 exp(-s^2/(4m)) + 4m exp(-t^2 n/(4m))
///                  P(|<Ma,a>| outside m(1 +- 2t)) <= 8m exp(-t^2 n / (2m))
/// with a, b i.i.d. uniform unit-modulus entries and a fresh M per draw.
std::vector<TheoryReport> bernstein_mc(int m, double n, BernsteinModel model,
                                       double t, double s, int trials,
                                       std::uint64_t seed);

std::string theory_report_to_json(const TheoryReport& report);

void write_records_csv(const std::vector<TrialRecord>& records,
                       const std::string& path);
std::vector<TrialRecord> read_records_csv(const std::string& path);
void write_roc_csv(const RocCurve& curve, const std::string& path);

}  // namespace csradar
