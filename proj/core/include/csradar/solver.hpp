#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csradar/sensing.hpp"
#include "csradar/types.hpp"

namespace csradar {

struct LassoConfig {
  double lambda = 0.0;
  int max_iters = 2000;
  double rel_tol = 1e-8;        // on objective decrease
  double support_threshold = 1e-3;  // relative to max recovered magnitude
  // Solve on the unit-column-normalized operator A D^{-1} and rescale back.
  bool normalized = true;
  // Lipschitz estimate ||A||_op^2; <= 0 means estimate by power iteration.
  double lipschitz = 0.0;
};

struct RecoveryResult {
  CVec x_lasso;
  std::vector<std::int64_t> support;
  CVec x_debiased;  // zero off support
  int iterations = 0;
  double final_objective = 0.0;
  double kkt_residual = 0.0;  // ||A*(A x - y)||_inf / lambda - 1, clamped at 0
  bool converged = false;
  bool debias_rank_deficient = false;
};

/// lambda = 2 sigma sqrt(2 log(N_tau N_f N_beta)).
double default_lambda(double sigma, const Grid& grid);

/// Accelerated proximal gradient (FISTA) with adaptive restart for
/// min 0.5 ||A x - y||^2 + lambda ||x||_1. Fills x_lasso and diagnostics.
RecoveryResult lasso_solve(const SensingOperator& op, const CVec& y,
                           const LassoConfig& cfg);

std::vector<std::int64_t> detect_support(const CVec& x_lasso,
                                         const LassoConfig& cfg);

/// Least-squares re-fit restricted to the support columns (QR up to 1e4
/// columns, CG on the normal equations beyond). Returns a domain vector with
/// zeros off support; sets rank_deficient if the support submatrix has
/// smallest singular value < 1e-8 * largest.
CVec debias(const SensingOperator& op, const CVec& y,
            const std::vector<std::int64_t>& support, bool* rank_deficient = nullptr);

/// Full pipeline: lasso detection, thresholded support, least-squares re-fit.
RecoveryResult debiased_lasso(const SensingOperator& op, const CVec& y,
                              const LassoConfig& cfg);

struct MatchedFilterMap {
  Eigen::MatrixXd magnitude;  // N_tau x N_f, |V(tau, f)|
  int argmax_tau = 0;
  int argmax_f = 0;
  double peak = 0.0;
};

/// |<y, M_f T_tau s>| over the full delay-Doppler grid via FFT.
MatchedFilterMap matched_filter_map(const CVec& s, const CVec& y);

std::string recovery_to_json(const RecoveryResult& r);

}  // namespace csradar
