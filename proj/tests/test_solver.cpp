#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "csradar/rng.hpp"
#include "csradar/sensing.hpp"
#include "csradar/solver.hpp"

using namespace csradar;

namespace {

SensingOperator small_op(int seed = 1) {
  const WaveformSet set = alltop_waveforms(5, 2);
  return SensingOperator(set, sample_geometry(2, 3, seed), make_grid(5, 5, 3, 2));
}

// Delta waveform with one antenna pair and one Doppler bin: the columns form
// the standard basis, so the lasso minimizer is the entrywise soft threshold
// of y and every solver claim can be checked in closed form.
SensingOperator orthonormal_op() {
  CMat delta = CMat::Zero(6, 1);
  delta(0, 0) = 1.0;
  return SensingOperator(external_waveforms(delta), sample_geometry(1, 1, 2),
                         make_grid(6, 1, 1, 1));
}

CVec random_vec(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  CVec v(n);
  for (Eigen::Index k = 0; k < n; ++k) v(k) = rng.complex_normal(1.0);
  return v;
}

cx soft(cx v, double t) {
  const double m = std::abs(v);
  return m > t ? v * ((m - t) / m) : cx{0, 0};
}

}  // namespace

TEST_CASE("default lambda closed form") {
  const Grid g = make_grid(37, 37, 6, 6);
  CHECK(default_lambda(0.0, g) == 0.0);
  // 2 sqrt(2 log 49284), frozen from a separate evaluation.
  CHECK(default_lambda(1.0, g) == doctest::Approx(9.2975).epsilon(1e-3));
  // Growing the grid grows lambda.
  const Grid g4 = make_grid(37, 37, 12, 12);
  CHECK(default_lambda(1.0, g4) > default_lambda(1.0, g));
  CHECK_THROWS(default_lambda(-1.0, g));
}

TEST_CASE("zero data and kill-threshold solutions") {
  const SensingOperator op = small_op();
  LassoConfig cfg;
  cfg.lambda = 0.5;
  const RecoveryResult zero = lasso_solve(op, CVec::Zero(op.range_dim()), cfg);
  CHECK(zero.x_lasso.norm() == 0.0);

  const CVec y = random_vec(op.range_dim(), 9);
  LassoConfig kill;
  kill.normalized = false;
  kill.lambda = 1.01 * op.apply_adjoint(y).cwiseAbs().maxCoeff();
  const RecoveryResult dead = lasso_solve(op, y, kill);
  CHECK(dead.x_lasso.norm() == 0.0);
}

TEST_CASE("lasso matches the soft-threshold oracle on orthonormal columns") {
  const SensingOperator op = orthonormal_op();
  const CVec y = random_vec(op.range_dim(), 21);
  const CVec aty = op.apply_adjoint(y);
  for (double lambda : {0.1, 0.5, 1.0}) {
    LassoConfig cfg;
    cfg.lambda = lambda;
    cfg.rel_tol = 1e-14;
    cfg.max_iters = 5000;
    const RecoveryResult res = lasso_solve(op, y, cfg);
    for (Eigen::Index k = 0; k < aty.size(); ++k)
      CHECK(std::abs(res.x_lasso(k) - soft(aty(k), lambda)) < 1e-8);
    CHECK(res.kkt_residual < 1e-3);
    CHECK(res.converged);
  }
  // lambda = 0 reduces to plain least squares (here x = A* y).
  LassoConfig ls;
  ls.lambda = 0.0;
  ls.rel_tol = 1e-14;
  const RecoveryResult res = lasso_solve(op, y, ls);
  CHECK((res.x_lasso - aty).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("one-sparse noiseless recovery with debias") {
  const SensingOperator op = small_op(4);
  CVec x = CVec::Zero(op.domain_dim());
  x(42) = cx{1.2, -0.7};
  const CVec y = op.apply_forward(x);

  LassoConfig cfg;
  cfg.lambda = 0.05;
  const RecoveryResult res = debiased_lasso(op, y, cfg);
  REQUIRE(res.support == std::vector<std::int64_t>{42});
  CHECK(std::abs(res.x_debiased(42) - x(42)) < 1e-8);
  CHECK_FALSE(res.debias_rank_deficient);
  // Lasso shrinks the amplitude toward zero but keeps it on support.
  CHECK(std::abs(res.x_lasso(42)) > 0.0);
  CHECK(std::abs(res.x_lasso(42)) < std::abs(x(42)) + 1e-12);
}

TEST_CASE("support detection thresholds") {
  LassoConfig cfg;
  CVec x = CVec::Zero(10);
  CHECK(detect_support(x, cfg).empty());
  x(3) = 1.0;
  x(7) = 5e-4;  // below the 1e-3 relative default
  CHECK(detect_support(x, cfg) == std::vector<std::int64_t>{3});
  cfg.support_threshold = 0.0;
  CHECK(detect_support(x, cfg) == std::vector<std::int64_t>{3, 7});
}

TEST_CASE("debias is an orthogonal projection") {
  const SensingOperator op = small_op(5);
  const CVec y = random_vec(op.range_dim(), 33);

  const CVec empty = debias(op, y, {});
  CHECK(empty.norm() == 0.0);

  const std::vector<std::int64_t> support{3, 40, 77, 101};
  bool deficient = true;
  const CVec xd = debias(op, y, support, &deficient);
  CHECK_FALSE(deficient);
  for (Eigen::Index k = 0; k < xd.size(); ++k)
    if (std::find(support.begin(), support.end(), k) == support.end())
      CHECK(xd(k) == cx{0.0, 0.0});
  // Residual orthogonal to every support column.
  const CVec r = op.apply_forward(xd) - y;
  for (auto cell : support)
    CHECK(std::abs(op.column(cell).dot(r)) <= 1e-8 * r.norm() * op.column(cell).norm());
}

TEST_CASE("debias flags a rank-deficient support") {
  // Delta waveform with several Doppler bins duplicates columns up to phase.
  CMat delta = CMat::Zero(5, 1);
  delta(0, 0) = 1.0;
  const SensingOperator op(external_waveforms(delta), sample_geometry(1, 1, 3),
                           make_grid(5, 3, 1, 1));
  const Grid& g = op.grid();
  const std::vector<std::int64_t> support{g.cell_index(2, 0, 0),
                                          g.cell_index(2, 1, 0)};
  bool deficient = false;
  (void)debias(op, random_vec(op.range_dim(), 8), support, &deficient);
  CHECK(deficient);
}

TEST_CASE("lasso scale equivariance") {
  const SensingOperator op = small_op(6);
  CVec x = CVec::Zero(op.domain_dim());
  x(10) = 1.0;
  x(90) = cx{0.0, -2.0};
  const CVec y = op.apply_forward(x) + 0.05 * random_vec(op.range_dim(), 3);

  LassoConfig cfg;
  cfg.lambda = 0.3;
  cfg.rel_tol = 1e-12;
  const RecoveryResult base = lasso_solve(op, y, cfg);
  LassoConfig scaled = cfg;
  scaled.lambda = 0.6;
  const RecoveryResult twice = lasso_solve(op, 2.0 * y, scaled);
  CHECK((twice.x_lasso - 2.0 * base.x_lasso).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("normalized and raw solves agree on equal-norm columns") {
  // Single waveform: all column norms identical, so normalization is a
  // global rescale and both paths find the same minimizer.
  const WaveformSet set = alltop_waveforms(7, 1);
  const SensingOperator op(set, sample_geometry(1, 2, 5), make_grid(7, 7, 2, 1));
  CVec x = CVec::Zero(op.domain_dim());
  x(5) = 1.0;
  const CVec y = op.apply_forward(x);
  LassoConfig raw;
  raw.lambda = 0.1;
  raw.normalized = false;
  raw.rel_tol = 1e-12;
  LassoConfig norm = raw;
  norm.normalized = true;
  // Normalized solve penalizes z = D x with D = ||A_c|| I = sqrt(2) I, so the
  // equivalent penalty weight is lambda / sqrt(2).
  norm.lambda = raw.lambda / std::sqrt(2.0);
  const RecoveryResult a = lasso_solve(op, y, raw);
  const RecoveryResult b = lasso_solve(op, y, norm);
  CHECK((a.x_lasso - b.x_lasso).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("matched filter map peaks") {
  const CVec s = alltop_waveforms(11, 1).columns.col(0);
  const CVec y = modulate(translate(s, 4), 7);
  const MatchedFilterMap map = matched_filter_map(s, y);
  CHECK(map.argmax_tau == 4);
  CHECK(map.argmax_f == 7);
  CHECK(map.peak == doctest::Approx(1.0).epsilon(1e-10));
  int at_peak = 0;
  for (int tau = 0; tau < 11; ++tau)
    for (int f = 0; f < 11; ++f)
      if (map.magnitude(tau, f) > map.peak - 1e-9) ++at_peak;
  CHECK(at_peak == 1);

  // Kerdock waveforms carry an ambiguity: a second grid point ties the peak.
  const CVec ks = kerdock_waveforms(kerdock_family(11), 2).columns.col(1);
  const MatchedFilterMap kmap = matched_filter_map(ks, modulate(translate(ks, 4), 7));
  int k_at_peak = 0;
  for (int tau = 0; tau < 11; ++tau)
    for (int f = 0; f < 11; ++f)
      if (kmap.magnitude(tau, f) > kmap.peak - 1e-9) ++k_at_peak;
  CHECK(k_at_peak >= 2);

  CHECK_THROWS(matched_filter_map(s, CVec::Ones(5)));
}

TEST_CASE("recovery json serialization") {
  const SensingOperator op = small_op(7);
  CVec x = CVec::Zero(op.domain_dim());
  x(12) = 2.0;
  LassoConfig cfg;
  cfg.lambda = 0.05;
  const RecoveryResult res = debiased_lasso(op, op.apply_forward(x), cfg);
  const std::string j = recovery_to_json(res);
  CHECK(j.find("\"support\"") != std::string::npos);
  CHECK(j.find("\"kkt_residual\"") != std::string::npos);
}
