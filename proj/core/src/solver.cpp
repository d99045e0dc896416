#include "csradar/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace csradar {

double default_lambda(double sigma, const Grid& grid) {
  if (sigma < 0) throw std::invalid_argument("default_lambda: sigma < 0");
  return 2.0 * sigma * std::sqrt(2.0 * std::log(static_cast<double>(grid.cells())));
}

namespace {

CVec soft_threshold(const CVec& v, double t) {
  CVec out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double m = std::abs(v(k));
    out(k) = (m > t) ? v(k) * ((m - t) / m) : cx{0.0, 0.0};
  }
  return out;
}

// ||A D^{-1}||_op^2 by power iteration on the scaled operator.
double scaled_lipschitz(const SensingOperator& op, const RVec* inv_d) {
  CVec v = CVec::Ones(op.domain_dim());
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    CVec u = inv_d ? CVec(v.cwiseProduct(inv_d->cast<cx>())) : v;
    CVec w = op.apply_adjoint(op.apply_forward(u));
    if (inv_d) w = w.cwiseProduct(inv_d->cast<cx>());
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (it > 4 && std::abs(next - lambda) <= 1e-4 * next) return next;
    lambda = next;
  }
  return lambda;
}

}  // namespace

RecoveryResult lasso_solve(const SensingOperator& op, const CVec& y,
                           const LassoConfig& cfg) {
  if (y.size() != op.range_dim())
    throw std::invalid_argument("lasso_solve: dimension mismatch");
  if (cfg.lambda < 0) throw std::invalid_argument("lasso_solve: lambda < 0");

  RVec inv_d;
  if (cfg.normalized) {
    const ColumnNorms cn = column_norms(op);
    inv_d = cn.norms.cwiseInverse();
  }
  const RVec* scale = cfg.normalized ? &inv_d : nullptr;

  const auto fwd = [&](const CVec& z) {
    return scale ? op.apply_forward(z.cwiseProduct(scale->cast<cx>()))
                 : op.apply_forward(z);
  };
  const auto adj = [&](const CVec& r) {
    CVec g = op.apply_adjoint(r);
    if (scale) g = g.cwiseProduct(scale->cast<cx>());
    return g;
  };

  double lip = cfg.lipschitz > 0 ? cfg.lipschitz : scaled_lipschitz(op, scale);
  lip = std::max(lip * 1.02, 1e-12);  // headroom over the power-iter estimate

  const Eigen::Index n = op.domain_dim();
  CVec z = CVec::Zero(n), z_prev = z;
  CVec az = CVec::Zero(y.size()), az_prev = az;
  double t = 1.0;
  double obj = 0.5 * y.squaredNorm();  // objective at z = 0
  RecoveryResult res;
  res.converged = false;

  for (int it = 1; it <= cfg.max_iters; ++it) {
    double momentum_scale = (t - 1.0) / t;  // set below; first pass uses t=1
    bool retried_plain = false;
    for (;;) {
      const CVec yk = z + momentum_scale * (z - z_prev);
      const CVec ayk = az + momentum_scale * (az - az_prev);
      const CVec grad = adj(ayk - y);
      CVec z_next = soft_threshold(yk - grad / lip, cfg.lambda / lip);
      CVec az_next = fwd(z_next);

      const double f_next = 0.5 * (az_next - y).squaredNorm();
      const CVec diff = z_next - yk;
      const double model = 0.5 * (ayk - y).squaredNorm() +
                           (grad.conjugate().cwiseProduct(diff)).sum().real() +
                           0.5 * lip * diff.squaredNorm();
      if (f_next > model + 1e-10 * std::max(1.0, model)) {
        lip *= 2.0;  // Lipschitz estimate exceeded, backtrack
        continue;
      }

      const double obj_next = f_next + cfg.lambda * z_next.lpNorm<1>();
      if (obj_next > obj + 1e-12 * std::max(1.0, obj) && !retried_plain &&
          momentum_scale != 0.0) {
        // Adaptive restart: drop momentum and retake the step from z.
        t = 1.0;
        momentum_scale = 0.0;
        retried_plain = true;
        continue;
      }

      const double delta = obj - obj_next;
      z_prev.swap(z);
      az_prev.swap(az);
      z = std::move(z_next);
      az = std::move(az_next);
      obj = std::min(obj, obj_next);
      res.iterations = it;

      const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      t = t_next;

      if (it > 1 && std::abs(delta) <= cfg.rel_tol * std::max(1.0, obj))
        res.converged = true;
      break;
    }
    if (res.converged) break;
  }

  res.final_objective = obj;
  if (cfg.lambda > 0) {
    const CVec g = adj(az - y);
    res.kkt_residual = std::max(0.0, g.lpNorm<Eigen::Infinity>() / cfg.lambda - 1.0);
  }
  res.x_lasso = scale ? CVec(z.cwiseProduct(scale->cast<cx>())) : z;
  return res;
}

std::vector<std::int64_t> detect_support(const CVec& x_lasso,
                                         const LassoConfig& cfg) {
  std::vector<std::int64_t> support;
  const double mx = x_lasso.size() ? x_lasso.cwiseAbs().maxCoeff() : 0.0;
  if (mx == 0.0) return support;
  const double thr = cfg.support_threshold * mx;
  for (Eigen::Index k = 0; k < x_lasso.size(); ++k)
    if (std::abs(x_lasso(k)) > thr) support.push_back(k);
  return support;
}

namespace {

CVec scatter(const std::vector<std::int64_t>& support, const CVec& v,
             Eigen::Index n) {
  CVec x = CVec::Zero(n);
  for (size_t k = 0; k < support.size(); ++k) x(support[k]) = v(static_cast<Eigen::Index>(k));
  return x;
}

CVec gather(const std::vector<std::int64_t>& support, const CVec& x) {
  CVec v(static_cast<Eigen::Index>(support.size()));
  for (size_t k = 0; k < support.size(); ++k) v(static_cast<Eigen::Index>(k)) = x(support[k]);
  return v;
}

}  // namespace

CVec debias(const SensingOperator& op, const CVec& y,
            const std::vector<std::int64_t>& support, bool* rank_deficient) {
  if (rank_deficient) *rank_deficient = false;
  if (support.empty()) return CVec::Zero(op.domain_dim());
  if (static_cast<std::int64_t>(support.size()) > op.range_dim())
    throw std::invalid_argument("debias: support larger than range dimension");

  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  CVec coeffs(s);
  if (s <= 10000) {
    CMat sub(op.range_dim(), s);
    for (Eigen::Index k = 0; k < s; ++k) sub.col(k) = op.column(support[k]);
    const Eigen::BDCSVD<CMat> svd(sub, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    // A nearly singular support submatrix indicates a failed detection: the
    // normalized-column theory keeps its eigenvalues in [1/2, 3/2].
    if (rank_deficient && sv(sv.size() - 1) < 1e-8 * sv(0)) *rank_deficient = true;
    coeffs = svd.solve(y);
  } else {
    // CG on the normal equations, matrix-free.
    const auto normal_apply = [&](const CVec& v) {
      return gather(support, op.apply_adjoint(op.apply_forward(
                                 scatter(support, v, op.domain_dim()))));
    };
    const CVec b = gather(support, op.apply_adjoint(y));
    coeffs = CVec::Zero(s);
    CVec r = b, p = b;
    double rs = r.squaredNorm();
    const double tol2 = 1e-20 * b.squaredNorm();
    for (Eigen::Index it = 0; it < 2 * s && rs > tol2; ++it) {
      const CVec ap = normal_apply(p);
      const double alpha = rs / (p.conjugate().cwiseProduct(ap)).sum().real();
      coeffs += alpha * p;
      r -= alpha * ap;
      const double rs_next = r.squaredNorm();
      p = r + (rs_next / rs) * p;
      rs = rs_next;
    }
  }
  return scatter(support, coeffs, op.domain_dim());
}

RecoveryResult debiased_lasso(const SensingOperator& op, const CVec& y,
                              const LassoConfig& cfg) {
  RecoveryResult res = lasso_solve(op, y, cfg);
  res.support = detect_support(res.x_lasso, cfg);
  res.x_debiased = debias(op, y, res.support, &res.debias_rank_deficient);
  return res;
}

MatchedFilterMap matched_filter_map(const CVec& s, const CVec& y) {
  if (s.size() != y.size())
    throw std::invalid_argument("matched_filter_map: length mismatch");
  const int n = static_cast<int>(s.size());
  Fft fft(n);
  CVec shat(n), z(n), zhat(n), corr(n);
  fft.forward(s, shat);

  MatchedFilterMap map;
  map.magnitude.resize(n, n);
  for (int f = 0; f < n; ++f) {
    for (int l = 0; l < n; ++l) {
      const double theta = -2.0 * std::numbers::pi * f * l / n;
      z(l) = y(l) * cx{std::cos(theta), std::sin(theta)};
    }
    fft.forward(z, zhat);
    zhat.array() *= shat.array().conjugate();
    fft.inverse(zhat, corr);
    for (int tau = 0; tau < n; ++tau) {
      const double m = std::abs(corr(tau));
      map.magnitude(tau, f) = m;
      if (m > map.peak) {
        map.peak = m;
        map.argmax_tau = tau;
        map.argmax_f = f;
      }
    }
  }
  return map;
}

std::string recovery_to_json(const RecoveryResult& r) {
  nlohmann::json j;
  j["support"] = r.support;
  std::vector<double> re, im;
  for (const auto cell : r.support) {
    re.push_back(r.x_debiased(cell).real());
    im.push_back(r.x_debiased(cell).imag());
  }
  j["amplitudes_re"] = re;
  j["amplitudes_im"] = im;
  j["iterations"] = r.iterations;
  j["final_objective"] = r.final_objective;
  j["kkt_residual"] = r.kkt_residual;
  j["converged"] = r.converged;
  j["debias_rank_deficient"] = r.debias_rank_deficient;
  return j.dump(2);
}

}  // namespace csradar
