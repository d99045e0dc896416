#include "csradar/sensing.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "csradar/rng.hpp"

namespace csradar {

SensingOperator::SensingOperator(WaveformSet waveforms, ArrayGeometry geometry,
                                 Grid grid)
    : waveforms_(std::move(waveforms)),
      geometry_(std::move(geometry)),
      grid_(grid),
      n_samples_(waveforms_.p) {
  if (geometry_.n_tx() != waveforms_.n_tx)
    throw std::invalid_argument(
        "SensingOperator: geometry/waveform transmit counts differ");
  if (grid_.n_delay != n_samples_)
    throw std::invalid_argument("SensingOperator: requires N_tau == N_s");
  if (grid_.n_doppler > n_samples_)
    throw std::invalid_argument("SensingOperator: requires N_f <= N_s");
  if (grid_.n_azimuth != geometry_.n_rx() * geometry_.n_tx())
    throw std::invalid_argument(
        "SensingOperator: grid azimuth count must equal N_R*N_T");

  const int nb = grid_.n_azimuth;
  composites_.resize(n_samples_, nb);
  rx_manifold_.resize(geometry_.n_rx(), nb);
  fft_ = std::make_unique<Fft>(n_samples_);

  doppler_.resize(n_samples_, grid_.n_doppler);
  for (int f = 0; f < grid_.n_doppler; ++f)
    for (int l = 0; l < n_samples_; ++l) {
      const double theta = 2.0 * std::numbers::pi * f * l / n_samples_;
      doppler_(l, f) = cx{std::cos(theta), std::sin(theta)};
    }

  CVec hat(n_samples_);
  composites_hat_.resize(n_samples_, nb);
  for (int b = 0; b < nb; ++b) {
    const auto [tx, rx] = steering_vectors(geometry_, grid_.azimuth(b));
    composites_.col(b) = waveforms_.columns * tx;
    rx_manifold_.col(b) = rx;
    CVec c = composites_.col(b);
    fft_->forward(c, hat);
    composites_hat_.col(b) = hat;
  }
}

CVec SensingOperator::apply_forward(const CVec& x) const {
  if (x.size() != domain_dim())
    throw std::invalid_argument("apply_forward: dimension mismatch");
  const int ns = n_samples_;
  const int nf = grid_.n_doppler;
  const int nb = grid_.n_azimuth;
  const int nr = geometry_.n_rx();

  CVec y = CVec::Zero(range_dim());
  CVec xhat(ns), conv(ns), block(ns), accum(ns);
  for (int b = 0; b < nb; ++b) {
    accum.setZero();
    for (int f = 0; f < nf; ++f) {
      block = x.segment(static_cast<std::int64_t>(ns) * (f + static_cast<std::int64_t>(nf) * b), ns);
      fft_->forward(block, xhat);
      xhat.array() *= composites_hat_.col(b).array();
      fft_->inverse(xhat, conv);  // c_beta (*) x_{beta,f}
      accum.array() += conv.array() * doppler_.col(f).array();
    }
    for (int j = 0; j < nr; ++j)
      y.segment(static_cast<std::int64_t>(j) * ns, ns) += rx_manifold_(j, b) * accum;
  }
  return y;
}

CVec SensingOperator::apply_adjoint(const CVec& y) const {
  if (y.size() != range_dim())
    throw std::invalid_argument("apply_adjoint: dimension mismatch");
  const int ns = n_samples_;
  const int nf = grid_.n_doppler;
  const int nb = grid_.n_azimuth;
  const int nr = geometry_.n_rx();

  CVec x(domain_dim());
  CVec w(ns), z(ns), zhat(ns), corr(ns);
  for (int b = 0; b < nb; ++b) {
    // Receiver combination first: w_beta = sum_j conj(a_R(beta)_j) y_j.
    w.setZero();
    for (int j = 0; j < nr; ++j)
      w += std::conj(rx_manifold_(j, b)) * y.segment(static_cast<std::int64_t>(j) * ns, ns);
    for (int f = 0; f < nf; ++f) {
      z.array() = w.array() * doppler_.col(f).array().conjugate();
      fft_->forward(z, zhat);
      zhat.array() *= composites_hat_.col(b).array().conjugate();
      fft_->inverse(zhat, corr);  // corr(tau) = sum_l z(l) conj(c(l-tau))
      x.segment(static_cast<std::int64_t>(ns) * (f + static_cast<std::int64_t>(nf) * b), ns) = corr;
    }
  }
  return x;
}

CVec SensingOperator::column(int tau, int f, int b) const {
  const int ns = n_samples_;
  const int nr = geometry_.n_rx();
  const CVec shifted = modulate(translate(composites_.col(b), tau), f);
  CVec col(range_dim());
  for (int j = 0; j < nr; ++j)
    col.segment(static_cast<std::int64_t>(j) * ns, ns) = rx_manifold_(j, b) * shifted;
  return col;
}

CVec SensingOperator::column(std::int64_t cell) const {
  int tau, f, b;
  grid_.cell_coords(cell, tau, f, b);
  return column(tau, f, b);
}

CMat dense_matrix(const SensingOperator& op, std::int64_t max_entries) {
  const std::int64_t entries = op.domain_dim() * op.range_dim();
  if (entries > max_entries)
    throw std::runtime_error("dense_matrix: memory cap exceeded");
  CMat a(op.range_dim(), op.domain_dim());
  const Grid& g = op.grid();
  for (int b = 0; b < g.n_azimuth; ++b)
    for (int f = 0; f < g.n_doppler; ++f)
      for (int tau = 0; tau < g.n_delay; ++tau)
        a.col(g.cell_index(tau, f, b)) = op.column(tau, f, b);
  return a;
}

ColumnNorms column_norms(const SensingOperator& op) {
  const Grid& g = op.grid();
  const int nr = op.geometry().n_rx();
  ColumnNorms out;
  out.per_azimuth_norm2.resize(g.n_azimuth);
  for (int b = 0; b < g.n_azimuth; ++b)
    out.per_azimuth_norm2(b) = nr * op.composite(b).squaredNorm();
  out.norms.resize(g.cells());
  for (int b = 0; b < g.n_azimuth; ++b) {
    const double nrm = std::sqrt(out.per_azimuth_norm2(b));
    const std::int64_t base = g.cell_index(0, 0, b);
    const std::int64_t count = static_cast<std::int64_t>(g.n_delay) * g.n_doppler;
    out.norms.segment(base, count).setConstant(nrm);
  }
  out.kappa_d = out.norms.maxCoeff() / out.norms.minCoeff();
  return out;
}

CoherenceResult coherence(const SensingOperator& op, std::int64_t max_entries) {
  const CMat a = dense_matrix(op, max_entries);
  const CMat gram = a.adjoint() * a;
  CoherenceResult res;
  if (gram.rows() < 2) return res;  // single cell: no off-diagonal pairs
  for (Eigen::Index k = 0; k < gram.rows(); ++k)
    for (Eigen::Index l = k + 1; l < gram.cols(); ++l) {
      const double ip = std::abs(gram(k, l));
      if (ip > res.max_inner_product) {
        res.max_inner_product = ip;
        res.argmax_k = k;
        res.argmax_l = l;
      }
      const double mu =
          ip / std::sqrt(std::real(gram(k, k)) * std::real(gram(l, l)));
      res.mu = std::max(res.mu, mu);
    }
  return res;
}

OperatorNormResult operator_norm(const SensingOperator& op, double tol,
                                 int max_iters, std::uint64_t seed) {
  Rng rng(seed);
  CVec v(op.domain_dim());
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.complex_normal(1.0);
  v.normalize();

  OperatorNormResult res;
  double lambda_prev = 0.0;
  for (int it = 1; it <= max_iters; ++it) {
    CVec w = op.apply_adjoint(op.apply_forward(v));
    const double lambda = w.norm();
    if (lambda == 0.0) {
      res.norm = 0.0;
      res.converged = true;
      res.iterations = it;
      return res;
    }
    v = w / lambda;
    res.iterations = it;
    if (it > 1 && std::abs(lambda - lambda_prev) <= tol * lambda) {
      res.norm = std::sqrt(lambda);
      res.converged = true;
      return res;
    }
    lambda_prev = lambda;
  }
  res.norm = std::sqrt(lambda_prev);
  res.converged = false;
  return res;
}

Measurement add_noise(const CVec& y_clean, double snr_db, std::uint64_t seed) {
  if (std::isinf(snr_db)) {
    Measurement m;
    m.y = y_clean;
    m.sigma = 0.0;
    m.seed = seed;
    return m;
  }
  const double energy = y_clean.squaredNorm();
  if (energy == 0.0)
    throw std::invalid_argument("add_noise: zero signal with finite SNR");
  const double sigma2 =
      energy / (static_cast<double>(y_clean.size()) * std::pow(10.0, snr_db / 10.0));
  return add_noise_sigma(y_clean, std::sqrt(sigma2), seed);
}

Measurement add_noise_sigma(const CVec& y_clean, double sigma,
                            std::uint64_t seed) {
  Rng rng(seed);
  Measurement m;
  m.sigma = sigma;
  m.seed = seed;
  m.y = y_clean;
  for (Eigen::Index k = 0; k < m.y.size(); ++k) m.y(k) += rng.complex_normal(sigma);
  return m;
}

std::string operator_config_to_json(const SensingOperator& op,
                                    const std::string& waveform_file) {
  nlohmann::json j;
  j["waveform_file"] = waveform_file;
  j["waveform_family"] = to_string(op.waveforms().family_tag);
  j["p"] = op.waveforms().p;
  j["n_tx"] = op.geometry().n_tx();
  j["n_rx"] = op.geometry().n_rx();
  j["n_delay"] = op.grid().n_delay;
  j["n_doppler"] = op.grid().n_doppler;
  j["n_azimuth"] = op.grid().n_azimuth;
  j["geometry_seed"] = op.geometry().seed;
  j["tx_positions"] = std::vector<double>(
      op.geometry().tx_positions.data(),
      op.geometry().tx_positions.data() + op.geometry().n_tx());
  j["rx_positions"] = std::vector<double>(
      op.geometry().rx_positions.data(),
      op.geometry().rx_positions.data() + op.geometry().n_rx());
  return j.dump(2);
}

void write_measurement_csv(const Measurement& m, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "index,real,imag\n";
  for (Eigen::Index k = 0; k < m.y.size(); ++k)
    os << k << "," << m.y(k).real() << "," << m.y(k).imag() << "\n";
}

Measurement read_measurement_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("measurement csv: empty");
  std::vector<cx> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    const double re = std::stod(cell);
    std::getline(row, cell, ',');
    const double im = std::stod(cell);
    vals.push_back({re, im});
  }
  Measurement m;
  m.y.resize(static_cast<Eigen::Index>(vals.size()));
  for (size_t k = 0; k < vals.size(); ++k) m.y(static_cast<Eigen::Index>(k)) = vals[k];
  return m;
}

}  // namespace csradar
