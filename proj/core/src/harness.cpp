#include "csradar/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "csradar/rng.hpp"

namespace csradar {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master ^ (0x2545f4914f6cdd1dULL * (index + 1));
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  return z ^ (z >> 33);
}

namespace {

WaveformSet make_waveforms(const TrialConfig& cfg) {
  switch (cfg.family) {
    case WaveformFamily::kerdock:
      return kerdock_waveforms(kerdock_family(cfg.p), cfg.n_tx);
    case WaveformFamily::alltop:
      return alltop_waveforms(cfg.p, cfg.n_tx);
    case WaveformFamily::external:
      throw std::invalid_argument(
          "campaign configs must name a constructible family "
          "(kerdock or alltop); load external sets via the waveform CSV API");
  }
  throw std::logic_error("unreachable");
}

TrialRecord run_one(const TrialConfig& cfg, const WaveformSet& set,
                    const Grid& grid, int t) {
  TrialRecord rec;
  rec.trial = t;
  rec.geometry_seed = derive_seed(cfg.master_seed, 3 * t);
  rec.scene_seed = derive_seed(cfg.master_seed, 3 * t + 1);
  rec.noise_seed = derive_seed(cfg.master_seed, 3 * t + 2);
  rec.cells = grid.cells();
  try {
    const ArrayGeometry geom =
        sample_geometry(cfg.n_tx, cfg.n_rx, rec.geometry_seed);
    const SensingOperator op(set, geom, grid);
    SparseScene scene =
        sample_scene(grid, cfg.sparsity, cfg.magnitude, rec.scene_seed);
    CVec x = scene.dense(grid);
    CVec y_clean = op.apply_forward(x);

    double sigma = 0.0;
    if (std::isfinite(cfg.snr_db)) {
      sigma = std::sqrt(y_clean.squaredNorm() /
                        (static_cast<double>(op.range_dim()) *
                         std::pow(10.0, cfg.snr_db / 10.0)));
    }
    if (cfg.floor_multiple > 0.0 && sigma > 0.0) {
      const double ref = scene.amplitudes.cwiseAbs().minCoeff();
      const double target =
          cfg.floor_multiple * min_amplitude(sigma, cfg.n_rx, cfg.n_tx, grid);
      const double c = target / ref;
      scene.scale(c);
      x *= c;
      y_clean *= c;
    }
    const Measurement meas = add_noise_sigma(y_clean, sigma, rec.noise_seed);

    LassoConfig solver = cfg.solver;
    if (solver.lambda <= 0.0) solver.lambda = default_lambda(sigma, grid);
    const RecoveryResult res = debiased_lasso(op, meas.y, solver);

    rec.sigma = sigma;
    rec.lambda = solver.lambda;
    rec.converged = res.converged;
    rec.true_support = scene.support;
    rec.detected_support = res.support;
    rec.support_exact = res.support == scene.support;
    rec.relative_error = (res.x_debiased - x).norm() / x.norm();
    rec.error_bound =
        5.0 * sigma * std::sqrt(3.0 * cfg.n_rx * cfg.p) / meas.y.norm();
    for (Eigen::Index k = 0; k < res.x_lasso.size(); ++k) {
      const double m = std::abs(res.x_lasso(k));
      if (m > 0.0) {
        rec.lasso_cells.push_back(k);
        rec.lasso_magnitudes.push_back(m);
      }
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_trials(const TrialConfig& cfg) {
  if (cfg.trials < 1)
    throw std::invalid_argument("run_trials: trial count must be >= 1");
  const WaveformSet set = make_waveforms(cfg);
  const Grid grid = make_grid(cfg.p, cfg.n_doppler, cfg.n_rx, cfg.n_tx);

  std::vector<TrialRecord> records(cfg.trials);
  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (int t = 0; t < cfg.trials; ++t) records[t] = run_one(cfg, set, grid, t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (int t = next++; t < cfg.trials; t = next++)
          records[t] = run_one(cfg, set, grid, t);
      });
    for (auto& th : pool) th.join();
  }
  return records;
}

double success_rate(const std::vector<TrialRecord>& records) {
  if (records.empty()) return 0.0;
  int hits = 0;
  for (const auto& r : records) hits += (r.error.empty() && r.support_exact);
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::vector<double> default_thresholds(const std::vector<TrialRecord>& records,
                                       int count) {
  if (count < 1) throw std::invalid_argument("default_thresholds: count < 1");
  double mx = 0.0;
  for (const auto& r : records)
    for (const double m : r.lasso_magnitudes) mx = std::max(mx, m);
  std::vector<double> thr(count);
  if (mx == 0.0) {
    thr.assign(count, 0.0);
    return thr;
  }
  for (int i = 0; i < count; ++i)
    thr[i] = mx * std::pow(10.0, -6.0 * i / std::max(1, count - 1));
  return thr;
}

RocCurve roc(const std::vector<TrialRecord>& records,
             std::vector<double> thresholds) {
  if (records.empty()) throw std::invalid_argument("roc: no records");
  std::sort(thresholds.begin(), thresholds.end(), std::greater<double>());

  // Pool magnitudes: the denominators sum over trials anyway.
  std::vector<double> on, off;
  std::int64_t total_s = 0, total_off = 0;
  int usable = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) continue;
    ++usable;
    total_s += static_cast<std::int64_t>(r.true_support.size());
    total_off += r.cells - static_cast<std::int64_t>(r.true_support.size());
    for (size_t k = 0; k < r.lasso_cells.size(); ++k) {
      const bool hit = std::binary_search(r.true_support.begin(),
                                          r.true_support.end(), r.lasso_cells[k]);
      (hit ? on : off).push_back(r.lasso_magnitudes[k]);
    }
  }
  if (usable == 0) throw std::invalid_argument("roc: all trials failed");
  std::sort(on.begin(), on.end(), std::greater<double>());
  std::sort(off.begin(), off.end(), std::greater<double>());

  const auto count_above = [](const std::vector<double>& v, double thr) {
    // v sorted descending; count of entries strictly above thr.
    return static_cast<double>(
        std::lower_bound(v.begin(), v.end(), thr,
                         [](double a, double b) { return a > b; }) -
        v.begin());
  };

  RocCurve curve;
  curve.thresholds = thresholds;
  for (const double thr : thresholds) {
    curve.pd.push_back(total_s ? count_above(on, thr) / total_s : 0.0);
    curve.pfa.push_back(total_off ? count_above(off, thr) / total_off : 0.0);
  }
  return curve;
}

double pd_at_pfa(const RocCurve& curve, double pfa_target) {
  double best = 0.0;
  for (size_t i = 0; i < curve.thresholds.size(); ++i)
    if (curve.pfa[i] <= pfa_target) best = std::max(best, curve.pd[i]);
  return best;
}

bool check_hypotheses(const TrialConfig& cfg, bool need_second,
                      std::string* detail) {
  const Grid grid = make_grid(cfg.p, cfg.n_doppler, cfg.n_rx, cfg.n_tx);
  const double log_n = std::log(static_cast<double>(grid.cells()));
  const double lhs1 =
      std::max(static_cast<double>(cfg.n_rx) * cfg.n_tx,
               32.0 * std::pow(cfg.n_tx, 3) * log_n);
  const bool ok1 = lhs1 <= cfg.p;
  const bool ok2 = log_n * log_n <= cfg.n_tx && cfg.n_tx <= cfg.n_rx;
  if (detail) {
    std::ostringstream os;
    os << "max(N_R N_T, 32 N_T^3 log N) = " << lhs1 << (ok1 ? " <= " : " > ")
       << "N_s = " << cfg.p << "; log^2 N = " << log_n * log_n
       << (ok2 ? " <= " : " vs ") << "N_T = " << cfg.n_tx
       << (cfg.n_tx <= cfg.n_rx ? " <= " : " > ") << "N_R = " << cfg.n_rx;
    *detail = os.str();
  }
  return need_second ? (ok1 && ok2) : ok1;
}

namespace {

void require_hypotheses(const TrialConfig& cfg, bool need_second, bool force,
                        TheoryReport& report) {
  report.hypothesis_ok = check_hypotheses(cfg, need_second,
                                          &report.hypothesis_detail);
  report.forced = force;
  if (!report.hypothesis_ok && !force)
    throw std::runtime_error("bound hypothesis not met (" +
                             report.hypothesis_detail +
                             "); rerun with force to check anyway");
}

}  // namespace

TheoryReport verify_operator_norm_bound(const TrialConfig& cfg, bool force) {
  TheoryReport report;
  report.bound_name = "operator_norm_squared <= 2 N_f N_R^2 N_T^2";
  require_hypotheses(cfg, false, force, report);
  report.bound_value = 2.0 * cfg.n_doppler * std::pow(cfg.n_rx, 2) *
                       std::pow(cfg.n_tx, 2);
  report.claimed_failure_probability =
      8.0 / (std::pow(cfg.p, 2) * cfg.n_rx);
  report.trials = cfg.trials;
  report.empirical_min = std::numeric_limits<double>::infinity();
  report.empirical_max = 0.0;

  const WaveformSet set = make_waveforms(cfg);
  const Grid grid = make_grid(cfg.p, cfg.n_doppler, cfg.n_rx, cfg.n_tx);
  for (int t = 0; t < cfg.trials; ++t) {
    const ArrayGeometry geom =
        sample_geometry(cfg.n_tx, cfg.n_rx, derive_seed(cfg.master_seed, t));
    const SensingOperator op(set, geom, grid);
    const auto pow_it =
        operator_norm(op, 1e-6, 500, derive_seed(cfg.master_seed, 1u << 20 | t));
    const double norm2 = pow_it.norm * pow_it.norm;
    report.empirical_min = std::min(report.empirical_min, norm2);
    report.empirical_max = std::max(report.empirical_max, norm2);
    report.violations += norm2 > report.bound_value;
  }
  return report;
}

TheoryReport verify_coherence_bound(const TrialConfig& cfg, bool force) {
  TheoryReport report;
  report.bound_name = "max cross inner product <= 16 N_R log(N_tau N_f N_R N_T)";
  require_hypotheses(cfg, true, force, report);
  const double nt = cfg.n_tx, nr = cfg.n_rx, ntau = cfg.p, nf = cfg.n_doppler;
  report.bound_value = 16.0 * nr * std::log(ntau * nf * nr * nt);
  report.claimed_failure_probability =
      8.0 / (ntau * ntau * nf * nf) + 4.0 * nt / (ntau * ntau * nf * nf) +
      4.0 / (ntau * nf) +
      4.0 / (std::pow(ntau, 3) * std::pow(nf, 3) * nr * nr * nt) +
      8.0 / (nt * nt * std::pow(ntau * nf * nr, 3));
  report.trials = cfg.trials;
  report.empirical_min = std::numeric_limits<double>::infinity();
  report.empirical_max = 0.0;

  const WaveformSet set = make_waveforms(cfg);
  const Grid grid = make_grid(cfg.p, cfg.n_doppler, cfg.n_rx, cfg.n_tx);
  for (int t = 0; t < cfg.trials; ++t) {
    const ArrayGeometry geom =
        sample_geometry(cfg.n_tx, cfg.n_rx, derive_seed(cfg.master_seed, t));
    const SensingOperator op(set, geom, grid);
    const double stat = coherence(op).max_inner_product;
    report.empirical_min = std::min(report.empirical_min, stat);
    report.empirical_max = std::max(report.empirical_max, stat);
    report.violations += stat > report.bound_value;
  }
  return report;
}

TheoryReport verify_column_norms(const TrialConfig& cfg, bool force) {
  TheoryReport report;
  report.bound_name = "column norms^2 within [N_R N_T / 3, 5 N_R N_T / 3]";
  require_hypotheses(cfg, false, force, report);
  const double nrnt = static_cast<double>(cfg.n_rx) * cfg.n_tx;
  report.bound_value = 5.0 * nrnt / 3.0;  // upper edge; lower edge is /5
  report.claimed_failure_probability =
      8.0 / (std::pow(cfg.p, 2) * cfg.n_rx);
  report.trials = cfg.trials;
  report.empirical_min = std::numeric_limits<double>::infinity();
  report.empirical_max = 0.0;

  const WaveformSet set = make_waveforms(cfg);
  const Grid grid = make_grid(cfg.p, cfg.n_doppler, cfg.n_rx, cfg.n_tx);
  for (int t = 0; t < cfg.trials; ++t) {
    const ArrayGeometry geom =
        sample_geometry(cfg.n_tx, cfg.n_rx, derive_seed(cfg.master_seed, t));
    const SensingOperator op(set, geom, grid);
    const ColumnNorms cn = column_norms(op);
    const double lo = cn.per_azimuth_norm2.minCoeff();
    const double hi = cn.per_azimuth_norm2.maxCoeff();
    report.empirical_min = std::min(report.empirical_min, lo);
    report.empirical_max = std::max(report.empirical_max, hi);
    report.violations += (lo < nrnt / 3.0 || hi > 5.0 * nrnt / 3.0);
  }
  return report;
}

std::vector<TheoryReport> bernstein_mc(int m, double n, BernsteinModel model,
                                       double t, double s, int trials,
                                       std::uint64_t seed) {
  if (m < 1 || n <= 0 || trials < 1)
    throw std::invalid_argument("bernstein_mc: bad dimensions");
  const double md = m;
  const bool unit_diag = model == BernsteinModel::unit_diagonal;

  TheoryReport bilinear, quadratic;
  bilinear.trials = quadratic.trials = trials;
  if (unit_diag) {
    bilinear.bound_name = "bilinear_tail_unit_diagonal: |<Ma,b>| <= s + m t";
    bilinear.bound_value = s + md * t;
    bilinear.claimed_failure_probability =
        std::min(1.0, 4.0 * std::exp(-s * s / (4.0 * md)) +
                          4.0 * md * std::exp(-t * t * n / (4.0 * md)));
    quadratic.bound_name =
        "quadratic_band_unit_diagonal: |<Ma,a>| in m(1 +- 2t)";
    quadratic.bound_value = md * (1.0 + 2.0 * t);
    quadratic.claimed_failure_probability =
        std::min(1.0, 8.0 * md * std::exp(-t * t * n / (2.0 * md)));
  } else {
    bilinear.bound_name = "bilinear_tail_bounded: |<Ma,b>| <= m t";
    bilinear.bound_value = md * t;
    bilinear.claimed_failure_probability =
        std::min(1.0, 4.0 * md * std::exp(-t * t * n / (4.0 * md)));
    quadratic.bound_name = "quadratic_tail_bounded: |<Ma,a>| <= 2 m t";
    quadratic.bound_value = 2.0 * md * t;
    quadratic.claimed_failure_probability =
        std::min(1.0, 8.0 * md * std::exp(-t * t * n / (2.0 * md)));
  }
  bilinear.hypothesis_ok = quadratic.hypothesis_ok = true;
  bilinear.empirical_min = quadratic.empirical_min =
      std::numeric_limits<double>::infinity();
  bilinear.empirical_max = quadratic.empirical_max = 0.0;

  const double scale = 1.0 / std::sqrt(n);
  CMat mat(m, m);
  CVec alpha(m), beta(m);
  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, trial));
    for (int c = 0; c < m; ++c)
      for (int r = 0; r < m; ++r) mat(r, c) = scale * rng.unit_phase();
    if (unit_diag) mat.diagonal().setOnes();
    for (int k = 0; k < m; ++k) alpha(k) = rng.unit_phase();
    for (int k = 0; k < m; ++k) beta(k) = rng.unit_phase();

    const CVec ma = mat * alpha;
    const double ab = std::abs(beta.dot(ma));   // |<Ma, b>|
    const double aa = std::abs(alpha.dot(ma));  // |<Ma, a>|
    bilinear.empirical_min = std::min(bilinear.empirical_min, ab);
    bilinear.empirical_max = std::max(bilinear.empirical_max, ab);
    quadratic.empirical_min = std::min(quadratic.empirical_min, aa);
    quadratic.empirical_max = std::max(quadratic.empirical_max, aa);

    bilinear.violations += ab > bilinear.bound_value;
    if (unit_diag)
      quadratic.violations +=
          (aa < md * (1.0 - 2.0 * t) || aa > md * (1.0 + 2.0 * t));
    else
      quadratic.violations += aa > quadratic.bound_value;
  }
  return {bilinear, quadratic};
}

std::string theory_report_to_json(const TheoryReport& report) {
  nlohmann::json j;
  j["bound_name"] = report.bound_name;
  j["bound_value"] = report.bound_value;
  j["empirical_max"] = report.empirical_max;
  j["empirical_min"] = report.empirical_min;
  j["violations"] = report.violations;
  j["trials"] = report.trials;
  if (report.claimed_failure_probability >= 0.0)
    j["claimed_failure_probability"] = report.claimed_failure_probability;
  j["hypothesis_ok"] = report.hypothesis_ok;
  j["hypothesis_detail"] = report.hypothesis_detail;
  j["forced"] = report.forced;
  return j.dump(2);
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (size_t k = 0; k < v.size(); ++k) {
    if (k) os << ';';
    os << v[k];
  }
  return os.str();
}

template <typename T>
std::vector<T> split_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    if constexpr (std::is_same_v<T, double>)
      out.push_back(std::stod(item));
    else
      out.push_back(static_cast<T>(std::stoll(item)));
  }
  return out;
}

}  // namespace

void write_records_csv(const std::vector<TrialRecord>& records,
                       const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "trial,geometry_seed,scene_seed,noise_seed,sigma,lambda,converged,"
        "support_exact,relative_error,error_bound,cells,true_support,"
        "detected_support,lasso_cells,lasso_magnitudes,error\n";
  for (const auto& r : records) {
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << r.trial << ',' << r.geometry_seed << ',' << r.scene_seed << ','
       << r.noise_seed << ',' << r.sigma << ',' << r.lambda << ','
       << int(r.converged) << ',' << int(r.support_exact) << ','
       << r.relative_error << ',' << r.error_bound << ',' << r.cells << ','
       << join(r.true_support) << ',' << join(r.detected_support) << ','
       << join(r.lasso_cells) << ',' << join(r.lasso_magnitudes) << ',' << err
       << '\n';
  }
}

std::vector<TrialRecord> read_records_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("records csv: empty");
  std::vector<TrialRecord> records;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    while (cells.size() < 16) cells.emplace_back();  // trailing empty fields
    TrialRecord r;
    r.trial = std::stoi(cells[0]);
    r.geometry_seed = std::stoull(cells[1]);
    r.scene_seed = std::stoull(cells[2]);
    r.noise_seed = std::stoull(cells[3]);
    r.sigma = std::stod(cells[4]);
    r.lambda = std::stod(cells[5]);
    r.converged = cells[6] == "1";
    r.support_exact = cells[7] == "1";
    r.relative_error = std::stod(cells[8]);
    r.error_bound = std::stod(cells[9]);
    r.cells = std::stoll(cells[10]);
    r.true_support = split_list<std::int64_t>(cells[11]);
    r.detected_support = split_list<std::int64_t>(cells[12]);
    r.lasso_cells = split_list<std::int64_t>(cells[13]);
    r.lasso_magnitudes = split_list<double>(cells[14]);
    r.error = cells[15];
    records.push_back(std::move(r));
  }
  return records;
}

void write_roc_csv(const RocCurve& curve, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "threshold,pd,pfa\n";
  for (size_t k = 0; k < curve.thresholds.size(); ++k)
    os << curve.thresholds[k] << ',' << curve.pd[k] << ',' << curve.pfa[k]
       << '\n';
}

}  // namespace csradar
