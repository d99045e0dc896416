#include "csradar/waveforms.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace csradar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cx root_of_unity(long long num, int p) {
  const double theta = kTwoPi * static_cast<double>(((num % p) + p) % p) / p;
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; static_cast<long long>(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

CVec translate(const CVec& x, int tau) {
  const int n = static_cast<int>(x.size());
  CVec out(n);
  const int t = ((tau % n) + n) % n;
  for (int l = 0; l < n; ++l) out(l) = x((l - t + n) % n);
  return out;
}

CVec modulate(const CVec& x, int f) {
  const int n = static_cast<int>(x.size());
  CVec out(n);
  for (int l = 0; l < n; ++l)
    out(l) = x(l) * root_of_unity(static_cast<long long>(f) * l, n);
  return out;
}

cx timefreq_correlation(const CVec& u, const CVec& v, int f, int l) {
  if (u.size() != v.size())
    throw std::invalid_argument("timefreq_correlation: length mismatch");
  const int n = static_cast<int>(u.size());
  const int t = ((l % n) + n) % n;
  cx acc = 0.0;
  for (int m = 0; m < n; ++m)
    acc += u((m - t + n) % n) * root_of_unity(static_cast<long long>(f) * m, n) *
           std::conj(v(m));
  return acc;
}

KerdockFamily kerdock_family(int p) {
  if (!is_prime(p) || p == 2)
    throw std::invalid_argument("kerdock_family: p must be an odd prime");
  if (p < 3 || p > 257)
    throw std::invalid_argument("kerdock_family: p out of supported range");

  KerdockFamily fam;
  fam.p = p;
  fam.bases.reserve(p + 1);

  for (int k = 0; k < p; ++k) {
    // T_1 M_k as a matrix: column c feeds row (c+1 mod p) with phase
    // e^{2 pi i k c / p}.
    CMat op = CMat::Zero(p, p);
    for (int c = 0; c < p; ++c)
      op((c + 1) % p, c) = root_of_unity(static_cast<long long>(k) * c, p);

    Eigen::ComplexEigenSolver<CMat> es(op, /*computeEigenvectors=*/true);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("kerdock_family: eigendecomposition failed");

    // Sort columns by eigenvalue phase ascending in [0, 2pi).
    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phase(p);
    for (int j = 0; j < p; ++j) {
      double a = std::arg(es.eigenvalues()(j));
      if (a < 0) a += kTwoPi;
      phase[j] = a;
    }
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return phase[a] < phase[b]; });

    // Eigenvalues of T_1 M_k are p distinct roots of unity (up to a common
    // phase); a near-repeat means the decomposition cannot be trusted.
    for (int j = 1; j < p; ++j)
      if (phase[order[j]] - phase[order[j - 1]] < std::numbers::pi / p)
        throw std::runtime_error(
            "kerdock_family: repeated eigenvalue in shift operator");

    CMat basis(p, p);
    for (int j = 0; j < p; ++j) {
      CVec col = es.eigenvectors().col(order[j]);
      col.normalize();
      // Global phase: first nonzero entry real positive.
      int first = 0;
      while (first < p && std::abs(col(first)) < 1e-14) ++first;
      if (first < p) col *= std::conj(col(first)) / std::abs(col(first));
      basis.col(j) = col;
    }
    fam.bases.push_back(std::move(basis));
  }
  fam.bases.push_back(CMat::Identity(p, p));
  return fam;
}

std::string to_string(WaveformFamily f) {
  switch (f) {
    case WaveformFamily::kerdock: return "kerdock";
    case WaveformFamily::alltop: return "alltop";
    case WaveformFamily::external: return "external";
  }
  return "external";
}

WaveformFamily waveform_family_from_string(const std::string& s) {
  if (s == "kerdock") return WaveformFamily::kerdock;
  if (s == "alltop") return WaveformFamily::alltop;
  if (s == "external") return WaveformFamily::external;
  throw std::invalid_argument("unknown waveform family: " + s);
}

WaveformSet kerdock_waveforms(const KerdockFamily& family, int n_tx,
                              int j_select) {
  const int p = family.p;
  if (n_tx < 1 || n_tx >= p)
    throw std::invalid_argument(
        "kerdock_waveforms: need 1 <= n_tx < p (identity basis is never "
        "selected)");
  if (j_select < 0 || j_select >= p)
    throw std::invalid_argument("kerdock_waveforms: j_select out of range");

  WaveformSet set;
  set.p = p;
  set.n_tx = n_tx;
  set.family_tag = WaveformFamily::kerdock;
  set.columns.resize(p, n_tx);
  for (int k = 0; k < n_tx; ++k)
    set.columns.col(k) = family.bases[k].col(j_select);
  return set;
}

WaveformSet alltop_waveforms(int p, int n_tx) {
  if (!is_prime(p) || p < 5)
    throw std::invalid_argument(
        "alltop_waveforms: p must be a prime >= 5 (cubic-chirp correlation "
        "bound fails below)");
  if (n_tx < 1 || n_tx > p)
    throw std::invalid_argument("alltop_waveforms: need 1 <= n_tx <= p");

  WaveformSet set;
  set.p = p;
  set.n_tx = n_tx;
  set.family_tag = WaveformFamily::alltop;
  set.columns.resize(p, n_tx);
  const double scale = 1.0 / std::sqrt(static_cast<double>(p));
  for (int k = 0; k < n_tx; ++k)
    for (int l = 0; l < p; ++l)
      set.columns(l, k) =
          scale * root_of_unity(static_cast<long long>(l) * l * l +
                                    static_cast<long long>(k) * l,
                                p);
  return set;
}

WaveformSet external_waveforms(CMat columns) {
  if (columns.size() == 0)
    throw std::invalid_argument("external_waveforms: empty matrix");
  WaveformSet set;
  set.p = static_cast<int>(columns.rows());
  set.n_tx = static_cast<int>(columns.cols());
  set.family_tag = WaveformFamily::external;
  for (int k = 0; k < set.n_tx; ++k) columns.col(k).normalize();
  set.columns = std::move(columns);
  return set;
}

bool KerdockReport::all_pass() const {
  return mub.pass && autocorr_unique.pass && ambiguity_points.pass &&
         crosscorr.pass && polyphase.pass;
}

namespace {

// Matrix Fplus(f, m) = e^{2 pi i f m / p}, so that for any p x p slice
// H_l(m, j) = u_j(m - l) conj(v_j(m)) the product (Fplus * H_l)(f, j) equals
// <M_f T_l u_j, v_j>. One GEMM per delay keeps the exhaustive checks fast.
CMat plus_dft(int p) {
  CMat fp(p, p);
  for (int f = 0; f < p; ++f)
    for (int m = 0; m < p; ++m)
      fp(f, m) = root_of_unity(static_cast<long long>(f) * m, p);
  return fp;
}

CMat shifted_rows(const CMat& u, int l) {
  const int p = static_cast<int>(u.rows());
  CMat out(p, u.cols());
  const int t = ((l % p) + p) % p;
  for (int m = 0; m < p; ++m) out.row(m) = u.row((m - t + p) % p);
  return out;
}

// Max deviation of a column from "modulus 1/sqrt(p), and (after dividing out
// the first entry's phase) every entry a p-th root of unity".
double polyphase_deviation(const CVec& col, int p) {
  const double r = 1.0 / std::sqrt(static_cast<double>(p));
  const cx ref = col(0) / std::abs(col(0));
  double worst = 0.0;
  for (int l = 0; l < p; ++l) {
    worst = std::max(worst, std::abs(std::abs(col(l)) - r));
    const cx z = col(l) / (ref * r);
    const long long nearest = std::llround(std::arg(z) / kTwoPi * p);
    worst = std::max(worst, std::abs(z - root_of_unity(nearest, p)));
  }
  return worst;
}

}  // namespace

KerdockReport verify_kerdock_properties(const KerdockFamily& family,
                                        double tol) {
  const int p = family.p;
  KerdockReport rep;
  rep.p = p;
  rep.tolerance = tol;
  const double inv_sqrt_p = 1.0 / std::sqrt(static_cast<double>(p));
  const CMat fplus = plus_dft(p);

  // (i) MUB magnitudes {1, 0, 1/sqrt(p)}.
  {
    double worst = 0.0;
    for (int k = 0; k <= p; ++k)
      for (int k2 = k; k2 <= p; ++k2) {
        const CMat gram = family.bases[k].adjoint() * family.bases[k2];
        for (int j = 0; j < p; ++j)
          for (int j2 = 0; j2 < p; ++j2) {
            const double m = std::abs(gram(j, j2));
            const double dev = (k == k2)
                                   ? ((j == j2) ? std::abs(m - 1.0) : m)
                                   : std::abs(m - inv_sqrt_p);
            worst = std::max(worst, dev);
          }
      }
    rep.mub = {"mub", worst <= tol, worst,
               "inner-product moduli vs {1, 0, 1/sqrt(p)}"};
  }

  // (ii) autocorrelations. For every (f,l) != (0,0) exactly one basis k0 in
  // 0..p has |corr| = 1 across all columns and every other basis gives 0;
  // per chirp basis the matching (f,l) set (with (0,0)) has exactly p points.
  {
    double worst = 0.0;
    bool unique_ok = true;
    rep.ambiguity_count.assign(p, 0);
    std::vector<int> k0_for(p * p, -1);
    for (int k = 0; k <= p; ++k) {
      const CMat conj_u = family.bases[k].conjugate();
      for (int l = 0; l < p; ++l) {
        const CMat corr =
            fplus * shifted_rows(family.bases[k], l).cwiseProduct(conj_u);
        for (int f = 0; f < p; ++f) {
          double lo = 1.0, hi = 0.0;
          for (int j = 0; j < p; ++j) {
            const double m = std::abs(corr(f, j));
            lo = std::min(lo, m);
            hi = std::max(hi, m);
          }
          const bool matches = lo >= 1.0 - tol;
          if (matches && k < p) ++rep.ambiguity_count[k];
          if (f == 0 && l == 0) continue;  // every basis matches trivially
          if (matches) {
            worst = std::max(worst, std::abs(hi - 1.0));
            int& slot = k0_for[f * p + l];
            if (slot >= 0) unique_ok = false;
            slot = k;
          } else {
            worst = std::max(worst, hi);
          }
        }
      }
    }
    for (int f = 0; f < p; ++f)
      for (int l = 0; l < p; ++l) {
        if (f == 0 && l == 0) continue;
        if (k0_for[f * p + l] < 0) unique_ok = false;
      }
    rep.autocorr_unique = {"autocorr_unique", unique_ok && worst <= tol, worst,
                           "unique k0 per nonzero shift, 0 elsewhere"};
    bool counts_ok = true;
    for (int k = 0; k < p; ++k)
      if (rep.ambiguity_count[k] != p) counts_ok = false;
    rep.ambiguity_points = {"ambiguity_points", counts_ok, 0.0,
                            "p ambiguity points per chirp basis"};
  }

  // (iii) cross-correlation bound, same column index, k != k'. The modulus is
  // shift-reversal symmetric across the pair order, so k < k' suffices.
  {
    double worst = 0.0;
    for (int k = 0; k <= p; ++k)
      for (int k2 = k + 1; k2 <= p; ++k2) {
        const CMat conj_v = family.bases[k2].conjugate();
        for (int l = 0; l < p; ++l) {
          const CMat corr =
              fplus * shifted_rows(family.bases[k], l).cwiseProduct(conj_v);
          const double hi = corr.cwiseAbs().maxCoeff();
          if (hi > inv_sqrt_p) worst = std::max(worst, hi - inv_sqrt_p);
        }
      }
    rep.crosscorr = {"crosscorr", worst <= tol, worst,
                     "|<M_f T_l u_kj, u_k'j>| <= 1/sqrt(p)"};
  }

  // (iv) polyphase in time (k = 0..p-1) and in frequency (k = 1..p).
  {
    double worst = 0.0;
    CMat dft(p, p);
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < p; ++j)
        dft(l, j) = inv_sqrt_p *
                    std::conj(root_of_unity(static_cast<long long>(l) * j, p));
    for (int k = 0; k < p; ++k)
      for (int j = 0; j < p; ++j)
        worst = std::max(worst, polyphase_deviation(family.bases[k].col(j), p));
    for (int k = 1; k <= p; ++k) {
      const CMat hat = dft * family.bases[k];
      for (int j = 0; j < p; ++j)
        worst = std::max(worst, polyphase_deviation(hat.col(j), p));
    }
    rep.polyphase = {"polyphase", worst <= tol, worst,
                     "entries p-th roots of unity up to scale and phase"};
  }

  return rep;
}

IncoherenceReport verify_incoherence(const WaveformSet& set, double gamma) {
  const int p = set.p;
  const int n = set.n_tx;
  IncoherenceReport rep;
  rep.gamma_checked = gamma;
  const double bound = gamma / std::sqrt(static_cast<double>(p));
  const CMat fplus = plus_dft(p);

  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      const CVec conj_v = set.columns.col(j).conjugate();
      for (int l = 0; l < p; ++l) {
        const CVec corr =
            fplus * translate(set.columns.col(k), l).cwiseProduct(conj_v);
        for (int f = 0; f < p; ++f) {
          const double m = std::abs(corr(f));
          if (k == j) {
            if (f == 0 && l == 0) continue;
            rep.worst_auto = std::max(rep.worst_auto, m);
          } else {
            rep.worst_cross = std::max(rep.worst_cross, m);
          }
        }
      }
    }

  const double worst = std::max(rep.worst_auto, rep.worst_cross);
  rep.gamma_required = worst * std::sqrt(static_cast<double>(p));
  rep.pass = worst <= bound + 1e-12;
  return rep;
}

void write_waveforms_csv(const WaveformSet& set, std::ostream& os) {
  os.precision(17);
  os << set.p << "," << set.n_tx << "," << to_string(set.family_tag) << "\n";
  for (int l = 0; l < set.p; ++l) {
    for (int k = 0; k < set.n_tx; ++k) {
      if (k) os << ",";
      os << set.columns(l, k).real() << "," << set.columns(l, k).imag();
    }
    os << "\n";
  }
}

void write_waveforms_csv(const WaveformSet& set, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_waveforms_csv(set, os);
}

WaveformSet read_waveforms_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("waveform csv: missing header");
  std::stringstream hdr(line);
  std::string p_s, n_s, fam_s;
  if (!std::getline(hdr, p_s, ',') || !std::getline(hdr, n_s, ',') ||
      !std::getline(hdr, fam_s, ','))
    throw std::runtime_error("waveform csv: malformed header");
  WaveformSet set;
  set.p = std::stoi(p_s);
  set.n_tx = std::stoi(n_s);
  set.family_tag = waveform_family_from_string(fam_s);
  if (set.p <= 0 || set.n_tx <= 0)
    throw std::runtime_error("waveform csv: bad dimensions");
  set.columns.resize(set.p, set.n_tx);
  for (int l = 0; l < set.p; ++l) {
    if (!std::getline(is, line))
      throw std::runtime_error("waveform csv: truncated");
    std::stringstream row(line);
    std::string cell;
    for (int k = 0; k < set.n_tx; ++k) {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("waveform csv: short row");
      const double re = std::stod(cell);
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("waveform csv: short row");
      const double im = std::stod(cell);
      set.columns(l, k) = {re, im};
    }
  }
  for (int k = 0; k < set.n_tx; ++k) {
    const double nrm = set.columns.col(k).norm();
    if (std::abs(nrm - 1.0) > 1e-6)
      throw std::runtime_error("waveform csv: column not unit norm");
  }
  return set;
}

WaveformSet read_waveforms_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_waveforms_csv(is);
}

}  // namespace csradar
