#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csradar/types.hpp"

namespace csradar {

bool is_prime(int n);

/// Circular delay: (translate(x, tau))(l) = x(l - tau mod n).
CVec translate(const CVec& x, int tau);

/// Modulation: (modulate(x, f))(l) = x(l) * exp(2*pi*i*f*l/n).
CVec modulate(const CVec& x, int f);

/// <M_f T_l u, v> with circular translation; u and v must have equal length.
cx timefreq_correlation(const CVec& u, const CVec& v, int f, int l);

// The p+1 mutually unbiased bases of C^p obtained as eigenvector bases of
// the time-frequency shift operators T_1 M_k (k = 0..p-1), plus the identity
// basis. bases[k] columns are ordered by eigenvalue phase ascending in
// [0, 2pi) and phase-fixed so each column's first nonzero entry is real
// positive; bases[0] then coincides with the unitary DFT matrix.
struct KerdockFamily {
  int p = 0;
  std::vector<CMat> bases;  // p+1 unitary p x p matrices
};

KerdockFamily kerdock_family(int p);

enum class WaveformFamily { kerdock, alltop, external };

std::string to_string(WaveformFamily f);
WaveformFamily waveform_family_from_string(const std::string& s);

struct WaveformSet {
  int p = 0;
  int n_tx = 0;
  CMat columns;  // p x n_tx, unit l2-norm columns
  WaveformFamily family_tag = WaveformFamily::external;
  std::optional<double> gamma;
};

/// One waveform per basis index k = 0..n_tx-1, column j_select of each basis.
/// Requires n_tx < p: the identity basis is never selected.
WaveformSet kerdock_waveforms(const KerdockFamily& family, int n_tx,
                              int j_select = 0);

/// Cubic-chirp columns s_k(l) = p^{-1/2} exp(2*pi*i*(l^3 + k*l)/p), p >= 5.
WaveformSet alltop_waveforms(int p, int n_tx);

WaveformSet external_waveforms(CMat columns);

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double worst_deviation = 0.0;
  std::string detail;
};

struct KerdockReport {
  int p = 0;
  double tolerance = 0.0;
  PropertyCheck mub;                 // (i)
  PropertyCheck autocorr_unique;     // (ii)(a)
  PropertyCheck ambiguity_points;    // (ii)(b)
  PropertyCheck crosscorr;           // (iii)
  PropertyCheck polyphase;           // (iv), time and frequency
  std::vector<int> ambiguity_count;  // per basis k = 0..p-1, incl. (0,0)
  bool all_pass() const;
};

/// Exhaustive check of the four Kerdock basis properties at `tol`.
KerdockReport verify_kerdock_properties(const KerdockFamily& family,
                                        double tol = kAlgebraTol);

struct IncoherenceReport {
  bool pass = false;
  double gamma_checked = 0.0;
  // Smallest gamma under which both conditions would pass.
  double gamma_required = 0.0;
  double worst_auto = 0.0;   // max |<s_j, M_f T_tau s_j>|, (f,tau) != (0,0)
  double worst_cross = 0.0;  // max |<s_k, M_f T_tau s_j>|, k != j
};

/// Checks |<s_j, M_f T_tau s_j>| <= gamma/sqrt(p) for (f,tau) != (0,0) and
/// |<s_k, M_f T_tau s_j>| <= gamma/sqrt(p) for k != j, brute-force over all
/// p^2 shifts.
IncoherenceReport verify_incoherence(const WaveformSet& set, double gamma);

/// CSV layout: header row "p,n_tx,family_tag", then one row per time sample
/// with two columns (re, im) per waveform.
void write_waveforms_csv(const WaveformSet& set, std::ostream& os);
void write_waveforms_csv(const WaveformSet& set, const std::string& path);
WaveformSet read_waveforms_csv(std::istream& is);
WaveformSet read_waveforms_csv(const std::string& path);

}  // namespace csradar
