// Independent reference implementations used to cross-check the production
// code paths. Each oracle derives its answer from the mathematical definition
// rather than the implementation it validates: the FCS by polynomial long
// division, the CPM phase by the direct double sum, spectra by a naive DFT,
// sequence metrics by exhaustive re-modulation, error rates and geometry by
// closed forms.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ais/frame_codec.hpp"
#include "ais/gmsk.hpp"
#include "ais/scenario.hpp"

namespace ais::oracle {

// HDLC FCS by long division over GF(2): remainder of
// x^k * L(x) + x^16 * M(x) modulo x^16 + x^12 + x^5 + 1, ones-complemented.
// M(x) takes the first transmitted bit as its highest-order coefficient and
// L(x) = x^15 + ... + 1 realizes the all-ones register preset. Returned bits
// are in transmission order (coefficient of x^15 first).
inline Bits crc_long_division(std::span<const uint8_t> message) {
  const size_t k = message.size();
  // Dividend coefficients, index 0 = degree k+15.
  std::vector<uint8_t> poly(k + 16, 0);
  for (size_t i = 0; i < k; ++i) poly[i] = message[i] & 1;
  for (size_t i = 0; i < 16 && i < poly.size(); ++i) poly[i] ^= 1;  // x^k L(x)

  static const uint8_t gen[17] = {1, 0, 0, 0, 1, 0, 0, 0, 0,
                                  0, 0, 1, 0, 0, 0, 0, 1};
  for (size_t i = 0; i + 16 < poly.size(); ++i) {
    if (!poly[i]) continue;
    for (size_t j = 0; j <= 16; ++j) poly[i + j] ^= gen[j];
  }
  Bits fcs(16);
  for (size_t i = 0; i < 16; ++i) fcs[i] = poly[k + i] ^ 1;
  return fcs;
}

inline uint16_t crc_long_division_value(std::span<const uint8_t> message) {
  const Bits fcs = crc_long_division(message);
  uint16_t v = 0;
  for (int i = 0; i < 16; ++i) v |= uint16_t(fcs[i]) << i;
  return v;
}

// CPM phase by the literal double sum over every symbol at every sample.
inline std::vector<double> direct_phase(std::span<const int8_t> symbols,
                                        const ModulationConfig& cfg,
                                        const PhasePulse& pulse) {
  const int q = cfg.oversampling;
  const int l = cfg.cpm_memory;
  const int n = int(symbols.size());
  const double h = cfg.h();
  std::vector<double> phase(size_t(n + l - 1) * q, 0.0);
  for (size_t k = 0; k < phase.size(); ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const long arg = long(k) - long(i) * q;  // (t - i Ts) in grid steps
      double qv;
      if (arg < 0) qv = 0.0;
      else if (arg >= long(l) * q) qv = 0.5;
      else qv = pulse.q[arg];
      acc += symbols[i] * qv;
    }
    phase[k] = 2.0 * std::numbers::pi * h * acc;
  }
  return phase;
}

inline std::vector<cplx> naive_dft(std::span<const cplx> x) {
  const size_t n = x.size();
  std::vector<cplx> out(n);
  for (size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (size_t m = 0; m < n; ++m)
      acc += x[m] * std::polar(1.0, -2.0 * std::numbers::pi *
                                        double(k * m % n) / double(n));
    out[k] = acc;
  }
  return out;
}

// Composite-Simpson integral of the Gaussian frequency pulse over [a, b]
// (times measured from the start of the truncation window).
inline double integrate_freq_pulse(const ModulationConfig& cfg, double a,
                                   double b, int steps = 20000) {
  const double c =
      2.0 * std::numbers::pi * (cfg.bt / cfg.ts) / std::sqrt(std::log(2.0));
  const double half_span = 0.5 * cfg.cpm_memory * cfg.ts;
  auto qf = [](double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); };
  auto g = [&](double t) {
    const double tc = t - half_span;
    return (qf(c * (tc - 0.5 * cfg.ts)) - qf(c * (tc + 0.5 * cfg.ts))) /
           (2.0 * cfg.ts);
  };
  if (steps % 2) ++steps;
  const double hstep = (b - a) / steps;
  double acc = g(a) + g(b);
  for (int i = 1; i < steps; ++i) acc += g(a + i * hstep) * (i % 2 ? 4.0 : 2.0);
  return acc * hstep / 3.0;
}

// Antipodal signaling over AWGN: BER = Q(sqrt(2 Eb/N0)).
inline double antipodal_ber(double ebn0_db) {
  const double g = std::pow(10.0, ebn0_db / 10.0);
  return 0.5 * std::erfc(std::sqrt(g));
}

// MLSE over the 1REC h=1/2 trellis: the minimum-distance error events flip
// two symbols (same-sign or opposite-sign pairs), both at d^2 = 8Es, so each
// carries the antipodal event probability Q(sqrt(2 Eb/N0)) and two bit
// errors with feasibility 1/4 per pattern: union-bound BER = 2 Q(sqrt(2g)).
inline double msk_mlse_ber(double ebn0_db) { return 2.0 * antipodal_ber(ebn0_db); }

// Right-triangle slant range at the swath edge: sqrt((R+h)^2 - (R cos e)^2)
// - R sin e, which reduces to sqrt((R+h)^2 - R^2) at zero elevation.
inline double edge_slant_range(const OrbitGeometry& geom) {
  const double r = geom.earth_radius;
  const double s = r + geom.altitude;
  const double e = geom.min_elevation_deg * std::numbers::pi / 180.0;
  return std::sqrt(s * s - r * r * std::cos(e) * std::cos(e)) - r * std::sin(e);
}

// Exhaustive metric of every length-n binary symbol sequence against the
// compensated received samples: each sequence is re-modulated behind the
// known prior symbols and correlated directly, with no trellis involved.
// Returns (metric, symbols) sorted by metric descending.
inline std::vector<std::pair<double, Symbols>> brute_force_ranking(
    std::span<const cplx> received, std::span<const int8_t> prior, int n,
    const ModulationConfig& cfg, const PhasePulse& pulse) {
  const int q = cfg.oversampling;
  const double dt = cfg.ts / q;
  std::vector<std::pair<double, Symbols>> out;
  out.reserve(size_t(1) << n);
  for (long code = 0; code < (1L << n); ++code) {
    Symbols all(prior.begin(), prior.end());
    Symbols tail(n);
    for (int i = 0; i < n; ++i) {
      tail[i] = (code >> (n - 1 - i)) & 1 ? 1 : -1;
      all.push_back(tail[i]);
    }
    const Waveform ref = modulate(all, cfg, pulse);
    double metric = 0.0;
    const size_t off = prior.size() * q;
    for (size_t k = 0; k < size_t(n) * q; ++k)
      metric += received[k].real() * ref.samples[off + k].real() +
                received[k].imag() * ref.samples[off + k].imag();
    out.emplace_back(metric * dt, std::move(tail));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  return out;
}

}  // namespace ais::oracle
