// GMSK/CPM baseband modulator: Gaussian phase-shaping pulse truncated to the
// CPM memory and the constant-envelope complex waveform it drives.
#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "ais/bits.hpp"

namespace ais {

using cplx = std::complex<double>;

enum class PulseShape { gaussian, rectangular };

struct ModulationConfig {
  double ts = 1.0 / 9600.0;  // symbol period [s]
  double bt = 0.4;           // bandwidth-time product of the Gaussian pulse
  int cpm_memory = 3;        // L, pulse truncation in symbols
  int h_num = 1;             // modulation index h = h_num / h_den, co-prime
  int h_den = 2;
  double es = 1.0;           // symbol energy (Eb for the binary alphabet)
  int oversampling = 8;      // Q samples per symbol
  PulseShape shape = PulseShape::gaussian;

  double h() const { return double(h_num) / double(h_den); }
  double sample_rate() const { return oversampling / ts; }
  double envelope() const;  // sqrt(2 Es / Ts)
  void validate() const;    // throws std::invalid_argument
};

// q(t) sampled on the grid t = k*Ts/Q, k = 0..L*Q inclusive, with q(0) = 0 and
// q(L*Ts) = 1/2 after renormalizing the truncated pulse.
struct PhasePulse {
  std::vector<double> q;
  int oversampling = 0;
  int memory = 0;
  double ts = 0;
};

struct Waveform {
  std::vector<cplx> samples;
  double sample_rate = 0;   // Q / Ts [Hz]
  double origin_time = 0;   // absolute time of samples[0] [s]

  size_t size() const { return samples.size(); }
  double end_time() const { return origin_time + samples.size() / sample_rate; }
};

PhasePulse make_phase_pulse(const ModulationConfig& cfg);

// Complex envelope sqrt(2Es/Ts) * exp(j * 2*pi*h * sum_i a_i q(t - i*Ts)),
// sampled at Q/Ts over (N + L - 1) symbol periods; the final L-1 periods let
// the last pulses finish against zero-valued virtual symbols.
Waveform modulate(std::span<const int8_t> symbols, const ModulationConfig& cfg,
                  const PhasePulse& pulse);

// Waveform export for external inspection.
void write_iq_f64(const Waveform& w, const std::string& path);
void write_iq_csv(const Waveform& w, const std::string& path);

}  // namespace ais
