#include "ais/gmsk.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace ais {

namespace {

constexpr double kPi = std::numbers::pi;

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Antiderivative of the Gaussian Q-function: d/dx [x Q(x) - phi(x)] = Q(x).
double qfunc_integral(double x) {
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
  return x * qfunc(x) - phi;
}

}  // namespace

double ModulationConfig::envelope() const { return std::sqrt(2.0 * es / ts); }

void ModulationConfig::validate() const {
  if (!(ts > 0)) throw std::invalid_argument("ModulationConfig: Ts must be > 0");
  if (!(bt > 0)) throw std::invalid_argument("ModulationConfig: BT must be > 0");
  if (cpm_memory < 1)
    throw std::invalid_argument("ModulationConfig: L must be >= 1");
  if (h_num < 1 || h_den < 1 || std::gcd(h_num, h_den) != 1)
    throw std::invalid_argument("ModulationConfig: h = u/p needs co-prime u,p");
  if (oversampling < 2)
    throw std::invalid_argument("ModulationConfig: Q must be >= 2");
  if (!(es > 0)) throw std::invalid_argument("ModulationConfig: Es must be > 0");
}

PhasePulse make_phase_pulse(const ModulationConfig& cfg) {
  cfg.validate();
  const int q = cfg.oversampling;
  const int l = cfg.cpm_memory;
  const int n = l * q;

  PhasePulse pulse;
  pulse.oversampling = q;
  pulse.memory = l;
  pulse.ts = cfg.ts;
  pulse.q.resize(n + 1);

  if (cfg.shape == PulseShape::rectangular) {
    for (int k = 0; k <= n; ++k) pulse.q[k] = 0.5 * k / n;
    return pulse;
  }

  // Gaussian frequency pulse g(t) = (1/2Ts) [Q(c(t' - Ts/2)) - Q(c(t' + Ts/2))]
  // with t' centered on the truncation window and c = 2*pi*B/sqrt(ln 2).
  // Its running integral has the closed form below, so q is exact on any grid.
  const double c = 2.0 * kPi * (cfg.bt / cfg.ts) / std::sqrt(std::log(2.0));
  const double half_span = 0.5 * l * cfg.ts;
  auto integral = [&](double t) {
    const double tc = t - half_span;
    return (qfunc_integral(c * (tc - 0.5 * cfg.ts)) -
            qfunc_integral(c * (tc + 0.5 * cfg.ts))) /
           (2.0 * cfg.ts * c);
  };
  const double base = integral(0.0);
  for (int k = 0; k <= n; ++k)
    pulse.q[k] = integral(double(k) * cfg.ts / q) - base;

  // Renormalize the truncation loss so the phase states stay exact multiples
  // of pi*h.
  const double scale = 0.5 / pulse.q[n];
  for (double& v : pulse.q) v *= scale;
  pulse.q[0] = 0.0;
  pulse.q[n] = 0.5;
  return pulse;
}

Waveform modulate(std::span<const int8_t> symbols, const ModulationConfig& cfg,
                  const PhasePulse& pulse) {
  cfg.validate();
  if (pulse.oversampling != cfg.oversampling || pulse.memory != cfg.cpm_memory)
    throw std::invalid_argument("modulate: pulse/config mismatch");
  const int q = cfg.oversampling;
  const int l = cfg.cpm_memory;
  const int n = int(symbols.size());
  const double amp = cfg.envelope();
  const double h = cfg.h();

  // prefix[i] = sum of symbols[0..i)
  std::vector<int> prefix(n + 1, 0);
  for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + symbols[i];

  Waveform w;
  w.sample_rate = cfg.sample_rate();
  w.origin_time = 0.0;
  w.samples.resize(size_t(n + l - 1) * q);

  for (size_t k = 0; k < w.samples.size(); ++k) {
    const int ncur = int(k) / q;
    const int zi = int(k) % q;
    double phase = 0.0;
    const int past = std::min(ncur - l, n - 1);  // symbols fully accumulated
    if (past >= 0) phase = kPi * h * prefix[past + 1];
    for (int d = 0; d < l; ++d) {
      const int i = ncur - d;
      if (i < 0 || i >= n) continue;
      phase += 2.0 * kPi * h * symbols[i] * pulse.q[zi + d * q];
    }
    w.samples[k] = std::polar(amp, phase);
  }
  return w;
}

void write_iq_f64(const Waveform& w, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("write_iq_f64: cannot open " + path);
  for (const cplx& s : w.samples) {
    const double iq[2] = {s.real(), s.imag()};
    std::fwrite(iq, sizeof(double), 2, f);
  }
  std::fclose(f);
}

void write_iq_csv(const Waveform& w, const std::string& path) {
  FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_iq_csv: cannot open " + path);
  std::fprintf(f, "time_s,i,q\n");
  for (size_t k = 0; k < w.samples.size(); ++k) {
    std::fprintf(f, "%.12g,%.12g,%.12g\n",
                 w.origin_time + double(k) / w.sample_rate,
                 w.samples[k].real(), w.samples[k].imag());
  }
  std::fclose(f);
}

}  // namespace ais
