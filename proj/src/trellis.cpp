#include "ais/trellis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace ais {

namespace {

constexpr double kPi = std::numbers::pi;

int8_t sym(int bit) { return bit ? int8_t(1) : int8_t(-1); }

void fill_incoming(Trellis& t) {
  t.incoming.assign(t.num_states, {});
  std::vector<int> count(t.num_states, 0);
  for (int s = 0; s < t.num_states; ++s) {
    for (int b = 0; b < 2; ++b) {
      const int to = t.next_state[s][b];
      if (count[to] >= 2)
        throw std::logic_error("trellis: state with more than 2 predecessors");
      t.incoming[to][count[to]++] = {s, b};
    }
  }
  for (int s = 0; s < t.num_states; ++s) {
    if (count[s] != 2)
      throw std::logic_error("trellis: state without 2 predecessors");
    if (t.incoming[s][0].prev_state > t.incoming[s][1].prev_state)
      std::swap(t.incoming[s][0], t.incoming[s][1]);
  }
}

}  // namespace

Trellis build_coherent_trellis(const ModulationConfig& cfg,
                               const PhasePulse& pulse) {
  cfg.validate();
  const int q = cfg.oversampling;
  const int l = cfg.cpm_memory;
  const int u = cfg.h_num, p = cfg.h_den;
  const int g = std::gcd(u, 2 * p);
  const int nph = 2 * p / g;      // p phase states if u even, 2p if odd
  const int step = u / g;         // phase index increment per +1 symbol
  const int nhist = 1 << (l - 1);
  const int mask = nhist - 1;

  Trellis t;
  t.num_states = nph * nhist;
  t.samples_per_symbol = q;
  t.differential = false;
  t.phase_states = nph;
  t.history_len = l - 1;
  t.h_num = u;
  t.h_den = p;
  t.memory = l;
  t.dt = cfg.ts / q;
  t.es = cfg.es;
  t.next_state.resize(t.num_states);
  t.refs.resize(size_t(t.num_states) * 2 * q);

  const double amp = cfg.envelope();
  const double h = cfg.h();
  for (int ph = 0; ph < nph; ++ph) {
    for (int hist = 0; hist < nhist; ++hist) {
      const int state = ph * nhist + hist;
      for (int b = 0; b < 2; ++b) {
        // Symbol leaving the L-window joins the accumulated phase. History
        // bit j holds a_{n-1-j}; the oldest is bit L-2 (the input itself when
        // L = 1).
        const int oldest = (l >= 2) ? ((hist >> (l - 2)) & 1) : b;
        const int ph2 = ((ph + step * sym(oldest)) % nph + nph) % nph;
        const int hist2 = (l >= 2) ? (((hist << 1) | b) & mask) : 0;
        t.next_state[state][b] = ph2 * nhist + hist2;

        cplx* ref = t.refs.data() + size_t(state * 2 + b) * q;
        for (int k = 0; k < q; ++k) {
          double phase = 2.0 * kPi * ph / nph;
          for (int d = 0; d < l; ++d) {
            const int a = (d == 0) ? sym(b) : sym((hist >> (d - 1)) & 1);
            phase += 2.0 * kPi * h * a * pulse.q[k + d * q];
          }
          ref[k] = std::polar(amp, phase);
        }
      }
    }
  }
  fill_incoming(t);
  return t;
}

Trellis build_differential_trellis(const ModulationConfig& cfg,
                                   const PhasePulse& pulse, int delay_factor) {
  cfg.validate();
  if (delay_factor < 1)
    throw std::invalid_argument("differential trellis: K must be >= 1");
  const int q = cfg.oversampling;
  const int l = cfg.cpm_memory;
  const int k_del = delay_factor;
  const int w = k_del + l - 1;  // symbols per state, M^(K+L-1) states
  const int mask = (1 << w) - 1;

  Trellis t;
  t.num_states = 1 << w;
  t.samples_per_symbol = q;
  t.differential = true;
  t.delay_factor = k_del;
  t.history_len = w;
  t.h_num = cfg.h_num;
  t.h_den = cfg.h_den;
  t.memory = l;
  t.dt = cfg.ts / q;
  t.es = cfg.es;
  t.next_state.resize(t.num_states);
  t.refs.resize(size_t(t.num_states) * 2 * q);

  const double amp = 2.0 * cfg.es / cfg.ts;  // |S_K|
  const double h = cfg.h();
  for (int hist = 0; hist < t.num_states; ++hist) {
    for (int b = 0; b < 2; ++b) {
      t.next_state[hist][b] = ((hist << 1) | b) & mask;
      // a(n-i): i = 0 is the input, i >= 1 lives in history bit i-1.
      auto a = [&](int i) { return i == 0 ? sym(b) : sym((hist >> (i - 1)) & 1); };
      // theta_n = pi h * sum of the K symbols a_{n-L} .. a_{n-L-K+1}.
      double theta = 0.0;
      for (int i = 0; i < k_del; ++i) theta += kPi * h * a(l + i);
      cplx* ref = t.refs.data() + size_t(hist * 2 + b) * q;
      for (int kq = 0; kq < q; ++kq) {
        double phase = theta;
        for (int i = 0; i < l; ++i)
          phase += 2.0 * kPi * h * (a(i) - a(k_del + i)) * pulse.q[kq + i * q];
        ref[kq] = std::polar(amp, phase);
      }
    }
  }
  fill_incoming(t);
  return t;
}

Waveform differential_transform(const Waveform& r, int delay_factor,
                                const ModulationConfig& cfg) {
  if (delay_factor < 0)
    throw std::invalid_argument("differential_transform: K must be >= 0");
  const size_t kq = size_t(delay_factor) * cfg.oversampling;
  if (r.samples.size() < kq)
    throw std::invalid_argument("differential_transform: waveform shorter than K symbols");
  Waveform out;
  out.sample_rate = r.sample_rate;
  out.origin_time = r.origin_time + delay_factor * cfg.ts;
  out.samples.resize(r.samples.size() - kq);
  for (size_t m = 0; m < out.samples.size(); ++m)
    out.samples[m] = r.samples[m + kq] * std::conj(r.samples[m]);
  return out;
}

double branch_metric(std::span<const cplx> received,
                     std::span<const cplx> reference, double dt) {
  if (received.size() != reference.size())
    throw std::invalid_argument("branch_metric: segment length mismatch");
  double acc = 0.0;
  for (size_t k = 0; k < received.size(); ++k)
    acc += received[k].real() * reference[k].real() +
           received[k].imag() * reference[k].imag();
  return acc * dt;
}

int state_for_history(const Trellis& t, std::span<const int8_t> prior) {
  if (int(prior.size()) < t.history_len)
    throw std::invalid_argument("state_for_history: not enough prior symbols");
  int hist = 0;
  for (int j = 0; j < t.history_len; ++j) {
    const int8_t a = prior[prior.size() - 1 - j];  // bit j = a_{n-1-j}
    hist |= (a > 0 ? 1 : 0) << j;
  }
  if (t.differential) return hist;

  const int g = std::gcd(t.h_num, 2 * t.h_den);
  const int step = t.h_num / g;
  long long acc = 0;  // sum of symbols older than the history window
  for (size_t i = 0; i + t.history_len < prior.size(); ++i) acc += prior[i];
  const int nph = t.phase_states;
  const int ph = int(((step * acc) % nph + nph) % nph);
  return ph * (1 << t.history_len) + hist;
}

std::string Trellis::to_text() const {
  std::ostringstream os;
  os << (differential ? "differential" : "coherent") << " trellis: " << num_states
     << " states";
  if (differential) os << ", K=" << delay_factor;
  else os << ", " << phase_states << " phase states";
  os << ", history " << history_len << "\n";
  const int nhist = 1 << history_len;
  for (int s = 0; s < num_states; ++s) {
    os << "state " << s << ":";
    if (!differential) os << " phase " << s / nhist << "/" << phase_states;
    os << " hist ";
    for (int j = history_len - 1; j >= 0; --j) os << (((s % nhist) >> j) & 1);
    os << " | 0->" << next_state[s][0] << " 1->" << next_state[s][1] << "\n";
  }
  return os.str();
}

}  // namespace ais
