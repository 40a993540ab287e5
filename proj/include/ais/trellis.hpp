// Trellis construction for MLSE detection of binary CPM: the coherent trellis
// over (phase state, last L-1 symbols) and the differential trellis over the
// last K+L-1 symbols, each with precomputed one-symbol reference segments.
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "ais/gmsk.hpp"

namespace ais {

struct Trellis {
  int num_states = 0;
  int samples_per_symbol = 0;

  // next_state[state][input bit], input bit 0 <-> symbol -1, 1 <-> +1.
  std::vector<std::array<int, 2>> next_state;
  // Reference segment of (state, input): refs[(state*2 + input)*Q .. +Q).
  std::vector<cplx> refs;

  struct Incoming {
    int prev_state = -1;
    int input = 0;
  };
  // Exactly two incoming transitions per state, sorted by prev_state.
  std::vector<std::array<Incoming, 2>> incoming;

  bool differential = false;
  int delay_factor = 0;   // K (differential only)
  int phase_states = 0;   // count of distinct phase states (coherent only)
  int history_len = 0;    // symbols carried in the state
  int h_num = 0, h_den = 0;
  int memory = 0;         // L
  double dt = 0;          // Ts / Q, branch metric integration step
  double es = 0;

  const cplx* ref(int state, int input) const {
    return refs.data() + size_t(state * 2 + input) * samples_per_symbol;
  }
  // The input bit labeling the (from -> to) transition; transitions are
  // uniquely labeled for co-prime u, p.
  int input_for(int from, int to) const {
    return next_state[from][0] == to ? 0 : 1;
  }
  std::string to_text() const;
};

Trellis build_coherent_trellis(const ModulationConfig& cfg,
                               const PhasePulse& pulse);

Trellis build_differential_trellis(const ModulationConfig& cfg,
                                   const PhasePulse& pulse, int delay_factor);

// R_K(t) = r(t) * conj(r(t - K Ts)), head shortened by K symbols; the output
// origin moves forward by K Ts. K = 0 is allowed as a diagnostic (|r|^2).
Waveform differential_transform(const Waveform& r, int delay_factor,
                                const ModulationConfig& cfg);

// Discretized correlation Re[sum received * conj(reference)] * dt over one
// symbol period. Channel rotation is expected to be compensated upstream.
double branch_metric(std::span<const cplx> received,
                     std::span<const cplx> reference, double dt);

// State implied by the known symbols transmitted before the decode window.
// The coherent trellis needs the full history (phase accumulation); the
// differential trellis needs at least the last K+L-1 symbols.
int state_for_history(const Trellis& t, std::span<const int8_t> prior);

}  // namespace ais
