// Classical Viterbi and parallel list Viterbi search over a CPM trellis, and
// the packet decoder that walks the ranked candidates through the AIS
// post-processing (flags, destuffing, length-184, FCS) with a stop criterion.
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ais/channel.hpp"
#include "ais/frame_codec.hpp"
#include "ais/trellis.hpp"

namespace ais {

struct ListConfig {
  int paths = 1;       // P, paths kept per state
  int candidates = 1;  // C, candidates extracted at the final stage
  void validate(int num_states) const;
};

struct Candidate {
  Symbols symbols;
  double metric = 0.0;
  int rank = 0;  // 1-based position in the final ordering
};

// Stage-0 cumulative metrics. Empty entries means uniform (0 for every
// state); otherwise only the listed states are alive.
struct InitMetrics {
  std::vector<std::pair<int, double>> entries;
  static InitMetrics uniform() { return {}; }
  static InitMetrics known(int state) { return {{{state, 0.0}}}; }
};

// Max-metric path by the classical recursion; ties prefer the lower
// predecessor state (and lower final state). Optionally reports the final
// per-state cumulative metrics.
Candidate viterbi(std::span<const cplx> received, const Trellis& trellis,
                  int n_symbols, const InitMetrics& init,
                  std::vector<double>* final_metrics = nullptr);

struct PlvaResult {
  std::vector<Candidate> candidates;  // descending metric, pairwise distinct
  // Final-stage ranked metric list per state (diagnostics / tests).
  std::vector<std::vector<double>> final_lists;
};

// Per-state P-best recursion over the 2P incoming extensions; the final stage
// extracts the C best of all surviving (state, rank) entries. Equal metrics
// prefer the lower predecessor state, then the lower predecessor rank; equal
// final metrics prefer the lower terminal state, then the lower rank. States
// reached by fewer than P paths keep only the realizable entries.
PlvaResult plva(std::span<const cplx> received, const Trellis& trellis,
                int n_symbols, const ListConfig& cfg, const InitMetrics& init);

enum class Detector { coherent, differential };

struct DecoderConfig {
  Detector detector = Detector::coherent;
  int delay_factor = 3;  // K, differential only
  ListConfig list;
  bool known_start = true;          // init from the known preamble symbols
  bool stop_on_first_valid = true;  // stop criterion: first candidate passing
                                    // length-184 + FCS wins
};

struct DecodeDiag {
  int tried = 0;
  int success_rank = 0;  // 1-based, 0 when no candidate passed
  int rejects[4] = {0, 0, 0, 0};  // indexed by Reject
  std::string to_text() const;
};

struct DecodeResult {
  std::optional<Bits> payload;  // 168 bits on success
  DecodeDiag diag;
};

// One decoder instance per worker: owns the trellis, the phase pulse and the
// decode scratch. decode() assumes the receiver knows the target user's
// channel parameters and the packet start time (= channel delay).
class PacketDecoder {
 public:
  PacketDecoder(const ModulationConfig& mod, const FrameConfig& frame,
                const DecoderConfig& dec);

  DecodeResult decode(const Waveform& rx, const UserChannel& ch);

  const Trellis& trellis() const { return trellis_; }
  const PhasePulse& pulse() const { return pulse_; }
  const ModulationConfig& mod() const { return mod_; }
  const DecoderConfig& config() const { return dec_; }
  int decode_window_symbols() const { return n_decode_; }

 private:
  ModulationConfig mod_;
  FrameConfig frame_;
  DecoderConfig dec_;
  PhasePulse pulse_;
  Trellis trellis_;
  Symbols preamble_;   // NRZI symbols of ramp + training
  int init_state_ = 0;
  int start_symbol_ = 0;  // decode window start within the packet
  int n_decode_ = 0;      // symbols in the decode window
  std::vector<cplx> comp_;  // compensated received segment scratch
};

}  // namespace ais
