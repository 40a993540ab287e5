#include "ais/list_decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ais {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double dot_re(const cplx* a, const cplx* b, int n) {
  double acc = 0.0;
  for (int k = 0; k < n; ++k)
    acc += a[k].real() * b[k].real() + a[k].imag() * b[k].imag();
  return acc;
}

void check_window(size_t received, const Trellis& t, int n_symbols) {
  if (n_symbols < 1) throw std::invalid_argument("decode: n_symbols < 1");
  if (received < size_t(n_symbols) * t.samples_per_symbol)
    throw std::invalid_argument("decode: received shorter than N symbols");
}

}  // namespace

void ListConfig::validate(int num_states) const {
  if (paths < 1 || candidates < 1)
    throw std::invalid_argument("ListConfig: P and C must be >= 1");
  if (long(candidates) > long(num_states) * paths)
    throw std::invalid_argument("ListConfig: C must be <= S*P");
}

Candidate viterbi(std::span<const cplx> received, const Trellis& trellis,
                  int n_symbols, const InitMetrics& init,
                  std::vector<double>* final_metrics) {
  check_window(received.size(), trellis, n_symbols);
  const int s_count = trellis.num_states;
  const int q = trellis.samples_per_symbol;

  std::vector<double> cur(s_count, kNegInf), nxt(s_count);
  if (init.entries.empty()) {
    std::fill(cur.begin(), cur.end(), 0.0);
  } else {
    for (const auto& [s, m] : init.entries) cur[s] = m;
  }

  std::vector<int> bp(size_t(n_symbols) * s_count, -1);
  std::vector<double> delta(size_t(s_count) * 2);

  for (int n = 0; n < n_symbols; ++n) {
    const cplx* seg = received.data() + size_t(n) * q;
    for (int s = 0; s < s_count; ++s)
      for (int b = 0; b < 2; ++b)
        delta[s * 2 + b] = trellis.dt * dot_re(seg, trellis.ref(s, b), q);

    int* bpn = bp.data() + size_t(n) * s_count;
    for (int i = 0; i < s_count; ++i) {
      double best = kNegInf;
      int from = -1;
      for (const auto& in : trellis.incoming[i]) {  // sorted by prev_state
        if (cur[in.prev_state] == kNegInf) continue;
        const double v = cur[in.prev_state] + delta[in.prev_state * 2 + in.input];
        if (v > best) {  // strict: ties keep the lower predecessor
          best = v;
          from = in.prev_state;
        }
      }
      nxt[i] = best;
      bpn[i] = from;
    }
    cur.swap(nxt);
  }
  if (final_metrics) *final_metrics = cur;

  int state = 0;
  double best = kNegInf;
  for (int s = 0; s < s_count; ++s) {
    if (cur[s] > best) {  // ties keep the lower state
      best = cur[s];
      state = s;
    }
  }

  Candidate cand;
  cand.metric = best;
  cand.rank = 1;
  cand.symbols.resize(n_symbols);
  for (int n = n_symbols - 1; n >= 0; --n) {
    const int prev = bp[size_t(n) * s_count + state];
    const int b = trellis.input_for(prev, state);
    cand.symbols[n] = b ? 1 : -1;
    state = prev;
  }
  return cand;
}

PlvaResult plva(std::span<const cplx> received, const Trellis& trellis,
                int n_symbols, const ListConfig& cfg, const InitMetrics& init) {
  check_window(received.size(), trellis, n_symbols);
  cfg.validate(trellis.num_states);
  const int s_count = trellis.num_states;
  const int q = trellis.samples_per_symbol;
  const int p = cfg.paths;

  // Ranked metric lists, flattened [state*P + rank]; cnt[state] live entries.
  std::vector<double> cur(size_t(s_count) * p, kNegInf);
  std::vector<double> nxt(size_t(s_count) * p, kNegInf);
  std::vector<int> cur_cnt(s_count, 0), nxt_cnt(s_count, 0);
  if (init.entries.empty()) {
    for (int s = 0; s < s_count; ++s) {
      cur[size_t(s) * p] = 0.0;
      cur_cnt[s] = 1;
    }
  } else {
    for (const auto& [s, m] : init.entries) {
      cur[size_t(s) * p] = m;
      cur_cnt[s] = 1;
    }
  }

  // Backpointers per stage, packed prev_state * P + prev_rank.
  std::vector<uint32_t> bp(size_t(n_symbols) * s_count * p);
  std::vector<double> delta(size_t(s_count) * 2);

  for (int n = 0; n < n_symbols; ++n) {
    const cplx* seg = received.data() + size_t(n) * q;
    for (int s = 0; s < s_count; ++s)
      for (int b = 0; b < 2; ++b)
        delta[s * 2 + b] = trellis.dt * dot_re(seg, trellis.ref(s, b), q);

    uint32_t* bpn = bp.data() + size_t(n) * s_count * p;
    for (int i = 0; i < s_count; ++i) {
      // Merge the two incoming lists (already descending); on equal metrics
      // the lower predecessor state wins, then the lower rank.
      const auto& in0 = trellis.incoming[i][0];
      const auto& in1 = trellis.incoming[i][1];
      const double d0 = delta[in0.prev_state * 2 + in0.input];
      const double d1 = delta[in1.prev_state * 2 + in1.input];
      const double* l0 = cur.data() + size_t(in0.prev_state) * p;
      const double* l1 = cur.data() + size_t(in1.prev_state) * p;
      const int c0 = cur_cnt[in0.prev_state];
      const int c1 = cur_cnt[in1.prev_state];
      double* out = nxt.data() + size_t(i) * p;
      uint32_t* outbp = bpn + size_t(i) * p;
      int k0 = 0, k1 = 0, m = 0;
      while (m < p && (k0 < c0 || k1 < c1)) {
        const double v0 = k0 < c0 ? l0[k0] + d0 : kNegInf;
        const double v1 = k1 < c1 ? l1[k1] + d1 : kNegInf;
        if (k1 >= c1 || (k0 < c0 && v0 >= v1)) {
          out[m] = v0;
          outbp[m] = uint32_t(in0.prev_state) * p + k0;
          ++k0;
        } else {
          out[m] = v1;
          outbp[m] = uint32_t(in1.prev_state) * p + k1;
          ++k1;
        }
        ++m;
      }
      nxt_cnt[i] = m;
    }
    cur.swap(nxt);
    cur_cnt.swap(nxt_cnt);
  }

  // Final stage: the C best of all surviving (state, rank) entries.
  struct Terminal {
    double metric;
    int state;
    int rank;
  };
  std::vector<Terminal> pool;
  pool.reserve(size_t(s_count) * p);
  for (int s = 0; s < s_count; ++s)
    for (int r = 0; r < cur_cnt[s]; ++r)
      pool.push_back({cur[size_t(s) * p + r], s, r});
  std::sort(pool.begin(), pool.end(), [](const Terminal& a, const Terminal& b) {
    if (a.metric != b.metric) return a.metric > b.metric;
    if (a.state != b.state) return a.state < b.state;
    return a.rank < b.rank;
  });
  const int n_cand = std::min<size_t>(cfg.candidates, pool.size());

  PlvaResult res;
  res.candidates.resize(n_cand);
  for (int c = 0; c < n_cand; ++c) {
    Candidate& cand = res.candidates[c];
    cand.metric = pool[c].metric;
    cand.rank = c + 1;
    cand.symbols.resize(n_symbols);
    int state = pool[c].state;
    int rank = pool[c].rank;
    for (int n = n_symbols - 1; n >= 0; --n) {
      const uint32_t pk = bp[(size_t(n) * s_count + state) * p + rank];
      const int prev = int(pk / p);
      const int prev_rank = int(pk % p);
      cand.symbols[n] = trellis.input_for(prev, state) ? 1 : -1;
      state = prev;
      rank = prev_rank;
    }
  }

  res.final_lists.resize(s_count);
  for (int s = 0; s < s_count; ++s)
    res.final_lists[s].assign(cur.begin() + size_t(s) * p,
                              cur.begin() + size_t(s) * p + cur_cnt[s]);
  return res;
}

std::string DecodeDiag::to_text() const {
  std::ostringstream os;
  os << "tried " << tried << " success_rank " << success_rank;
  for (int i = 0; i < 4; ++i)
    os << " " << reject_name(Reject(i)) << " " << rejects[i];
  return os.str();
}

PacketDecoder::PacketDecoder(const ModulationConfig& mod,
                             const FrameConfig& frame,
                             const DecoderConfig& dec)
    : mod_(mod), frame_(frame), dec_(dec), pulse_(make_phase_pulse(mod)) {
  if (dec_.detector == Detector::differential)
    trellis_ = build_differential_trellis(mod_, pulse_, dec_.delay_factor);
  else
    trellis_ = build_coherent_trellis(mod_, pulse_);
  dec_.list.validate(trellis_.num_states);

  Bits preamble_bits(frame_.ramp_len, 0);
  for (int i = 0; i < frame_.training_len; ++i) preamble_bits.push_back(i & 1);
  preamble_ = nrzi_encode(preamble_bits, frame_.nrzi_initial_level);

  start_symbol_ = frame_.preamble_len();
  n_decode_ = frame_.slot_bits() - start_symbol_;
  init_state_ = state_for_history(trellis_, preamble_);
  if (dec_.detector == Detector::differential &&
      dec_.delay_factor > start_symbol_)
    throw std::invalid_argument("PacketDecoder: K exceeds the preamble length");
}

DecodeResult PacketDecoder::decode(const Waveform& rx, const UserChannel& ch) {
  if (ch.doppler_rate != 0.0 && dec_.detector == Detector::differential)
    throw std::invalid_argument("differential decode assumes zero Doppler rate");
  const double fs = rx.sample_rate;
  const int q = mod_.oversampling;
  const long long i0 = llround((ch.delay - rx.origin_time) * fs);
  const long long w0 = i0 + (long long)start_symbol_ * q;
  const size_t need = size_t(n_decode_) * q;
  comp_.assign(need, cplx(0.0, 0.0));

  auto rx_at = [&](long long idx) -> cplx {
    if (idx < 0 || size_t(idx) >= rx.samples.size()) return cplx(0.0, 0.0);
    return rx.samples[idx];
  };

  if (dec_.detector == Detector::coherent) {
    for (size_t m = 0; m < need; ++m) {
      const long long idx = w0 + (long long)m;
      const double t = rx.origin_time + double(idx) / fs;
      const double fd = ch.doppler + 0.5 * ch.doppler_rate * t;
      comp_[m] = rx_at(idx) * std::polar(1.0, -(kTwoPi * fd * t + ch.phase));
    }
  } else {
    // R_K with the residual exp(j 2 pi f_d K Ts) rotation removed; the
    // unknown channel phase cancels in the product.
    const long long kq = (long long)dec_.delay_factor * q;
    const cplx derot =
        std::polar(1.0, -kTwoPi * ch.doppler * dec_.delay_factor * mod_.ts);
    for (size_t m = 0; m < need; ++m) {
      const long long idx = w0 + (long long)m;
      comp_[m] = rx_at(idx) * std::conj(rx_at(idx - kq)) * derot;
    }
  }

  const InitMetrics init = dec_.known_start ? InitMetrics::known(init_state_)
                                            : InitMetrics::uniform();
  const int8_t level0 = preamble_.back();

  DecodeResult out;
  auto consider = [&](const Candidate& cand) -> bool {
    ++out.diag.tried;
    const PostProcessResult pp =
        post_process_candidate(cand.symbols, level0, frame_);
    if (pp.ok) {
      if (!out.payload) {
        out.diag.success_rank = cand.rank;
        out.payload = pp.payload;
      }
      return true;
    }
    ++out.diag.rejects[int(pp.reason)];
    return false;
  };

  if (dec_.list.paths == 1 && dec_.list.candidates == 1) {
    consider(viterbi(comp_, trellis_, n_decode_, init));
  } else {
    const PlvaResult res = plva(comp_, trellis_, n_decode_, dec_.list, init);
    for (const Candidate& cand : res.candidates) {
      // With the stop criterion off, keep walking the list to log every
      // candidate's outcome; the first valid payload is still the decision.
      if (consider(cand) && dec_.stop_on_first_valid) break;
    }
  }
  return out;
}

}  // namespace ais
