// Per-user propagation (attenuation, delay, Doppler, phase), multi-user
// superposition on a common sample grid, and calibrated complex AWGN.
#pragma once

#include <utility>
#include <vector>

#include "ais/gmsk.hpp"
#include "ais/rng.hpp"

namespace ais {

struct UserChannel {
  double attenuation = 1.0;  // linear amplitude
  double delay = 0.0;        // seconds, quantized to the sample grid on use
  double doppler = 0.0;      // Hz
  double phase = 0.0;        // radians in [0, 2pi)
  double doppler_rate = 0.0; // Hz/s; 0 in every shipped scenario
};

struct NoiseConfig {
  double ebn0_db = 10.0;
  uint64_t seed = 1;
  bool noiseless = false;
};

struct SlotScene {
  // Clean modulated waveforms with the channel to apply to each.
  std::vector<std::pair<Waveform, UserChannel>> users;
  double span_begin = 0.0;  // seconds; the slot window the scene covers
  double span_end = 0.0;

  size_t n_users() const { return users.size(); }
  double slot_span() const { return span_end - span_begin; }
};

// alpha * w(t - tau) * exp(j(2 pi f_d(t) t + phi)) with the delay rounded to
// the nearest sample; the rotation is evaluated at absolute output time.
Waveform apply_user_channel(const Waveform& w, const UserChannel& ch);

// Sample-wise complex sum of all users on a grid covering the scene span and
// every user's support; zero outside each user's support.
Waveform superpose(const SlotScene& scene);

inline double n0_from_ebn0(double ebn0_db, double eb) {
  return eb / std::pow(10.0, ebn0_db / 10.0);
}

// i.i.d. circular complex Gaussian noise, per-component variance n0 * fs
// (complex-sample variance 2*n0*fs), which makes the correlation detector on
// an energy-Es symbol see exactly Eb/N0 = Es/n0.
void add_awgn_n0(Waveform& w, double n0, Rng& rng);

// Eb = Es for the binary alphabet; the reference user has unit attenuation.
Waveform add_awgn(const Waveform& w, const NoiseConfig& cfg, double es);

// Scene description from JSON text: per-user alpha in dB, tau in symbols,
// f_d in Hz, phi in degrees.
std::vector<UserChannel> parse_scene_channels(const std::string& json_text,
                                              double ts);

}  // namespace ais
