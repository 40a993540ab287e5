#include "ais/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

namespace ais {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Waveform apply_user_channel(const Waveform& w, const UserChannel& ch) {
  Waveform out;
  out.sample_rate = w.sample_rate;
  const long long shift = llround(ch.delay * w.sample_rate);
  out.origin_time = w.origin_time + double(shift) / w.sample_rate;
  out.samples.resize(w.samples.size());
  for (size_t k = 0; k < w.samples.size(); ++k) {
    const double t = out.origin_time + double(k) / w.sample_rate;
    const double fd = ch.doppler + 0.5 * ch.doppler_rate * t;
    out.samples[k] =
        ch.attenuation * w.samples[k] * std::polar(1.0, kTwoPi * fd * t + ch.phase);
  }
  return out;
}

Waveform superpose(const SlotScene& scene) {
  if (scene.users.empty())
    throw std::invalid_argument("superpose: scene has no users");
  const double fs = scene.users.front().first.sample_rate;
  std::vector<Waveform> shifted;
  shifted.reserve(scene.users.size());
  double t0 = scene.span_begin;
  double t1 = scene.span_end;
  for (const auto& [w, ch] : scene.users) {
    if (w.sample_rate != fs)
      throw std::invalid_argument("superpose: mismatched sample rates");
    shifted.push_back(apply_user_channel(w, ch));
    t0 = std::min(t0, shifted.back().origin_time);
    t1 = std::max(t1, shifted.back().end_time());
  }

  Waveform out;
  out.sample_rate = fs;
  // Snap the grid origin to an integer number of samples so every user lands
  // on it exactly (delays are already quantized).
  out.origin_time = std::floor(t0 * fs + 0.5) / fs;
  const size_t total = size_t(llround((t1 - out.origin_time) * fs));
  out.samples.assign(total, cplx(0.0, 0.0));
  for (const Waveform& u : shifted) {
    const double off = (u.origin_time - out.origin_time) * fs;
    const long long start = llround(off);
    if (std::abs(off - double(start)) > 1e-6)
      throw std::invalid_argument("superpose: sample grids misaligned");
    for (size_t k = 0; k < u.samples.size(); ++k) {
      const long long idx = start + (long long)k;
      if (idx >= 0 && size_t(idx) < total) out.samples[idx] += u.samples[k];
    }
  }
  return out;
}

void add_awgn_n0(Waveform& w, double n0, Rng& rng) {
  if (n0 <= 0) return;
  const double sigma = std::sqrt(n0 * w.sample_rate);  // per component
  for (cplx& s : w.samples)
    s += cplx(sigma * rng.gaussian(), sigma * rng.gaussian());
}

Waveform add_awgn(const Waveform& w, const NoiseConfig& cfg, double es) {
  Waveform out = w;
  if (cfg.noiseless) return out;
  Rng rng(cfg.seed);
  add_awgn_n0(out, n0_from_ebn0(cfg.ebn0_db, es), rng);
  return out;
}

std::vector<UserChannel> parse_scene_channels(const std::string& json_text,
                                              double ts) {
  const auto doc = nlohmann::json::parse(json_text);
  std::vector<UserChannel> out;
  for (const auto& u : doc.at("users")) {
    UserChannel ch;
    ch.attenuation = std::pow(10.0, u.value("alpha_db", 0.0) / 20.0);
    ch.delay = u.value("tau_symbols", 0.0) * ts;
    ch.doppler = u.value("fd_hz", 0.0);
    ch.phase = u.value("phi_deg", 0.0) * std::numbers::pi / 180.0;
    out.push_back(ch);
  }
  return out;
}

}  // namespace ais
