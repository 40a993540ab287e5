#include "ais/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ais {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SlotScene make_two_user_scene(const TwoUserScenario& sc,
                              const ModulationConfig& mod,
                              const PhasePulse& pulse, const FrameConfig& fc,
                              Rng& rng, TwoUserTruth* truth) {
  if (sc.overlap_fraction < 0.0 || sc.overlap_fraction > 1.0)
    throw std::invalid_argument("TwoUserScenario: overlap must be in [0,1]");

  const Bits payload_t = random_payload(rng);
  const Bits payload_i = random_payload(rng);
  const Packet pkt_t = build_packet(payload_t, fc);
  const Packet pkt_i = build_packet(payload_i, fc);
  const Waveform wf_t =
      modulate(nrzi_encode(pkt_t.bits, fc.nrzi_initial_level), mod, pulse);
  const Waveform wf_i =
      modulate(nrzi_encode(pkt_i.bits, fc.nrzi_initial_level), mod, pulse);

  const double delta_symbols =
      pkt_t.total_len - sc.overlap_fraction * pkt_t.layout.stuffed_len;
  const double fs = mod.sample_rate();
  const double delay = llround(delta_symbols * mod.oversampling) / fs;

  UserChannel ch_t;
  ch_t.phase = kTwoPi * rng.uniform();
  UserChannel ch_i;
  ch_i.attenuation = std::pow(10.0, sc.power_delta_db / 20.0);
  ch_i.delay = delay;
  ch_i.doppler = sc.doppler_delta;
  ch_i.phase = kTwoPi * rng.uniform();

  SlotScene scene;
  scene.span_begin = 0.0;
  scene.span_end = std::max(fc.slot_bits() * mod.ts,
                            delay + (pkt_i.total_len + mod.cpm_memory) * mod.ts);
  scene.users.emplace_back(wf_t, ch_t);
  scene.users.emplace_back(wf_i, ch_i);

  if (truth) {
    truth->target_payload = payload_t;
    truth->interferer_payload = payload_i;
    truth->target = ch_t;
  }
  return scene;
}

double OrbitGeometry::max_central_angle() const {
  const double eps = min_elevation_deg * std::numbers::pi / 180.0;
  return std::acos(earth_radius * std::cos(eps) / (earth_radius + altitude)) -
         eps;
}

double OrbitGeometry::slant_range(double central_angle) const {
  const double r = earth_radius;
  const double s = earth_radius + altitude;
  return std::sqrt(r * r + s * s - 2.0 * r * s * std::cos(central_angle));
}

double OrbitGeometry::orbital_speed() const {
  return std::sqrt(kEarthMu / (earth_radius + altitude));
}

double LinkBudget::amplitude_at(double range_m, double carrier_hz) const {
  const double gains =
      std::pow(10.0, (tx_gain_dbi + rx_gain_dbi) / 20.0);
  const double lambda = kSpeedOfLight / carrier_hz;
  return std::sqrt(tx_power_w) * gains * lambda / (4.0 * std::numbers::pi * range_m);
}

double LinkBudget::n0(const OrbitGeometry& geom, double es) const {
  const double a_nadir = amplitude_at(geom.altitude, geom.carrier_hz);
  return n0_from_ebn0(nadir_ebn0_db, a_nadir * a_nadir * es);
}

UserChannel sample_vessel(const OrbitGeometry& geom, const LinkBudget& budget,
                          Rng& rng) {
  const double cos_max = std::cos(geom.max_central_angle());
  const double cosl = cos_max + (1.0 - cos_max) * rng.uniform();
  const double lambda = std::acos(std::min(1.0, cosl));
  const double psi = kTwoPi * rng.uniform();
  const double d = geom.slant_range(lambda);

  UserChannel ch;
  ch.delay = d / kSpeedOfLight;
  ch.attenuation = budget.amplitude_at(d, geom.carrier_hz);
  // Radial velocity of the satellite toward a static vessel at earth-central
  // angle lambda, azimuth psi from the velocity direction.
  const double px = geom.earth_radius * std::sin(lambda) * std::cos(psi);
  ch.doppler =
      geom.carrier_hz * geom.orbital_speed() * px / (kSpeedOfLight * d);
  ch.phase = kTwoPi * rng.uniform();
  return ch;
}

AlohaFrame run_aloha_frame(const LoadPoint& load, const OrbitGeometry& geom,
                           const LinkBudget& budget, Rng& rng) {
  if (load.offered_load < 0 || load.n_slots < 1)
    throw std::invalid_argument("LoadPoint: bad load or slot count");
  const double mean = load.offered_load * load.n_slots;
  const uint64_t n =
      load.fixed_arrivals ? uint64_t(llround(mean)) : rng.poisson(mean);

  AlohaFrame frame;
  frame.by_slot.resize(load.n_slots);
  frame.packets.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    AlohaPacket pkt;
    pkt.slot = int(rng.uniform_int(load.n_slots));
    pkt.payload = random_payload(rng);
    pkt.channel = sample_vessel(geom, budget, rng);
    frame.by_slot[pkt.slot].push_back(int(frame.packets.size()));
    frame.packets.push_back(std::move(pkt));
  }
  return frame;
}

FrameScore score_frame(const AlohaFrame& frame, const LoadPoint& load,
                       const OrbitGeometry& geom, const LinkBudget& budget,
                       const FrameConfig& fc, PacketDecoder& decoder,
                       uint64_t noise_seed, bool genie) {
  FrameScore score;
  score.sent = long(frame.packets.size());
  score.slots = load.n_slots;
  if (genie) {
    for (const auto& slot : frame.by_slot)
      if (slot.size() == 1) ++score.decoded;
    return score;
  }

  const ModulationConfig& mod = decoder.mod();
  const double slot_period = fc.slot_bits() * mod.ts;
  const double n0 = budget.n0(geom, mod.es);

  for (int s = 0; s < load.n_slots; ++s) {
    const auto& here = frame.by_slot[s];
    if (here.empty()) continue;

    // Strongest received packet in the slot is the decode target.
    int target = here.front();
    for (int idx : here)
      if (frame.packets[idx].channel.attenuation >
          frame.packets[target].channel.attenuation)
        target = idx;

    SlotScene scene;
    auto add_packets = [&](int slot_idx) {
      if (slot_idx < 0 || slot_idx >= load.n_slots) return;
      for (int idx : frame.by_slot[slot_idx]) {
        const AlohaPacket& pkt = frame.packets[idx];
        UserChannel ch = pkt.channel;
        ch.delay += slot_idx * slot_period;
        const Packet built = build_packet(pkt.payload, fc);
        scene.users.emplace_back(
            modulate(nrzi_encode(built.bits, fc.nrzi_initial_level),
                     decoder.mod(), decoder.pulse()),
            ch);
      }
    };
    add_packets(s - 1);
    add_packets(s);
    add_packets(s + 1);

    UserChannel target_ch = frame.packets[target].channel;
    target_ch.delay += s * slot_period;
    scene.span_begin = target_ch.delay - slot_period * 0.1;
    scene.span_end = target_ch.delay + slot_period * 1.1;

    Waveform rx = superpose(scene);
    Rng noise_rng(trial_seed(noise_seed, uint64_t(s)));
    add_awgn_n0(rx, n0, noise_rng);

    const DecodeResult res = decoder.decode(rx, target_ch);
    if (res.payload && *res.payload == frame.packets[target].payload)
      ++score.decoded;
  }
  return score;
}

}  // namespace ais
