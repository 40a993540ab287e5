// Experiment scenarios: the controlled two-user collision, vessel geometry
// seen from a LEO satellite, and slotted-ALOHA frame generation and scoring.
#pragma once

#include <vector>

#include "ais/channel.hpp"
#include "ais/list_decoder.hpp"

namespace ais {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kEarthMu = 3.986004418e14;  // m^3/s^2

struct TwoUserScenario {
  double power_delta_db = -3.0;  // interferer relative to the user of interest
  double overlap_fraction = 0.17;  // of the target's data region (see below)
  double doppler_delta = 0.0;      // Hz
};

struct TwoUserTruth {
  Bits target_payload;
  Bits interferer_payload;
  UserChannel target;
};

// Target at reference power and zero delay; the interferer starts late by
// pkt_len - f * data_len symbols, so the intersection of the two on-air spans
// equals the requested fraction of the target's data region (f = 0 puts the
// interferer completely clear of the target packet). Payloads and phases are
// drawn independently.
SlotScene make_two_user_scene(const TwoUserScenario& sc,
                              const ModulationConfig& mod,
                              const PhasePulse& pulse, const FrameConfig& fc,
                              Rng& rng, TwoUserTruth* truth = nullptr);

struct OrbitGeometry {
  double altitude = 656500.0;       // m
  double earth_radius = 6371000.0;  // m
  double carrier_hz = 161.975e6;    // AIS channel A
  double min_elevation_deg = 0.0;

  // Earth-central half angle of the visible cap.
  double max_central_angle() const;
  // Satellite-to-ground distance at central angle lambda.
  double slant_range(double central_angle) const;
  double edge_range() const { return slant_range(max_central_angle()); }
  double orbital_speed() const;  // circular orbit, sqrt(mu / (R + h))
};

struct LinkBudget {
  double tx_power_w = 12.5;
  double tx_gain_dbi = 0.0;
  double rx_gain_dbi = 0.0;
  // Noise anchor: Eb/N0 a nadir vessel would see. The paper discloses no
  // absolute link budget, so throughput claims are checked as properties.
  double nadir_ebn0_db = 20.0;

  double amplitude_at(double range_m, double carrier_hz) const;
  double n0(const OrbitGeometry& geom, double es) const;
};

// Vessel uniform by area on the visible cap: slant range -> delay and
// free-space amplitude, radial velocity -> Doppler, phase uniform.
UserChannel sample_vessel(const OrbitGeometry& geom, const LinkBudget& budget,
                          Rng& rng);

struct LoadPoint {
  double offered_load = 1.0;  // average packets per slot
  int n_slots = 2250;         // one-minute AIS frame
  int n_frames = 50;
  bool fixed_arrivals = false;  // variance-reduced mode: exactly load*slots
};

struct AlohaPacket {
  Bits payload;
  int slot = 0;
  UserChannel channel;  // delay holds only the propagation part; the slot
                        // offset is added when the scene is built
};

struct AlohaFrame {
  std::vector<AlohaPacket> packets;
  std::vector<std::vector<int>> by_slot;  // packet indices per slot
};

AlohaFrame run_aloha_frame(const LoadPoint& load, const OrbitGeometry& geom,
                           const LinkBudget& budget, Rng& rng);

struct FrameScore {
  long sent = 0;
  long decoded = 0;
  long slots = 0;
  double throughput() const { return slots ? double(decoded) / slots : 0.0; }
  double per() const { return sent ? 1.0 - double(decoded) / sent : 0.0; }
};

// Per-slot decoding of the strongest received packet, interference from the
// adjacent slots included, no cancellation. genie = true scores a slot as
// decoded iff it holds exactly one packet (closed-form ALOHA reference).
FrameScore score_frame(const AlohaFrame& frame, const LoadPoint& load,
                       const OrbitGeometry& geom, const LinkBudget& budget,
                       const FrameConfig& fc, PacketDecoder& decoder,
                       uint64_t noise_seed, bool genie = false);

}  // namespace ais
