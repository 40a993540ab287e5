// AIS packet construction and candidate post-processing: HDLC-style FCS,
// bit stuffing, NRZI line coding and the flag-delimited frame layout.
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>

#include "ais/bits.hpp"
#include "ais/rng.hpp"

namespace ais {

inline constexpr int kPayloadBits = 168;
inline constexpr int kFcsBits = 16;
inline constexpr int kMessageBits = kPayloadBits + kFcsBits;  // 184
inline constexpr std::array<uint8_t, 8> kFlagPattern = {0, 1, 1, 1, 1, 1, 1, 0};

struct FrameConfig {
  int ramp_len = 8;
  int training_len = 24;  // alternating 0101...
  int flag_len = 8;
  int buffer_len = 24;  // slot symbols reserved after the end flag (idle)
  // Line level ahead of the first packet bit. The standard does not pin it
  // down, so it stays configurable.
  int nrzi_initial_level = +1;

  int preamble_len() const { return ramp_len + training_len; }  // 32
  int slot_bits() const {
    return preamble_len() + 2 * flag_len + kMessageBits + buffer_len;  // 256
  }
};

// HDLC frame check sequence over an arbitrary bit string: generator
// x^16+x^12+x^5+1, register preset to all ones, remainder ones-complemented.
// Input bits are taken in transmission order; the returned value reads the
// FCS bits LSB-first (CRC-16/X-25 convention, check value 0x906E).
uint16_t fcs16(std::span<const uint8_t> bits);

// FCS of a 168-bit payload as the 16 bits to append, transmission order.
// Throws std::invalid_argument on a wrong-length or non-binary input.
Bits compute_fcs(std::span<const uint8_t> payload);

// True iff the last 16 bits of a 184-bit message equal the FCS of the first
// 168.
bool fcs_ok(std::span<const uint8_t> message);

// Insert a 0 after every run of five consecutive 1s.
Bits bit_stuff(std::span<const uint8_t> bits);

// Remove the 0 that follows every run of five 1s. Returns nullopt when a run
// of five 1s is followed by a sixth 1 or ends the stream: neither occurs in
// the image of bit_stuff, so the candidate is corrupted.
std::optional<Bits> bit_destuff(std::span<const uint8_t> bits);

// NRZI line code: a 0 bit toggles the level, a 1 bit keeps it.
Symbols nrzi_encode(std::span<const uint8_t> bits, int initial_level);
Bits nrzi_decode(std::span<const int8_t> symbols, int initial_level);

struct PacketLayout {
  int ramp = 0;
  int training = 0;
  int start_flag = 0;
  int data = 0;       // stuffed message start
  int end_flag = 0;
  int stuffed_len = 0;  // 184 + inserted stuffing bits
  int idle_len = 0;     // remaining buffer symbols, not transmitted
};

struct Packet {
  Bits bits;  // on-air bits: ramp | training | start flag | stuffed | end flag
  PacketLayout layout;
  int total_len = 0;  // == bits.size(); slot_bits() - idle_len
};

Packet build_packet(std::span<const uint8_t> payload, const FrameConfig& fc = {});

std::string layout_to_text(const Packet& pkt);

enum class Reject {
  flag_not_found,
  invalid_stuffing,
  bad_length,
  bad_crc,
};
const char* reject_name(Reject r);

struct PostProcessResult {
  bool ok = false;
  Bits payload;   // 168 bits when ok
  Reject reason = Reject::flag_not_found;
};

// Candidate validation pipeline, fixed stage order: NRZI decode, locate the
// two 01111110 flags, destuff the in-between bits, require length 184, check
// the FCS. The symbols are expected to start at the start flag.
PostProcessResult post_process_candidate(std::span<const int8_t> symbols,
                                         int initial_level,
                                         const FrameConfig& fc = {});

Bits random_payload(Rng& rng);
Bits random_bits(Rng& rng, size_t n);

}  // namespace ais
