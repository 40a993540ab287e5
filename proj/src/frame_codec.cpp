#include "ais/frame_codec.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace ais {

std::string bits_to_hex(std::span<const uint8_t> bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((bits.size() + 3) / 4);
  for (size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (size_t j = 0; j < 4; ++j) {
      v <<= 1;
      if (i + j < bits.size()) v |= bits[i + j] & 1;
    }
    out.push_back(digits[v]);
  }
  return out;
}

Bits bits_from_hex(const std::string& hex, size_t nbits) {
  Bits out;
  out.reserve(nbits);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::invalid_argument("bits_from_hex: bad digit");
    for (int j = 3; j >= 0; --j) {
      if (out.size() < nbits) out.push_back((v >> j) & 1);
    }
  }
  if (out.size() < nbits)
    throw std::invalid_argument("bits_from_hex: hex string too short");
  return out;
}

static void check_binary(std::span<const uint8_t> bits) {
  for (uint8_t b : bits)
    if (b > 1) throw std::invalid_argument("bit sequence element not in {0,1}");
}

uint16_t fcs16(std::span<const uint8_t> bits) {
  check_binary(bits);
  uint16_t crc = 0xffff;
  for (uint8_t b : bits) {
    const uint16_t mix = (crc ^ b) & 1;
    crc >>= 1;
    if (mix) crc ^= 0x8408;  // x^16+x^12+x^5+1, reflected
  }
  return crc ^ 0xffff;
}

Bits compute_fcs(std::span<const uint8_t> payload) {
  if (payload.size() != kPayloadBits)
    throw std::invalid_argument("compute_fcs: payload must be 168 bits");
  const uint16_t v = fcs16(payload);
  Bits out(kFcsBits);
  for (int i = 0; i < kFcsBits; ++i) out[i] = (v >> i) & 1;
  return out;
}

bool fcs_ok(std::span<const uint8_t> message) {
  if (message.size() != kMessageBits) return false;
  const Bits expect = compute_fcs(message.first(kPayloadBits));
  return std::equal(expect.begin(), expect.end(),
                    message.begin() + kPayloadBits);
}

Bits bit_stuff(std::span<const uint8_t> bits) {
  check_binary(bits);
  Bits out;
  out.reserve(bits.size() + bits.size() / 5 + 1);
  int run = 0;
  for (uint8_t b : bits) {
    out.push_back(b);
    if (b) {
      if (++run == 5) {
        out.push_back(0);
        run = 0;
      }
    } else {
      run = 0;
    }
  }
  return out;
}

std::optional<Bits> bit_destuff(std::span<const uint8_t> bits) {
  check_binary(bits);
  Bits out;
  out.reserve(bits.size());
  int run = 0;
  for (size_t i = 0; i < bits.size(); ++i) {
    out.push_back(bits[i]);
    if (bits[i]) {
      if (++run == 5) {
        if (i + 1 >= bits.size() || bits[i + 1] == 1) return std::nullopt;
        ++i;  // drop the stuffed zero
        run = 0;
      }
    } else {
      run = 0;
    }
  }
  return out;
}

Symbols nrzi_encode(std::span<const uint8_t> bits, int initial_level) {
  check_binary(bits);
  Symbols out(bits.size());
  int8_t level = initial_level > 0 ? 1 : -1;
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == 0) level = -level;
    out[i] = level;
  }
  return out;
}

Bits nrzi_decode(std::span<const int8_t> symbols, int initial_level) {
  Bits out(symbols.size());
  int8_t prev = initial_level > 0 ? 1 : -1;
  for (size_t i = 0; i < symbols.size(); ++i) {
    const int8_t cur = symbols[i] > 0 ? 1 : -1;
    out[i] = (cur == prev) ? 1 : 0;
    prev = cur;
  }
  return out;
}

Packet build_packet(std::span<const uint8_t> payload, const FrameConfig& fc) {
  if (int(payload.size()) != kPayloadBits)
    throw std::invalid_argument("build_packet: payload must be 168 bits");
  Bits message(payload.begin(), payload.end());
  const Bits fcs = compute_fcs(payload);
  message.insert(message.end(), fcs.begin(), fcs.end());
  const Bits stuffed = bit_stuff(message);

  Packet pkt;
  pkt.layout.ramp = 0;
  pkt.layout.training = fc.ramp_len;
  pkt.layout.start_flag = fc.preamble_len();
  pkt.layout.data = fc.preamble_len() + fc.flag_len;
  pkt.layout.stuffed_len = int(stuffed.size());
  pkt.layout.end_flag = pkt.layout.data + pkt.layout.stuffed_len;

  pkt.bits.reserve(pkt.layout.end_flag + fc.flag_len);
  pkt.bits.assign(fc.ramp_len, 0);
  for (int i = 0; i < fc.training_len; ++i) pkt.bits.push_back(i & 1);
  pkt.bits.insert(pkt.bits.end(), kFlagPattern.begin(), kFlagPattern.end());
  pkt.bits.insert(pkt.bits.end(), stuffed.begin(), stuffed.end());
  pkt.bits.insert(pkt.bits.end(), kFlagPattern.begin(), kFlagPattern.end());

  pkt.total_len = int(pkt.bits.size());
  // The buffer absorbs the stuffing overhead; what is left of it stays idle.
  pkt.layout.idle_len = std::max(0, fc.slot_bits() - pkt.total_len);
  return pkt;
}

std::string layout_to_text(const Packet& pkt) {
  std::ostringstream os;
  const auto& l = pkt.layout;
  os << "ramp @" << l.ramp << " len " << (l.training - l.ramp) << "\n"
     << "training @" << l.training << " len " << (l.start_flag - l.training)
     << "\n"
     << "start_flag @" << l.start_flag << " len " << (l.data - l.start_flag)
     << "\n"
     << "data @" << l.data << " len " << l.stuffed_len << " (stuffed)\n"
     << "end_flag @" << l.end_flag << " len "
     << (pkt.total_len - l.end_flag) << "\n"
     << "idle len " << l.idle_len << "\n"
     << "total " << pkt.total_len << "\n";
  return os.str();
}

const char* reject_name(Reject r) {
  switch (r) {
    case Reject::flag_not_found: return "flag_not_found";
    case Reject::invalid_stuffing: return "invalid_stuffing";
    case Reject::bad_length: return "bad_length";
    case Reject::bad_crc: return "bad_crc";
  }
  return "?";
}

static int find_flag(const Bits& bits, size_t from) {
  if (bits.size() < 8) return -1;
  for (size_t i = from; i + 8 <= bits.size(); ++i) {
    bool match = true;
    for (size_t j = 0; j < 8; ++j) {
      if (bits[i + j] != kFlagPattern[j]) {
        match = false;
        break;
      }
    }
    if (match) return int(i);
  }
  return -1;
}

PostProcessResult post_process_candidate(std::span<const int8_t> symbols,
                                         int initial_level,
                                         const FrameConfig& fc) {
  PostProcessResult res;
  const Bits bits = nrzi_decode(symbols, initial_level);

  const int sflag = find_flag(bits, 0);
  if (sflag < 0) {
    res.reason = Reject::flag_not_found;
    return res;
  }
  const int eflag = find_flag(bits, sflag + fc.flag_len);
  if (eflag < 0) {
    res.reason = Reject::flag_not_found;
    return res;
  }

  const std::span<const uint8_t> inner(bits.data() + sflag + fc.flag_len,
                                       size_t(eflag - sflag - fc.flag_len));
  const auto destuffed = bit_destuff(inner);
  if (!destuffed) {
    res.reason = Reject::invalid_stuffing;
    return res;
  }
  if (int(destuffed->size()) != kMessageBits) {
    res.reason = Reject::bad_length;
    return res;
  }
  if (!fcs_ok(*destuffed)) {
    res.reason = Reject::bad_crc;
    return res;
  }
  res.ok = true;
  res.payload.assign(destuffed->begin(), destuffed->begin() + kPayloadBits);
  return res;
}

Bits random_bits(Rng& rng, size_t n) {
  Bits out(n);
  for (auto& b : out) b = uint8_t(rng.next_u64() & 1);
  return out;
}

Bits random_payload(Rng& rng) { return random_bits(rng, kPayloadBits); }

}  // namespace ais
