#include <doctest.h>

#include "ais/frame_codec.hpp"
#include "ais/oracles.hpp"

using namespace ais;

namespace {

Bits ascii_bits_lsb_first(const std::string& s) {
  Bits out;
  for (char ch : s)
    for (int i = 0; i < 8; ++i) out.push_back((ch >> i) & 1);
  return out;
}

}  // namespace

TEST_CASE("fcs matches the X-25 check vector and the long-division oracle") {
  const Bits ref = ascii_bits_lsb_first("123456789");
  REQUIRE(ref.size() == 72);
  CHECK(fcs16(ref) == 0x906e);
  CHECK(oracle::crc_long_division_value(ref) == 0x906e);

  const Bits zeros(kPayloadBits, 0);
  const Bits fcs = compute_fcs(zeros);
  CHECK(fcs == oracle::crc_long_division(zeros));
  CHECK(fcs16(zeros) != 0);  // all-ones preset makes the zero word nonzero

  Rng rng(7);
  for (int t = 0; t < 3000; ++t) {
    const Bits m = random_bits(rng, 1 + rng.uniform_int(256));
    REQUIRE(fcs16(m) == oracle::crc_long_division_value(m));
  }
}

TEST_CASE("fcs round trip verifies for random payloads") {
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    Bits msg = random_payload(rng);
    const Bits fcs = compute_fcs(msg);
    msg.insert(msg.end(), fcs.begin(), fcs.end());
    REQUIRE(fcs_ok(msg));
  }
  CHECK_THROWS_AS(compute_fcs(Bits(100, 0)), std::invalid_argument);
}

TEST_CASE("fcs rejects every single and double bit error") {
  Rng rng(13);
  Bits msg = random_payload(rng);
  const Bits fcs = compute_fcs(msg);
  msg.insert(msg.end(), fcs.begin(), fcs.end());
  REQUIRE(fcs_ok(msg));
  for (int i = 0; i < kMessageBits; ++i) {
    msg[i] ^= 1;
    CHECK_FALSE(fcs_ok(msg));
    for (int j = i + 1; j < kMessageBits; ++j) {
      msg[j] ^= 1;
      if (fcs_ok(msg)) FAIL("double flip ", i, ",", j, " accepted");
      msg[j] ^= 1;
    }
    msg[i] ^= 1;
  }
  REQUIRE(fcs_ok(msg));
}

TEST_CASE("bit stuffing examples") {
  CHECK(bit_stuff(Bits{0, 1, 0, 1, 0, 1, 0}) == Bits{0, 1, 0, 1, 0, 1, 0});
  CHECK(bit_stuff(Bits{1, 1, 1, 1, 1}) == Bits{1, 1, 1, 1, 1, 0});
  CHECK(bit_stuff(Bits(10, 1)) == Bits{1, 1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 0});
}

TEST_CASE("bit destuffing inverts stuffing and flags forbidden runs") {
  CHECK(*bit_destuff(Bits{1, 1, 1, 1, 1, 0}) == Bits{1, 1, 1, 1, 1});
  CHECK_FALSE(bit_destuff(Bits{1, 1, 1, 1, 1, 1, 0}).has_value());
  CHECK_FALSE(bit_destuff(Bits{1, 1, 1, 1, 1}).has_value());  // truncated run

  Rng rng(17);
  for (int t = 0; t < 10000; ++t) {
    const Bits m = random_bits(rng, rng.uniform_int(64));
    const auto back = bit_destuff(bit_stuff(m));
    REQUIRE(back.has_value());
    REQUIRE(*back == m);
  }
}

TEST_CASE("nrzi conventions and round trip") {
  const Symbols ones = nrzi_encode(Bits(6, 1), +1);
  CHECK(ones == Symbols(6, 1));  // 1 = hold
  const Symbols zeros = nrzi_encode(Bits(6, 0), +1);
  CHECK(zeros == Symbols{-1, 1, -1, 1, -1, 1});  // 0 = toggle

  Rng rng(19);
  for (int t = 0; t < 2000; ++t) {
    const Bits m = random_bits(rng, rng.uniform_int(100));
    const int level = t % 2 ? 1 : -1;
    CHECK(nrzi_decode(nrzi_encode(m, level), level) == m);
  }
}

TEST_CASE("build_packet layout and length bounds") {
  const FrameConfig fc;
  Rng rng(23);
  for (int t = 0; t < 2000; ++t) {
    const Bits p = random_payload(rng);
    const Packet pkt = build_packet(p, fc);
    const int stuffing = pkt.layout.stuffed_len - kMessageBits;
    REQUIRE(stuffing >= 0);
    // total = 256 - (buffer allowance - stuffed bits)
    REQUIRE(pkt.total_len == fc.slot_bits() - (fc.buffer_len - stuffing));
    REQUIRE(pkt.total_len >= 224);
    REQUIRE(pkt.total_len <= 256);
    REQUIRE(pkt.total_len + pkt.layout.idle_len == fc.slot_bits());

    // flags in place
    for (int j = 0; j < 8; ++j) {
      REQUIRE(pkt.bits[pkt.layout.start_flag + j] == kFlagPattern[j]);
      REQUIRE(pkt.bits[pkt.layout.end_flag + j] == kFlagPattern[j]);
    }
    // stuffing safety: no flag pattern inside the stuffed region
    for (int i = pkt.layout.data; i + 8 <= pkt.layout.end_flag; ++i) {
      bool is_flag = true;
      for (int j = 0; j < 8; ++j)
        if (pkt.bits[i + j] != kFlagPattern[j]) { is_flag = false; break; }
      REQUIRE_FALSE(is_flag);
    }
  }
}

TEST_CASE("payload without five-one runs is not stuffed") {
  // Search deterministically for a payload whose message has no 5-run.
  Rng rng(29);
  for (int t = 0; t < 200; ++t) {
    Bits p = random_payload(rng);
    Bits msg = p;
    const Bits fcs = compute_fcs(p);
    msg.insert(msg.end(), fcs.begin(), fcs.end());
    if (bit_stuff(msg).size() != msg.size()) continue;
    const Packet pkt = build_packet(p);
    CHECK(pkt.layout.stuffed_len == kMessageBits);
    CHECK(pkt.total_len == 232);
    return;
  }
  FAIL("no stuffing-free payload found in 200 draws");
}

TEST_CASE("post-processing round trip and typed rejections") {
  const FrameConfig fc;
  Rng rng(31);
  for (int t = 0; t < 2000; ++t) {
    const Bits p = random_payload(rng);
    const Packet pkt = build_packet(p, fc);
    const Symbols sym = nrzi_encode(pkt.bits, fc.nrzi_initial_level);
    const std::span<const int8_t> cand(sym.data() + fc.preamble_len(),
                                       sym.size() - fc.preamble_len());
    const auto res = post_process_candidate(cand, sym[fc.preamble_len() - 1], fc);
    REQUIRE(res.ok);
    REQUIRE(res.payload == p);
  }
}

TEST_CASE("single bit flips in the data region are rejected") {
  const FrameConfig fc;
  Rng rng(37);
  const Bits p = random_payload(rng);
  const Packet pkt = build_packet(p, fc);
  for (int i = pkt.layout.data; i < pkt.layout.end_flag; ++i) {
    Bits bits = pkt.bits;
    bits[i] ^= 1;
    const Symbols sym = nrzi_encode(bits, fc.nrzi_initial_level);
    const std::span<const int8_t> cand(sym.data() + fc.preamble_len(),
                                       sym.size() - fc.preamble_len());
    const auto res = post_process_candidate(cand, sym[fc.preamble_len() - 1], fc);
    if (res.ok) FAIL("flip at ", i, " accepted");
  }
}

namespace {

PostProcessResult run_crafted(const Bits& inner) {
  Bits bits(kFlagPattern.begin(), kFlagPattern.end());
  bits.insert(bits.end(), inner.begin(), inner.end());
  bits.insert(bits.end(), kFlagPattern.begin(), kFlagPattern.end());
  const Symbols sym = nrzi_encode(bits, +1);
  return post_process_candidate(sym, +1, FrameConfig{});
}

}  // namespace

TEST_CASE("rejection stages fire in fixed order") {
  // 183 destuffed bits: length check fails before the CRC is ever looked at.
  Bits alt183(183);
  for (int i = 0; i < 183; ++i) alt183[i] = i & 1;
  auto res = run_crafted(alt183);
  CHECK_FALSE(res.ok);
  CHECK(res.reason == Reject::bad_length);

  // A run of seven 1s is invalid stuffing and reported before the length.
  Bits bad = alt183;
  for (int i = 40; i < 47; ++i) bad[i] = 1;
  bad[39] = 0;
  bad[47] = 0;
  res = run_crafted(bad);
  CHECK_FALSE(res.ok);
  CHECK(res.reason == Reject::invalid_stuffing);

  // Valid stuffing and length but a corrupted FCS.
  Rng rng(41);
  const Bits p = random_payload(rng);
  Bits msg = p;
  const Bits fcs = compute_fcs(p);
  msg.insert(msg.end(), fcs.begin(), fcs.end());
  msg[5] ^= 1;
  res = run_crafted(bit_stuff(msg));
  CHECK_FALSE(res.ok);
  CHECK(res.reason == Reject::bad_crc);

  // No flags at all.
  const Symbols flat(64, 1);
  const auto none = post_process_candidate(flat, +1, FrameConfig{});
  CHECK_FALSE(none.ok);
  CHECK(none.reason == Reject::flag_not_found);
}

TEST_CASE("hex serialization round trip") {
  Rng rng(43);
  for (int t = 0; t < 200; ++t) {
    const size_t n = 1 + rng.uniform_int(64);
    const Bits m = random_bits(rng, n);
    CHECK(bits_from_hex(bits_to_hex(m), n) == m);
  }
  CHECK(bits_to_hex(Bits{0, 1, 1, 1, 1, 1, 1, 0}) == "7e");
}

TEST_CASE("layout dump mentions every field") {
  Rng rng(47);
  const Packet pkt = build_packet(random_payload(rng));
  const std::string text = layout_to_text(pkt);
  for (const char* key : {"ramp", "training", "start_flag", "data", "end_flag",
                          "idle", "total"})
    CHECK(text.find(key) != std::string::npos);
}
