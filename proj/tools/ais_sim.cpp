// Command-line front end: single-user PER sweeps, the two-user (P,C) grid,
// slotted-ALOHA throughput curves and a self-test that runs the verification
// oracles. CSV goes to stdout or --out; progress and timing go to stderr.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ais/oracles.hpp"
#include "ais/sweep.hpp"

using nlohmann::json;

namespace {

struct Options {
  std::string detector = "coherent";
  int paths = 1;
  int candidates = 1;
  int diff_delay = 3;
  std::string ebn0 = "4:10:1";
  double ebn0_point = 7.0;
  int packets = 10000;
  int target_errors = 100;
  uint64_t seed = 1;
  int workers = 1;
  std::string out;
  std::string scene_file;
  std::string dump_packet;
  bool uniform_init = false;
  bool fixed_arrivals = false;

  std::string cells = "1x1,64x16,64x64,64x256,256x256";
  std::string overlaps = "0.17,0.83";
  double power_delta_db = -3.0;
  double doppler_delta = 0.0;

  std::string loads = "0.25,0.5,0.75,1,1.25,1.5,1.75,2";
  int frames = 50;
  int n_slots = 2250;
  double altitude_m = 656500.0;
  double carrier_hz = 161.975e6;
  double min_elevation_deg = 0.0;
  double tx_power_w = 12.5;
  double nadir_ebn0_db = 20.0;

  double bt = 0.4;
  int cpm_memory = 3;
  int oversampling = 8;
  int nrzi_initial_level = 1;
};

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const auto parse_one = [](const std::string& s) -> double {
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    return std::stod(s);
  };
  if (text.find(':') != std::string::npos) {
    double a, b, step;
    char c1, c2;
    std::istringstream is(text);
    if (!(is >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0)
      throw CLI::ValidationError("grid", "expected a:b:step");
    for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_one(item));
  }
  if (out.empty()) throw CLI::ValidationError("grid", "empty value list");
  return out;
}

std::vector<std::pair<int, int>> parse_cells(const std::string& text) {
  std::vector<std::pair<int, int>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto x = item.find('x');
    if (x == std::string::npos)
      throw CLI::ValidationError("cells", "expected PxC,...");
    out.emplace_back(std::stoi(item.substr(0, x)), std::stoi(item.substr(x + 1)));
  }
  if (out.empty()) throw CLI::ValidationError("cells", "empty cell list");
  return out;
}

// Layer 2 of the config stack: JSON file between built-in defaults and flags.
void apply_config_file(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  json doc = json::parse(in);
  static const std::set<std::string> known = {
      "detector", "paths", "candidates", "diff_delay", "ebn0", "ebn0_point",
      "packets", "target_errors", "seed", "workers", "cells", "overlaps",
      "power_delta_db", "doppler_delta", "loads", "frames", "n_slots",
      "altitude_m", "carrier_hz", "min_elevation_deg", "tx_power_w",
      "nadir_ebn0_db", "bt", "cpm_memory", "oversampling",
      "nrzi_initial_level", "uniform_init", "fixed_arrivals"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.count(key))
      throw CLI::ValidationError("--config", "unknown key: " + key);
  }
  auto get = [&](const char* k, auto& dst) {
    if (doc.contains(k)) dst = doc[k].get<std::decay_t<decltype(dst)>>();
  };
  get("detector", o.detector);
  get("paths", o.paths);
  get("candidates", o.candidates);
  get("diff_delay", o.diff_delay);
  if (doc.contains("ebn0")) {
    if (doc["ebn0"].is_array()) {
      std::string joined;
      for (const auto& v : doc["ebn0"])
        joined += (joined.empty() ? "" : ",") + v.dump();
      o.ebn0 = joined;
    } else {
      o.ebn0 = doc["ebn0"].get<std::string>();
    }
  }
  get("ebn0_point", o.ebn0_point);
  get("packets", o.packets);
  get("target_errors", o.target_errors);
  get("seed", o.seed);
  get("workers", o.workers);
  get("cells", o.cells);
  get("overlaps", o.overlaps);
  get("power_delta_db", o.power_delta_db);
  get("doppler_delta", o.doppler_delta);
  get("loads", o.loads);
  get("frames", o.frames);
  get("n_slots", o.n_slots);
  get("altitude_m", o.altitude_m);
  get("carrier_hz", o.carrier_hz);
  get("min_elevation_deg", o.min_elevation_deg);
  get("tx_power_w", o.tx_power_w);
  get("nadir_ebn0_db", o.nadir_ebn0_db);
  get("bt", o.bt);
  get("cpm_memory", o.cpm_memory);
  get("oversampling", o.oversampling);
  get("nrzi_initial_level", o.nrzi_initial_level);
  get("uniform_init", o.uniform_init);
  get("fixed_arrivals", o.fixed_arrivals);
}

ais::ModulationConfig make_mod(const Options& o) {
  ais::ModulationConfig mod;
  mod.bt = o.bt;
  mod.cpm_memory = o.cpm_memory;
  mod.oversampling = o.oversampling;
  return mod;
}

ais::FrameConfig make_frame(const Options& o) {
  ais::FrameConfig fc;
  fc.nrzi_initial_level = o.nrzi_initial_level;
  return fc;
}

ais::DecoderConfig make_decoder(const Options& o) {
  ais::DecoderConfig dc;
  if (o.detector == "coherent") dc.detector = ais::Detector::coherent;
  else if (o.detector == "differential") dc.detector = ais::Detector::differential;
  else throw CLI::ValidationError("--detector", "coherent or differential");
  dc.delay_factor = o.diff_delay;
  dc.list = {o.paths, o.candidates};
  dc.known_start = !o.uniform_init;
  return dc;
}

void emit(const Options& o, const std::string& csv) {
  if (o.out.empty()) {
    std::cout << csv;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + o.out);
  f << csv;
}

int cmd_per_sweep(const Options& o) {
  ais::PerSweepConfig cfg;
  cfg.mod = make_mod(o);
  cfg.frame = make_frame(o);
  cfg.decoder = make_decoder(o);
  cfg.ebn0_db = parse_grid(o.ebn0);
  cfg.max_packets = o.packets;
  cfg.target_errors = o.target_errors;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  const auto rows = ais::per_sweep(cfg, &std::cerr);
  emit(o, ais::per_sweep_csv(cfg, rows));
  return 0;
}

int cmd_two_user(const Options& o) {
  ais::TwoUserSweepConfig cfg;
  cfg.mod = make_mod(o);
  cfg.frame = make_frame(o);
  const ais::DecoderConfig dc = make_decoder(o);
  cfg.detector = dc.detector;
  cfg.delay_factor = dc.delay_factor;
  cfg.known_start = dc.known_start;
  cfg.cells = parse_cells(o.cells);
  cfg.overlaps = parse_grid(o.overlaps);
  cfg.power_delta_db = o.power_delta_db;
  cfg.doppler_delta = o.doppler_delta;
  cfg.ebn0_db = o.ebn0_point;
  cfg.packets = o.packets;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  if (!o.scene_file.empty()) {
    std::ifstream in(o.scene_file);
    if (!in) throw CLI::ValidationError("--scene", "cannot open " + o.scene_file);
    std::stringstream buf;
    buf << in.rdbuf();
    cfg.scene_override = ais::parse_scene_channels(buf.str(), cfg.mod.ts);
    if (cfg.scene_override.size() != 2)
      throw CLI::ValidationError("--scene", "expected exactly 2 users");
  }
  const auto rows = ais::two_user_sweep(cfg, &std::cerr);
  emit(o, ais::two_user_csv(cfg, rows));
  return 0;
}

int cmd_throughput(const Options& o) {
  ais::ThroughputSweepConfig cfg;
  cfg.mod = make_mod(o);
  cfg.frame = make_frame(o);
  cfg.loads = parse_grid(o.loads);
  cfg.n_slots = o.n_slots;
  cfg.frames = o.frames;
  cfg.fixed_arrivals = o.fixed_arrivals;
  cfg.geom.altitude = o.altitude_m;
  cfg.geom.carrier_hz = o.carrier_hz;
  cfg.geom.min_elevation_deg = o.min_elevation_deg;
  cfg.budget.tx_power_w = o.tx_power_w;
  cfg.budget.nadir_ebn0_db = o.nadir_ebn0_db;
  cfg.seed = o.seed;
  cfg.workers = o.workers;
  const auto rows = ais::throughput_sweep(cfg, &std::cerr);
  emit(o, ais::throughput_csv(cfg, rows));
  return 0;
}

int check(bool ok, const char* name, std::string* report) {
  char line[160];
  std::snprintf(line, sizeof(line), "%s %s\n", ok ? "PASS" : "FAIL", name);
  *report += line;
  return ok ? 0 : 1;
}

int cmd_selftest(const Options& o) {
  using namespace ais;
  std::string report;
  int failures = 0;
  Rng rng(o.seed);

  {  // FCS vs the long-division oracle, plus the standard check vector
    Bits ref;
    for (char ch : std::string("123456789"))
      for (int i = 0; i < 8; ++i) ref.push_back((ch >> i) & 1);
    bool ok = fcs16(ref) == 0x906e &&
              oracle::crc_long_division_value(ref) == 0x906e;
    for (int t = 0; t < 2000 && ok; ++t) {
      const Bits m = random_bits(rng, 1 + rng.uniform_int(300));
      ok = fcs16(m) == oracle::crc_long_division_value(m);
    }
    failures += check(ok, "fcs_long_division_oracle", &report);
  }
  {  // stuffing and NRZI invertibility
    bool ok = true;
    for (int t = 0; t < 1000 && ok; ++t) {
      const Bits m = random_bits(rng, rng.uniform_int(200));
      const auto back = bit_destuff(bit_stuff(m));
      ok = back && *back == m;
      const Symbols s = nrzi_encode(m, t % 2 ? 1 : -1);
      ok = ok && nrzi_decode(s, t % 2 ? 1 : -1) == m;
    }
    failures += check(ok, "stuffing_nrzi_roundtrip", &report);
  }
  {  // noiseless codec chain
    bool ok = true;
    const FrameConfig fc = make_frame(o);
    for (int t = 0; t < 500 && ok; ++t) {
      const Bits p = random_payload(rng);
      const Packet pkt = build_packet(p, fc);
      const Symbols sym = nrzi_encode(pkt.bits, fc.nrzi_initial_level);
      const std::span<const int8_t> tail(sym.data() + fc.preamble_len(),
                                         sym.size() - fc.preamble_len());
      const auto res =
          post_process_candidate(tail, sym[fc.preamble_len() - 1], fc);
      ok = res.ok && res.payload == p;
    }
    failures += check(ok, "codec_roundtrip", &report);
  }
  const ModulationConfig mod = make_mod(o);
  const PhasePulse pulse = make_phase_pulse(mod);
  {  // modulator vs the direct-sum phase oracle
    bool ok = std::abs(pulse.q.back() - 0.5) == 0.0;
    const double raw = oracle::integrate_freq_pulse(mod, 0, mod.cpm_memory * mod.ts);
    ok = ok && std::abs(raw - 0.5) < 2e-3;
    Symbols sym(64);
    for (auto& s : sym) s = rng.next_u64() & 1 ? 1 : -1;
    const Waveform w = modulate(sym, mod, pulse);
    const auto phase = oracle::direct_phase(sym, mod, pulse);
    for (size_t k = 0; k < w.samples.size() && ok; ++k) {
      const cplx expect = std::polar(mod.envelope(), phase[k]);
      ok = std::abs(w.samples[k] - expect) < 1e-9 * mod.envelope();
    }
    failures += check(ok, "gmsk_phase_oracle", &report);
  }
  {  // branch metric self-correlation and noiseless Viterbi
    const Trellis tr = build_coherent_trellis(mod, pulse);
    std::span<const cplx> r0(tr.ref(0, 1), size_t(tr.samples_per_symbol));
    bool ok = std::abs(branch_metric(r0, r0, tr.dt) - 2.0 * mod.es) < 1e-6;
    const FrameConfig fc = make_frame(o);
    DecoderConfig dc;
    PacketDecoder va(mod, fc, dc);
    dc.list = {4, 4};
    PacketDecoder lva(mod, fc, dc);
    for (int t = 0; t < 25 && ok; ++t) {
      const Bits p = random_payload(rng);
      const Packet pkt = build_packet(p, fc);
      SlotScene scene;
      UserChannel ch;
      ch.phase = 2.0 * std::numbers::pi * rng.uniform();
      scene.users.emplace_back(
          modulate(nrzi_encode(pkt.bits, fc.nrzi_initial_level), mod, pulse), ch);
      scene.span_end = fc.slot_bits() * mod.ts;
      Waveform rx = superpose(scene);
      add_awgn_n0(rx, n0_from_ebn0(8.0, mod.es), rng);
      const auto a = va.decode(rx, ch);
      const auto b = lva.decode(rx, ch);
      ok = (a.payload == b.payload) ||
           (a.payload && b.payload && *a.payload == *b.payload) ||
           (!a.payload && b.payload.has_value());  // larger list may recover
    }
    failures += check(ok, "trellis_decode_sanity", &report);
  }
  {  // noise calibration against the closed-form antipodal error rate
    ModulationConfig msk = mod;
    msk.cpm_memory = 1;
    msk.shape = PulseShape::rectangular;
    const PhasePulse rect = make_phase_pulse(msk);
    const Trellis tr = build_coherent_trellis(msk, rect);
    const double ebn0 = 6.0;
    long bits = 0, errs = 0;
    const int block = 500;
    while (bits < 200000) {
      Symbols sym(block);
      for (auto& s : sym) s = rng.next_u64() & 1 ? 1 : -1;
      Waveform w = modulate(sym, msk, rect);
      add_awgn_n0(w, n0_from_ebn0(ebn0, msk.es), rng);
      const Candidate cand =
          viterbi(w.samples, tr, block, InitMetrics::known(0));
      for (int i = 0; i < block; ++i) errs += cand.symbols[i] != sym[i];
      bits += block;
    }
    const double ber = double(errs) / bits;
    const double ref = oracle::msk_mlse_ber(ebn0);
    const double sigma = std::sqrt(ref * (1 - ref) / bits);
    failures += check(std::abs(ber - ref) < 4 * sigma + 1e-12,
                      "noise_calibration_msk", &report);
  }
  if (!o.dump_packet.empty()) {
    Rng drng(o.seed);
    const FrameConfig fc = make_frame(o);
    const Packet pkt = build_packet(random_payload(drng), fc);
    const Waveform w =
        modulate(nrzi_encode(pkt.bits, fc.nrzi_initial_level), mod, pulse);
    if (o.dump_packet.size() > 4 &&
        o.dump_packet.substr(o.dump_packet.size() - 4) == ".csv")
      write_iq_csv(w, o.dump_packet);
    else
      write_iq_f64(w, o.dump_packet);
    std::cerr << "wrote " << w.samples.size() << " samples to "
              << o.dump_packet << "\n";
  }

  if (o.out.empty()) std::cout << report;
  else emit(o, report);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "AIS GMSK simulation: packet construction, single/multi-user reception, "
      "Viterbi and parallel list Viterbi decoding with CRC-aided selection"};
  app.require_subcommand(1);

  Options o;
  std::string config_file;

  // The config file is applied before flag parsing so flags win.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_file = argv[i + 1];
  }
  try {
    if (!config_file.empty()) apply_config_file(config_file, o);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  app.add_option("--config", config_file, "JSON config file (defaults layer)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--detector", o.detector, "coherent|differential");
    sub->add_option("--paths", o.paths, "P, paths kept per state");
    sub->add_option("--candidates", o.candidates, "C, final candidates");
    sub->add_option("--diff-delay", o.diff_delay, "K for the differential detector");
    sub->add_option("--seed", o.seed, "base RNG seed");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_option("--out", o.out, "output file (default stdout)");
    sub->add_flag("--uniform-init", o.uniform_init,
                  "uniform trellis start instead of the known preamble state");
    sub->add_option("--bt", o.bt, "Gaussian pulse bandwidth-time product");
    sub->add_option("--cpm-memory", o.cpm_memory, "CPM memory L");
    sub->add_option("--oversampling", o.oversampling, "samples per symbol Q");
    sub->add_option("--nrzi-initial-level", o.nrzi_initial_level,
                    "NRZI level before the first bit (+1/-1)");
  };

  CLI::App* per = app.add_subcommand(
      "per-sweep", "single-user AWGN PER vs Eb/N0 (CSV: one row per point)");
  add_common(per);
  per->add_option("--ebn0", o.ebn0, "grid a:b:step or v1,v2,... ('inf' allowed), dB");
  per->add_option("--packets", o.packets, "max packets per point");
  per->add_option("--target-errors", o.target_errors,
                  "stop a point early at this error count (0 = never)");

  CLI::App* two = app.add_subcommand(
      "two-user", "two-user collision PER over a (P,C) grid at fixed Eb/N0");
  add_common(two);
  two->add_option("--cells", o.cells, "list-size grid, e.g. 1x1,64x256");
  two->add_option("--overlaps", o.overlaps, "overlap fractions of the data region");
  two->add_option("--power-delta", o.power_delta_db,
                  "interferer power relative to the target, dB");
  two->add_option("--doppler-delta", o.doppler_delta, "interferer Doppler, Hz");
  two->add_option("--ebn0", o.ebn0_point, "operating Eb/N0, dB");
  two->add_option("--packets", o.packets, "packets per cell");
  two->add_option("--scene", o.scene_file,
                  "JSON scene file overriding the generated channels");

  CLI::App* thr = app.add_subcommand(
      "throughput", "slotted-ALOHA throughput vs offered load, three receivers");
  add_common(thr);
  thr->add_option("--loads", o.loads, "offered load grid, pkt/slot");
  thr->add_option("--frames", o.frames, "Monte Carlo frames per load");
  thr->add_option("--slots", o.n_slots, "slots per frame");
  thr->add_option("--altitude", o.altitude_m, "satellite altitude, m");
  thr->add_option("--carrier", o.carrier_hz, "carrier frequency, Hz");
  thr->add_option("--min-elevation", o.min_elevation_deg,
                  "swath edge ground elevation, deg");
  thr->add_option("--tx-power", o.tx_power_w, "vessel transmit power, W");
  thr->add_option("--nadir-ebn0", o.nadir_ebn0_db,
                  "link budget anchor: Eb/N0 of a nadir vessel, dB");
  thr->add_flag("--fixed-arrivals", o.fixed_arrivals,
                "exactly load*slots arrivals instead of Poisson");

  CLI::App* self = app.add_subcommand("selftest", "run the verification oracles");
  add_common(self);
  self->add_option("--dump-packet", o.dump_packet,
                   "write one modulated packet (.csv or raw float64 I/Q)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (per->parsed()) return cmd_per_sweep(o);
    if (two->parsed()) return cmd_two_user(o);
    if (thr->parsed()) return cmd_throughput(o);
    if (self->parsed()) return cmd_selftest(o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
