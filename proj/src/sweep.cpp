#include "ais/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

namespace ais {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

uint64_t point_stream(uint64_t seed, uint64_t tag, uint64_t index) {
  return splitmix64(seed ^ splitmix64((tag << 32) ^ (index + 1)));
}

// One single-user AWGN packet trial: random payload and carrier phase, AWGN
// at the requested Eb/N0, decode, compare payloads exactly.
bool single_user_trial_ok(uint64_t trial_stream, double ebn0_db, bool noiseless,
                          const ModulationConfig& mod, const FrameConfig& fc,
                          PacketDecoder& decoder) {
  Rng rng(trial_stream);
  const Bits payload = random_payload(rng);
  const Packet pkt = build_packet(payload, fc);
  const Waveform wf =
      modulate(nrzi_encode(pkt.bits, fc.nrzi_initial_level), mod,
               decoder.pulse());

  SlotScene scene;
  UserChannel ch;
  ch.phase = kTwoPi * rng.uniform();
  scene.users.emplace_back(wf, ch);
  scene.span_begin = 0.0;
  scene.span_end = fc.slot_bits() * mod.ts;

  Waveform rx = superpose(scene);
  if (!noiseless) add_awgn_n0(rx, n0_from_ebn0(ebn0_db, mod.es), rng);

  const DecodeResult res = decoder.decode(rx, ch);
  return res.payload && *res.payload == payload;
}

}  // namespace

WilsonInterval wilson95(long k, long n) {
  WilsonInterval w;
  if (n <= 0) return w;
  const double z = 1.959963984540054;
  const double p = double(k) / n;
  const double z2n = z * z / n;
  const double denom = 1.0 + z2n;
  w.center = (p + 0.5 * z2n) / denom;
  w.halfwidth = (z / denom) * std::sqrt(p * (1.0 - p) / n + 0.25 * z2n / n);
  return w;
}

void parallel_for(size_t n, int workers,
                  const std::function<void(size_t, int)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i, 0);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int used = std::min<size_t>(workers, n);
  pool.reserve(used);
  for (int w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
        fn(i, w);
    });
  }
  for (auto& t : pool) t.join();
}

std::string fmt_g(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

const char* detector_name(const DecoderConfig& d) {
  return d.detector == Detector::coherent ? "coherent" : "differential";
}

std::vector<PerPoint> per_sweep(const PerSweepConfig& cfg, std::ostream* log) {
  std::vector<PerPoint> rows;
  const int workers = std::max(1, cfg.workers);

  for (size_t pi = 0; pi < cfg.ebn0_db.size(); ++pi) {
    const double ebn0 = cfg.ebn0_db[pi];
    const bool noiseless = std::isinf(ebn0) && ebn0 > 0;
    const double t0 = now_s();

    std::vector<PacketDecoder> decoders;
    decoders.reserve(workers);
    for (int w = 0; w < workers; ++w)
      decoders.emplace_back(cfg.mod, cfg.frame, cfg.decoder);

    const uint64_t stream = point_stream(cfg.seed, 0xa15, pi);
    std::vector<uint8_t> err(cfg.max_packets, 0);

    // Fixed evaluation chunks keep the early-stop decision identical for any
    // worker count.
    const int chunk = 512;
    long done = 0, used = 0, errors = 0;
    bool stopped = false;
    while (done < cfg.max_packets && !stopped) {
      const long m = std::min<long>(chunk, cfg.max_packets - done);
      parallel_for(size_t(m), workers, [&](size_t k, int w) {
        const uint64_t ts = trial_seed(stream, uint64_t(done + k));
        err[done + k] = !single_user_trial_ok(ts, ebn0, noiseless, cfg.mod,
                                              cfg.frame, decoders[w]);
      });
      for (long k = done; k < done + m; ++k) {
        errors += err[k];
        ++used;
        if (cfg.target_errors > 0 && errors >= cfg.target_errors) {
          stopped = true;
          break;
        }
      }
      done += m;
    }

    PerPoint row;
    row.ebn0_db = ebn0;
    row.packets = used;
    row.errors = errors;
    row.per = used ? double(errors) / used : 0.0;
    row.ci95 = wilson95(errors, used).halfwidth;
    row.wall_s = now_s() - t0;
    rows.push_back(row);
    if (log)
      *log << "per-sweep ebn0=" << fmt_g(ebn0) << " packets=" << used
           << " errors=" << errors << " per=" << fmt_g(row.per)
           << " wall=" << fmt_g(row.wall_s) << "s\n";
  }
  return rows;
}

std::string per_sweep_csv(const PerSweepConfig& cfg,
                          const std::vector<PerPoint>& rows) {
  std::ostringstream os;
  os << "detector,paths,candidates,ebn0_db,packets,errors,per,"
        "wilson95_halfwidth\n";
  for (const auto& r : rows) {
    os << detector_name(cfg.decoder) << ',' << cfg.decoder.list.paths << ','
       << cfg.decoder.list.candidates << ',' << fmt_g(r.ebn0_db) << ','
       << r.packets << ',' << r.errors << ',' << fmt_g(r.per) << ','
       << fmt_g(r.ci95) << '\n';
  }
  return os.str();
}

std::vector<TwoUserPoint> two_user_sweep(const TwoUserSweepConfig& cfg,
                                         std::ostream* log) {
  std::vector<TwoUserPoint> rows;
  const int workers = std::max(1, cfg.workers);
  const PhasePulse pulse = make_phase_pulse(cfg.mod);

  for (size_t oi = 0; oi < cfg.overlaps.size(); ++oi) {
    for (size_t ci = 0; ci < cfg.cells.size(); ++ci) {
      const auto [paths, cands] = cfg.cells[ci];
      const double t0 = now_s();

      DecoderConfig dc;
      dc.detector = cfg.detector;
      dc.delay_factor = cfg.delay_factor;
      dc.known_start = cfg.known_start;
      dc.list = {paths, cands};
      std::vector<PacketDecoder> decoders;
      decoders.reserve(workers);
      for (int w = 0; w < workers; ++w)
        decoders.emplace_back(cfg.mod, cfg.frame, dc);

      TwoUserScenario sc;
      sc.power_delta_db = cfg.power_delta_db;
      sc.overlap_fraction = cfg.overlaps[oi];
      sc.doppler_delta = cfg.doppler_delta;

      // The trial stream depends on the overlap but not on (P,C): every cell
      // sees the same scenes and noise, which keeps nested lists comparable.
      const uint64_t stream = point_stream(cfg.seed, 0x705e, oi);
      std::vector<uint8_t> err(cfg.packets, 0);
      parallel_for(size_t(cfg.packets), workers, [&](size_t k, int w) {
        Rng rng(trial_seed(stream, k));
        TwoUserTruth truth;
        SlotScene scene = cfg.scene_override.empty()
                              ? make_two_user_scene(sc, cfg.mod, pulse,
                                                    cfg.frame, rng, &truth)
                              : SlotScene{};
        if (!cfg.scene_override.empty()) {
          // Override path: same payload draw, caller-provided channels.
          const Bits p_t = random_payload(rng);
          const Bits p_i = random_payload(rng);
          const Packet pk_t = build_packet(p_t, cfg.frame);
          const Packet pk_i = build_packet(p_i, cfg.frame);
          scene.users.emplace_back(
              modulate(nrzi_encode(pk_t.bits, cfg.frame.nrzi_initial_level),
                       cfg.mod, pulse),
              cfg.scene_override[0]);
          scene.users.emplace_back(
              modulate(nrzi_encode(pk_i.bits, cfg.frame.nrzi_initial_level),
                       cfg.mod, pulse),
              cfg.scene_override[1]);
          scene.span_begin = 0.0;
          scene.span_end = cfg.frame.slot_bits() * cfg.mod.ts * 1.5;
          truth.target_payload = p_t;
          truth.target = cfg.scene_override[0];
        }
        Waveform rx = superpose(scene);
        const double eb =
            truth.target.attenuation * truth.target.attenuation * cfg.mod.es;
        add_awgn_n0(rx, n0_from_ebn0(cfg.ebn0_db, eb), rng);
        const DecodeResult res = decoders[w].decode(rx, truth.target);
        err[k] = !(res.payload && *res.payload == truth.target_payload);
      });

      TwoUserPoint row;
      row.paths = paths;
      row.candidates = cands;
      row.overlap = cfg.overlaps[oi];
      row.packets = cfg.packets;
      for (uint8_t e : err) row.errors += e;
      row.per = row.packets ? double(row.errors) / row.packets : 0.0;
      row.ci95 = wilson95(row.errors, row.packets).halfwidth;
      row.wall_s = now_s() - t0;
      rows.push_back(row);
      if (log)
        *log << "two-user overlap=" << fmt_g(row.overlap) << " P=" << paths
             << " C=" << cands << " per=" << fmt_g(row.per)
             << " wall=" << fmt_g(row.wall_s) << "s\n";
    }
  }
  return rows;
}

std::string two_user_csv(const TwoUserSweepConfig& cfg,
                         const std::vector<TwoUserPoint>& rows) {
  std::ostringstream os;
  os << "detector,paths,candidates,overlap,power_delta_db,ebn0_db,packets,"
        "errors,per,wilson95_halfwidth\n";
  DecoderConfig dc;
  dc.detector = cfg.detector;
  for (const auto& r : rows) {
    os << detector_name(dc) << ',' << r.paths << ',' << r.candidates << ','
       << fmt_g(r.overlap) << ',' << fmt_g(cfg.power_delta_db) << ','
       << fmt_g(cfg.ebn0_db) << ',' << r.packets << ',' << r.errors << ','
       << fmt_g(r.per) << ',' << fmt_g(r.ci95) << '\n';
  }
  return os.str();
}

std::vector<ThroughputCurve> default_throughput_curves() {
  std::vector<ThroughputCurve> out(3);
  out[0].name = "coherent_va";
  out[0].decoder.detector = Detector::coherent;
  out[0].decoder.list = {1, 1};
  out[1].name = "coherent_plva";
  out[1].decoder.detector = Detector::coherent;
  out[1].decoder.list = {64, 256};
  out[2].name = "differential_k1_va";
  out[2].decoder.detector = Detector::differential;
  out[2].decoder.delay_factor = 1;
  out[2].decoder.list = {1, 1};
  return out;
}

std::vector<ThroughputPoint> throughput_sweep(const ThroughputSweepConfig& cfg,
                                              std::ostream* log) {
  std::vector<ThroughputPoint> rows;
  const int workers = std::max(1, cfg.workers);
  const std::vector<ThroughputCurve> curves =
      cfg.curves.empty() ? default_throughput_curves() : cfg.curves;

  for (const ThroughputCurve& curve : curves) {
    std::vector<PacketDecoder> decoders;
    decoders.reserve(workers);
    for (int w = 0; w < workers; ++w)
      decoders.emplace_back(cfg.mod, cfg.frame, curve.decoder);

    for (size_t li = 0; li < cfg.loads.size(); ++li) {
      const double t0 = now_s();
      LoadPoint load;
      load.offered_load = cfg.loads[li];
      load.n_slots = cfg.n_slots;
      load.n_frames = cfg.frames;
      load.fixed_arrivals = cfg.fixed_arrivals;

      // Frames are shared across curves: the stream depends on the load index
      // only, so every detector sees the same traffic and noise.
      const uint64_t stream = point_stream(cfg.seed, 0x10ad, li);
      std::vector<FrameScore> scores(cfg.frames);
      parallel_for(size_t(cfg.frames), workers, [&](size_t f, int w) {
        const uint64_t frame_seed = trial_seed(stream, f);
        Rng rng(frame_seed);
        const AlohaFrame frame =
            run_aloha_frame(load, cfg.geom, cfg.budget, rng);
        scores[f] = score_frame(frame, load, cfg.geom, cfg.budget, cfg.frame,
                                decoders[w], splitmix64(frame_seed));
      });

      ThroughputPoint row;
      row.detector = curve.name;
      row.paths = curve.decoder.list.paths;
      row.candidates = curve.decoder.list.candidates;
      row.load = cfg.loads[li];
      row.frames = cfg.frames;
      for (const FrameScore& s : scores) {
        row.slots += s.slots;
        row.sent += s.sent;
        row.decoded += s.decoded;
      }
      row.throughput = row.slots ? double(row.decoded) / row.slots : 0.0;
      row.ci95 = wilson95(row.decoded, row.slots).halfwidth;
      row.wall_s = now_s() - t0;
      rows.push_back(row);
      if (log)
        *log << "throughput " << curve.name << " load=" << fmt_g(row.load)
             << " decoded=" << row.decoded << "/" << row.sent
             << " thr=" << fmt_g(row.throughput) << " wall=" << fmt_g(row.wall_s)
             << "s\n";
    }
  }
  return rows;
}

std::string throughput_csv(const ThroughputSweepConfig&,
                           const std::vector<ThroughputPoint>& rows) {
  std::ostringstream os;
  os << "detector,paths,candidates,offered_load,frames,slots,sent,decoded,"
        "throughput,wilson95_halfwidth\n";
  for (const auto& r : rows) {
    os << r.detector << ',' << r.paths << ',' << r.candidates << ','
       << fmt_g(r.load) << ',' << r.frames << ',' << r.slots << ',' << r.sent
       << ',' << r.decoded << ',' << fmt_g(r.throughput) << ','
       << fmt_g(r.ci95) << '\n';
  }
  return os.str();
}

}  // namespace ais
