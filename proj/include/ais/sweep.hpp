// Monte Carlo experiment drivers: single-user PER sweeps, the two-user (P,C)
// grid and the slotted-ALOHA throughput sweep, each with deterministic
// per-trial seeding so results do not depend on the worker count.
#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ais/scenario.hpp"

namespace ais {

struct WilsonInterval {
  double center = 0.0;
  double halfwidth = 0.0;
};
// 95% Wilson score interval for k successes out of n trials.
WilsonInterval wilson95(long k, long n);

// Runs fn(index, worker_id) for index in [0, n) across the given number of
// threads. Scheduling is nondeterministic; callers must write results by
// index and reduce afterwards.
void parallel_for(size_t n, int workers,
                  const std::function<void(size_t, int)>& fn);

struct PerSweepConfig {
  ModulationConfig mod;
  FrameConfig frame;
  DecoderConfig decoder;
  std::vector<double> ebn0_db;  // +inf = noiseless row
  int max_packets = 10000;
  int target_errors = 100;  // stop early once reached; 0 disables
  uint64_t seed = 1;
  int workers = 1;
};

struct PerPoint {
  double ebn0_db = 0;
  long packets = 0;
  long errors = 0;
  double per = 0;
  double ci95 = 0;
  double wall_s = 0;  // reported on stderr, not in the CSV
};

std::vector<PerPoint> per_sweep(const PerSweepConfig& cfg,
                                std::ostream* log = nullptr);
std::string per_sweep_csv(const PerSweepConfig& cfg,
                          const std::vector<PerPoint>& rows);

struct TwoUserSweepConfig {
  ModulationConfig mod;
  FrameConfig frame;
  Detector detector = Detector::coherent;
  int delay_factor = 3;
  bool known_start = true;
  std::vector<std::pair<int, int>> cells = {{1, 1}, {64, 256}, {256, 256}};
  std::vector<double> overlaps = {0.17, 0.83};
  double power_delta_db = -3.0;
  double doppler_delta = 0.0;
  double ebn0_db = 7.0;
  int packets = 1000;
  uint64_t seed = 1;
  int workers = 1;
  // Optional channel override (loaded from a scene config file): exactly two
  // users, [target, interferer]; replaces the generated placement.
  std::vector<UserChannel> scene_override;
};

struct TwoUserPoint {
  int paths = 0;
  int candidates = 0;
  double overlap = 0;
  long packets = 0;
  long errors = 0;
  double per = 0;
  double ci95 = 0;
  double wall_s = 0;
};

std::vector<TwoUserPoint> two_user_sweep(const TwoUserSweepConfig& cfg,
                                         std::ostream* log = nullptr);
std::string two_user_csv(const TwoUserSweepConfig& cfg,
                         const std::vector<TwoUserPoint>& rows);

struct ThroughputCurve {
  std::string name;
  DecoderConfig decoder;
};

struct ThroughputSweepConfig {
  ModulationConfig mod;
  FrameConfig frame;
  OrbitGeometry geom;
  LinkBudget budget;
  std::vector<double> loads = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  int n_slots = 2250;
  int frames = 50;
  bool fixed_arrivals = false;
  std::vector<ThroughputCurve> curves;  // empty = the three default curves
  uint64_t seed = 1;
  int workers = 1;
};

// Coherent VA, coherent PLVA(64,256), differential(K=1) VA.
std::vector<ThroughputCurve> default_throughput_curves();

struct ThroughputPoint {
  std::string detector;
  int paths = 0;
  int candidates = 0;
  double load = 0;
  long frames = 0;
  long slots = 0;
  long sent = 0;
  long decoded = 0;
  double throughput = 0;
  double ci95 = 0;
  double wall_s = 0;
};

std::vector<ThroughputPoint> throughput_sweep(const ThroughputSweepConfig& cfg,
                                              std::ostream* log = nullptr);
std::string throughput_csv(const ThroughputSweepConfig& cfg,
                           const std::vector<ThroughputPoint>& rows);

// Stable number formatting shared by every CSV writer.
std::string fmt_g(double v);
const char* detector_name(const DecoderConfig& d);

}  // namespace ais
