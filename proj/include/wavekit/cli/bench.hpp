#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "wavekit/wave_kernel.hpp"

namespace wavekit::cli {

/// Dense N×N token mixer, y = M·x for token-major x (N×C). Entries are
/// uniform(±1/√N), stored as float to halve memory (1 GiB at N = 16384);
/// accumulation is in double.
class DenseMixer {
 public:
  DenseMixer(std::size_t n, std::uint64_t seed);

  void apply(const std::vector<double>& x, std::size_t channels, std::vector<double>& y) const;
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<float> m_;
};

enum class MixerKind { kWpo, kDense, kHeat };
std::string_view to_string(MixerKind k);
MixerKind mixer_from_string(std::string_view s);  ///< throws std::invalid_argument

struct BenchRecord {
  MixerKind kind = MixerKind::kWpo;
  std::size_t tokens = 0;
  std::size_t channels = 0;
  std::int64_t median_ns = 0;
  std::int64_t min_ns = 0;
  std::size_t repeats = 0;
  double checksum = 0.0;  ///< sum of the last output; keeps the body observable
};

/// Runs `body` warmups + repeats times and records the wall time of the
/// measured calls. body() returns a checksum of its output.
template <typename Body>
BenchRecord time_body(Body&& body, std::size_t warmups, std::size_t repeats) {
  using clock = std::chrono::steady_clock;
  BenchRecord r;
  for (std::size_t i = 0; i < warmups; ++i) r.checksum = body();
  std::vector<std::int64_t> ns;
  for (std::size_t i = 0; i < repeats; ++i) {
    const auto t0 = clock::now();
    r.checksum = body();
    ns.push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0).count());
  }
  std::sort(ns.begin(), ns.end());
  const std::size_t m = ns.size() / 2;
  r.median_ns = ns.size() % 2 ? ns[m] : (ns[m - 1] + ns[m]) / 2;
  r.min_ns = ns.front();
  r.repeats = repeats;
  return r;
}

/// Times one mixer on a √N×√N grid with C channels. N must be a perfect square.
BenchRecord bench_mixer(MixerKind kind, std::size_t tokens, std::size_t channels,
                        std::size_t warmups, std::size_t repeats, std::uint64_t seed,
                        const WaveParams& params);

}  // namespace wavekit::cli
