#include "wavekit/cli/bench.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "wavekit/wpo.hpp"

namespace wavekit::cli {

DenseMixer::DenseMixer(std::size_t n, std::uint64_t seed) : n_(n), m_(n * n) {
  std::mt19937_64 gen(seed);
  const double a = 1.0 / std::sqrt(static_cast<double>(n));
  for (float& v : m_) v = static_cast<float>(a * (2.0 * static_cast<double>(gen() >> 11) * 0x1.0p-53 - 1.0));
}

void DenseMixer::apply(const std::vector<double>& x, std::size_t channels, std::vector<double>& y) const {
  if (x.size() != n_ * channels) throw std::invalid_argument("DenseMixer: input size mismatch");
  y.assign(n_ * channels, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const float* row = &m_[i * n_];
    double* acc = &y[i * channels];
    for (std::size_t j = 0; j < n_; ++j) {
      const double m = row[j];
      const double* xj = &x[j * channels];
      for (std::size_t c = 0; c < channels; ++c) acc[c] += m * xj[c];
    }
  }
}

std::string_view to_string(MixerKind k) {
  switch (k) {
    case MixerKind::kWpo: return "wpo";
    case MixerKind::kDense: return "dense";
    case MixerKind::kHeat: return "heat";
  }
  return "?";
}

MixerKind mixer_from_string(std::string_view s) {
  if (s == "wpo") return MixerKind::kWpo;
  if (s == "dense") return MixerKind::kDense;
  if (s == "heat") return MixerKind::kHeat;
  throw std::invalid_argument("unknown mixer '" + std::string(s) + "' (wpo, dense, heat)");
}

BenchRecord bench_mixer(MixerKind kind, std::size_t tokens, std::size_t channels,
                        std::size_t warmups, std::size_t repeats, std::uint64_t seed,
                        const WaveParams& params) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(tokens))));
  if (side * side != tokens || side < 2) {
    throw std::invalid_argument("bench: token count " + std::to_string(tokens) + " is not a square >= 4");
  }
  if (channels == 0 || repeats == 0) throw std::invalid_argument("bench: channels and repeats must be positive");
  const FeatureField u = random_field(seed, side, side, channels);
  BenchRecord r;
  auto sum = [](std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  switch (kind) {
    case MixerKind::kWpo: {
      const WpoState s{u, random_field(seed + 1, side, side, channels)};
      r = time_body([&] {
        const WpoState out = wpo_forward(s, params);
        return sum(out.u.data()) + sum(out.v.data());
      }, warmups, repeats);
      break;
    }
    case MixerKind::kHeat:
      r = time_body([&] { return sum(heat_forward(u, 1.0, params.time).data()); }, warmups, repeats);
      break;
    case MixerKind::kDense: {
      const DenseMixer mixer(tokens, seed + 2);
      std::vector<double> x(tokens * channels), y;
      for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t t = 0; t < tokens; ++t) x[t * channels + c] = u.data()[c * tokens + t];
      r = time_body([&] {
        mixer.apply(x, channels, y);
        return sum(y);
      }, warmups, repeats);
      break;
    }
  }
  r.kind = kind;
  r.tokens = tokens;
  r.channels = channels;
  return r;
}

}  // namespace wavekit::cli
