#include "wavekit/net/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace wavekit::net {
namespace {

double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

Sample grating(std::size_t label, const SyntheticSpec& spec, std::mt19937_64& gen) {
  const double f = label >= 2 ? spec.high_cycles : spec.low_cycles;
  const bool vertical = label % 2 == 1;
  const double phase = 2.0 * std::numbers::pi * unit(gen);
  const std::size_t n = spec.size;
  FeatureField img(n, n, 1);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const double s = static_cast<double>(vertical ? y : x);
      const double noise = spec.noise * (2.0 * unit(gen) - 1.0);
      img.at(0, y, x) = std::sin(2.0 * std::numbers::pi * f * s / static_cast<double>(n) + phase) + noise;
    }
  return {std::move(img), label};
}

// Fisher-Yates with the top bits of a 64-bit draw; portable across standard libraries.
void shuffle(std::vector<std::size_t>& v, std::mt19937_64& gen) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(unit(gen) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

// Runs fn(i) for i in [0, n) on up to `workers` threads, contiguous chunks.
template <typename F>
void parallel_for(std::size_t n, std::size_t workers, F&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double global_norm(const ModelWeights& g) {
  double s = 0.0;
  for_each_param(g, [&](const ParamRef&, std::span<const double> v) {
    for (double x : v) s += x * x;
  });
  return std::sqrt(s);
}

void freeze_wave_params(ModelWeights& g) {
  for (auto& stage : g.stages)
    for (auto& blk : stage) blk.wpo = {0.0, 0.0, 0.0};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (size < 2) throw std::invalid_argument("synthetic: size must be >= 2");
  if (!(noise >= 0.0)) throw std::invalid_argument("synthetic: noise must be >= 0");
  if (!(low_cycles > 0.0 && high_cycles > low_cycles)) {
    throw std::invalid_argument("synthetic: need 0 < low_cycles < high_cycles");
  }
  if (train_count % kSyntheticClasses != 0 || test_count % kSyntheticClasses != 0) {
    throw std::invalid_argument("synthetic: sample counts must be multiples of 4");
  }
}

Dataset make_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  std::mt19937_64 gen(spec.seed);
  Dataset d;
  for (std::size_t i = 0; i < spec.train_count; ++i) d.train.push_back(grating(i % kSyntheticClasses, spec, gen));
  for (std::size_t i = 0; i < spec.test_count; ++i) d.test.push_back(grating(i % kSyntheticClasses, spec, gen));
  return d;
}

Evaluation evaluate(const std::vector<Sample>& samples, const ModelWeights& w,
                    const ModelConfig& cfg) {
  std::vector<std::size_t> correct(cfg.num_classes, 0), total(cfg.num_classes, 0);
  for (const Sample& s : samples) {
    const auto logits = model_forward(s.image, w, cfg);
    const auto pred = static_cast<std::size_t>(std::max_element(logits.begin(), logits.end()) - logits.begin());
    ++total[s.label];
    if (pred == s.label) ++correct[s.label];
  }
  Evaluation e;
  std::size_t c = 0, t = 0;
  for (std::size_t k = 0; k < cfg.num_classes; ++k) {
    e.class_accuracy.push_back(total[k] ? static_cast<double>(correct[k]) / static_cast<double>(total[k]) : 0.0);
    c += correct[k];
    t += total[k];
  }
  e.accuracy = t ? static_cast<double>(c) / static_cast<double>(t) : 0.0;
  return e;
}

TrainReport sgd_train(const Dataset& data, const ModelConfig& cfg, const TrainOptions& opts) {
  cfg.validate();
  if (opts.batch == 0) throw std::invalid_argument("sgd_train: batch must be positive");
  if (data.train.empty()) throw std::invalid_argument("sgd_train: empty training set");
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  TrainReport report;
  report.weights = init_weights(cfg, opts.seed);
  if (opts.initial_wave) {
    const WpoLayerParams wave = WpoLayerParams::from_physical(*opts.initial_wave);
    for (auto& stage : report.weights.stages)
      for (auto& blk : stage) blk.wpo = wave;
  }
  ModelWeights velocity = zero_weights(cfg);
  std::mt19937_64 order_gen(opts.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= opts.epochs; ++epoch) {
    const auto epoch_start = clock::now();
    shuffle(order, order_gen);
    double loss_sum = 0.0;
    for (std::size_t b0 = 0; b0 < order.size(); b0 += opts.batch) {
      const std::size_t n = std::min(opts.batch, order.size() - b0);
      std::vector<ModelGradient> per(n);
      parallel_for(n, opts.workers, [&](std::size_t i) {
        const Sample& s = data.train[order[b0 + i]];
        per[i] = model_backward(s.image, s.label, report.weights, cfg, 1.0 / static_cast<double>(n));
      });
      ModelWeights grad = std::move(per[0].grads);
      loss_sum += per[0].loss * static_cast<double>(n);
      for (std::size_t i = 1; i < n; ++i) {
        axpy(grad, 1.0, per[i].grads);
        loss_sum += per[i].loss * static_cast<double>(n);
      }
      if (!opts.train_wave_params) freeze_wave_params(grad);
      if (opts.clip_norm > 0.0) {
        const double norm = global_norm(grad);
        if (norm > opts.clip_norm) axpy(grad, opts.clip_norm / norm - 1.0, grad);
      }
      // v ← μv + g;  w ← w − lr·v
      axpy(velocity, opts.momentum - 1.0, velocity);
      axpy(velocity, 1.0, grad);
      axpy(report.weights, -opts.lr, velocity);
    }
    EpochStats st;
    st.epoch = epoch;
    st.train_loss = loss_sum / static_cast<double>(order.size());
    if (!std::isfinite(st.train_loss)) {
      throw std::runtime_error("sgd_train: non-finite loss in epoch " + std::to_string(epoch));
    }
    st.test = evaluate(data.test, report.weights, cfg);
    st.seconds = std::chrono::duration<double>(clock::now() - epoch_start).count();
    report.epochs.push_back(st);
    if (opts.on_epoch) opts.on_epoch(st);
    const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (opts.time_budget_seconds > 0.0 && elapsed >= opts.time_budget_seconds) break;
  }
  report.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return report;
}

}  // namespace wavekit::net
