#include "wavekit/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>

#include "wavekit/cli/bench.hpp"
#include "wavekit/cli/csv.hpp"
#include "wavekit/cli/pgm.hpp"
#include "wavekit/json_reader.hpp"
#include "wavekit/net/train.hpp"
#include "wavekit/net/weights_io.hpp"
#include "wavekit/pde_oracle.hpp"
#include "wavekit/tensor_io.hpp"
#include "wavekit/wpo.hpp"

namespace wavekit::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Summary printer that tolerates a null stream.
class Log {
 public:
  explicit Log(std::ostream* os) : os_(os) {}
  template <typename... Args>
  void line(const Args&... args) const {
    if (os_ == nullptr) return;
    (*os_ << ... << args) << '\n';
  }

 private:
  std::ostream* os_;
};

std::uint64_t read_seed(JsonReader& r, const RunContext& ctx) {
  std::uint64_t seed = 0;
  r.get("seed", seed);
  return ctx.seed.value_or(seed);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::string yes_no(bool b) { return b ? "pass" : "fail"; }

fs::path prepare_out(const RunContext& ctx) {
  fs::create_directories(ctx.out_dir);
  return ctx.out_dir;
}

std::size_t steps_for(double t, double dt) {
  require(dt > 0.0, "dt must be > 0");
  return static_cast<std::size_t>(std::llround(t / dt));
}

// ---------------------------------------------------------------- verify-oracle

struct OracleConfig {
  std::size_t grid = 32;
  std::size_t channels = 4;
  std::size_t dirichlet_grid = 16;
  double velocity = 1.0;
  double damping = 0.1;
  double time = 0.5;
  double dt = 2e-3;
  double band_keep = 2.0 / 3.0;
  double smooth_keep = 0.125;
  double tolerance = 1e-3;
  double identity_tolerance = 1e-10;
  double energy_tolerance = 1e-9;
  std::vector<double> convergence_dts{0.05, 0.025, 0.0125, 0.00625};
  double slope_min = 1.7;
  double slope_max = 2.3;
  std::uint64_t seed = 0;

  json to_json() const {
    return {{"grid", grid}, {"channels", channels}, {"dirichlet_grid", dirichlet_grid},
            {"velocity", velocity}, {"damping", damping}, {"time", time}, {"dt", dt},
            {"band_keep", band_keep}, {"smooth_keep", smooth_keep}, {"tolerance", tolerance},
            {"identity_tolerance", identity_tolerance}, {"energy_tolerance", energy_tolerance},
            {"convergence_dts", convergence_dts}, {"slope_min", slope_min},
            {"slope_max", slope_max}, {"seed", seed}};
  }
};

OracleConfig parse_oracle(const json& j, const RunContext& ctx) {
  OracleConfig c;
  JsonReader r(j, "verify-oracle");
  r.get("grid", c.grid);
  r.get("channels", c.channels);
  r.get("dirichlet_grid", c.dirichlet_grid);
  r.get("velocity", c.velocity);
  r.get("damping", c.damping);
  r.get("time", c.time);
  r.get("dt", c.dt);
  r.get("band_keep", c.band_keep);
  r.get("smooth_keep", c.smooth_keep);
  r.get("tolerance", c.tolerance);
  r.get("identity_tolerance", c.identity_tolerance);
  r.get("energy_tolerance", c.energy_tolerance);
  r.get("convergence_dts", c.convergence_dts);
  r.get("slope_min", c.slope_min);
  r.get("slope_max", c.slope_max);
  c.seed = read_seed(r, ctx);
  r.finish();
  require(c.grid >= 4 && c.dirichlet_grid >= 2 && c.channels >= 1, "verify-oracle: grid sizes too small");
  require(c.band_keep > 0 && c.band_keep <= 1 && c.smooth_keep > 0 && c.smooth_keep <= 1,
          "verify-oracle: keep fractions must be in (0, 1]");
  require(c.convergence_dts.size() >= 2, "verify-oracle: convergence_dts needs at least 2 entries");
  WaveParams{c.velocity, c.damping, c.time}.validate();
  return c;
}

struct OracleCase {
  std::string name;
  std::string grid;
  WaveParams params;
  std::string metric;
  double value = 0.0;
  std::string tolerance;
  bool pass = false;
};

int cmd_verify_oracle(const json& j, const RunContext& ctx) {
  const OracleConfig c = parse_oracle(j, ctx);
  const Log log(ctx.log);
  const WaveParams p{c.velocity, c.damping, c.time};
  FdConfig fd;
  fd.dt = c.dt;
  fd.steps = steps_for(c.time, c.dt);
  const std::string g = std::to_string(c.grid) + "x" + std::to_string(c.grid) + "x" + std::to_string(c.channels);
  std::vector<OracleCase> cases;
  auto below = [&](const std::string& name, const std::string& grid, const WaveParams& q,
                   const std::string& metric, double value, double tol) {
    cases.push_back({name, grid, q, metric, value, "<" + fmt(tol), value < tol});
  };

  const FeatureField u0 = band_limit(random_field(c.seed, c.grid, c.grid, c.channels), c.band_keep);
  const FeatureField v0 = band_limit(random_field(c.seed + 1, c.grid, c.grid, c.channels), c.band_keep);
  const WaveSolution ref = fd_wave_solve(u0, v0, p, fd);
  const WpoState five = wpo_forward({u0, v0}, p, {LaplacianSymbol::kFivePoint});
  below("periodic_u", g, p, "rel_l2", rel_l2(five.u, ref.u), c.tolerance);
  below("periodic_v", g, p, "rel_l2", rel_l2(five.v, ref.v), c.tolerance);

  const FeatureField smooth = band_limit(random_field(c.seed + 2, c.grid, c.grid, c.channels), c.smooth_keep);
  const FeatureField zero(smooth.dims());
  below("periodic_smooth_continuous", g, p, "rel_l2",
        rel_l2(wpo_forward({smooth, zero}, p).u, fd_wave_solve(smooth, zero, p, fd).u), c.tolerance);

  const std::size_t n = c.dirichlet_grid;
  const FeatureField d0 = random_field(c.seed + 3, n, n, 1);
  FdConfig dfd = fd;
  dfd.boundary = Boundary::kDirichlet;
  below("dirichlet_modal", std::to_string(n) + "x" + std::to_string(n) + "x1", p, "rel_l2",
        rel_l2(modal_solution(d0, FeatureField(d0.dims()), p, LaplacianSymbol::kFivePoint),
               fd_wave_solve(d0, FeatureField(d0.dims()), p, dfd).u),
        c.tolerance);

  double id_err = 0.0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const WpoState s{random_field(c.seed + 10 + 2 * k, c.grid, c.grid, c.channels),
                     random_field(c.seed + 11 + 2 * k, c.grid, c.grid, c.channels)};
    const WpoState o = wpo_forward(s, {c.velocity, c.damping, 0.0});
    id_err = std::max({id_err, max_abs_diff(o.u, s.u), max_abs_diff(o.v, s.v)});
  }
  below("identity_t0", g, {c.velocity, c.damping, 0.0}, "max_abs", id_err, c.identity_tolerance);

  const WpoState e_state{u0, v0};
  const double e0 = modal_energy(e_state, {c.velocity, 0.0, 0.0});
  double drift = 0.0, rise = 0.0, prev = modal_energy(e_state, p);
  for (int k = 1; k <= 20; ++k) {
    const WaveParams q0{c.velocity, 0.0, 0.1 * k};
    drift = std::max(drift, std::abs(modal_energy(wpo_forward(e_state, q0), q0) - e0) / e0);
    const WaveParams q{c.velocity, c.damping, 0.1 * k};
    const double e = modal_energy(wpo_forward(e_state, q), q);
    rise = std::max(rise, (e - prev) / e0);
    prev = e;
  }
  below("energy_alpha0", g, {c.velocity, 0.0, 2.0}, "max_rel_drift", drift, c.energy_tolerance);
  cases.push_back({"energy_damped", g, {c.velocity, c.damping, 2.0}, "max_rel_increase", rise,
                   "<=1e-12", rise <= 1e-12});

  const ConvergenceStudy study = convergence_study(u0, v0, p, c.convergence_dts);
  const bool slope_ok = study.slope >= c.slope_min && study.slope <= c.slope_max;
  cases.push_back({"convergence_slope", g, p, "loglog_slope", study.slope,
                   "[" + fmt(c.slope_min) + ";" + fmt(c.slope_max) + "]", slope_ok});

  const fs::path out = prepare_out(ctx);
  CsvWriter csv(out / "verify_oracle.csv", "verify-oracle", c.to_json(), c.seed,
                {"case", "grid", "velocity", "damping", "time", "metric", "value", "tolerance", "pass"});
  bool all = true;
  for (const auto& k : cases) {
    csv.row({k.name, k.grid, fmt(k.params.velocity), fmt(k.params.damping), fmt(k.params.time),
             k.metric, fmt(k.value), k.tolerance, yes_no(k.pass)});
    log.line(k.pass ? "[pass] " : "[FAIL] ", k.name, ": ", k.metric, " = ", fmt(k.value), " (", k.tolerance, ")");
    all = all && k.pass;
  }
  CsvWriter conv(out / "convergence.csv", "verify-oracle", c.to_json(), c.seed, {"dt", "steps", "rel_l2"});
  for (const auto& row : study.rows) conv.row({fmt(row.dt), std::to_string(row.steps), fmt(row.rel_l2)});
  return all ? kExitOk : kExitTolerance;
}

// ------------------------------------------------------------- spectral-compare

int cmd_spectral_compare(const json& j, const RunContext& ctx) {
  double velocity = 1.0, damping = 0.1, conductivity = 1.0, omega_max = std::numbers::pi;
  std::vector<double> times{0.5, 1.0, 2.0};
  std::size_t points = 33;
  JsonReader r(j, "spectral-compare");
  r.get("velocity", velocity);
  r.get("damping", damping);
  r.get("conductivity", conductivity);
  r.get("times", times);
  r.get("omega_max", omega_max);
  r.get("points", points);
  const std::uint64_t seed = read_seed(r, ctx);
  r.finish();
  require(points >= 2 && omega_max > 0.0 && !times.empty(), "spectral-compare: need points >= 2, omega_max > 0, times");
  require(conductivity >= 0.0 && std::isfinite(conductivity), "spectral-compare: conductivity must be >= 0");
  for (double t : times) WaveParams{velocity, damping, t}.validate();
  const json resolved = {{"velocity", velocity}, {"damping", damping}, {"conductivity", conductivity},
                         {"times", times}, {"omega_max", omega_max}, {"points", points}, {"seed", seed}};
  const Log log(ctx.log);
  CsvWriter csv(prepare_out(ctx) / "spectral_compare.csv", "spectral-compare", resolved, seed,
                {"time", "omega", "omega_sq", "regime", "wave_gain", "heat_gain", "ratio", "wave_envelope"});
  bool ok = true;
  for (double t : times) {
    for (std::size_t i = 0; i < points; ++i) {
      const double w = omega_max * static_cast<double>(i) / static_cast<double>(points - 1);
      const SpectralRetention s = spectral_retention({velocity, damping, t}, conductivity, w * w);
      csv.row({fmt(t), fmt(w), fmt(w * w), std::string(to_string(s.regime)), fmt(s.wave_gain),
               fmt(s.heat_gain), fmt(s.ratio), fmt(s.wave_envelope)});
      ok = ok && std::isfinite(s.wave_gain) && std::isfinite(s.heat_gain) && std::isfinite(s.ratio);
      if (i == 0) ok = ok && std::abs(s.wave_gain - 1.0) < 1e-12 && std::abs(s.heat_gain - 1.0) < 1e-12;
    }
    const SpectralRetention pi = spectral_retention({velocity, damping, t}, conductivity, std::numbers::pi * std::numbers::pi);
    log.line("t=", fmt(t), " |w|^2=pi^2: wave_gain=", fmt(pi.wave_gain), " envelope=", fmt(pi.wave_envelope),
             " heat_gain=", fmt(pi.heat_gain), " envelope/heat=", fmt(pi.wave_envelope / pi.heat_gain));
  }
  if (!ok) log.line("[FAIL] non-finite gain or DC gain != 1");
  return ok ? kExitOk : kExitTolerance;
}

// ------------------------------------------------------- shared training config

struct TrainSetup {
  net::ModelConfig model;
  net::SyntheticSpec data;
  net::TrainOptions opts;
  json model_json;
  json data_json;
};

// Reads "model", "data" and the optimizer keys into `s`.
void read_training(JsonReader& r, TrainSetup& s, std::size_t default_epochs) {
  s.opts.epochs = default_epochs;
  if (const json* m = r.child("model")) s.model = net::config_from_json(*m);
  if (const json* d = r.child("data")) {
    JsonReader dr(*d, "data");
    dr.get("size", s.data.size);
    dr.get("low_cycles", s.data.low_cycles);
    dr.get("high_cycles", s.data.high_cycles);
    dr.get("noise", s.data.noise);
    dr.get("train_count", s.data.train_count);
    dr.get("test_count", s.data.test_count);
    dr.finish();
  }
  if (!r.has("model")) {
    s.model.input_height = s.data.size;
    s.model.input_width = s.data.size;
  }
  r.get("epochs", s.opts.epochs);
  r.get("lr", s.opts.lr);
  r.get("momentum", s.opts.momentum);
  r.get("batch", s.opts.batch);
  r.get("clip_norm", s.opts.clip_norm);
  r.get("time_budget_seconds", s.opts.time_budget_seconds);
  s.data.validate();
  s.model.validate();
  require(s.model.input_height == s.data.size && s.model.input_width == s.data.size &&
              s.model.input_channels == 1,
          "model input must be " + std::to_string(s.data.size) + "x" + std::to_string(s.data.size) + "x1 to match data");
  require(s.model.num_classes == net::kSyntheticClasses, "model.num_classes must be 4");
  require(s.opts.epochs >= 1 && s.opts.batch >= 1, "epochs and batch must be >= 1");
  require(s.opts.lr > 0.0 && s.opts.momentum >= 0.0 && s.opts.momentum < 1.0 && s.opts.clip_norm >= 0.0,
          "need lr > 0, 0 <= momentum < 1, clip_norm >= 0");
  s.model_json = net::config_to_json(s.model);
  s.data_json = {{"size", s.data.size}, {"low_cycles", s.data.low_cycles}, {"high_cycles", s.data.high_cycles},
                 {"noise", s.data.noise}, {"train_count", s.data.train_count}, {"test_count", s.data.test_count}};
}

json training_json(const TrainSetup& s) {
  return {{"model", s.model_json}, {"data", s.data_json}, {"epochs", s.opts.epochs}, {"lr", s.opts.lr},
          {"momentum", s.opts.momentum}, {"batch", s.opts.batch}, {"clip_norm", s.opts.clip_norm},
          {"time_budget_seconds", s.opts.time_budget_seconds}};
}

std::vector<std::string> class_cells(const net::Evaluation& e) {
  std::vector<std::string> out;
  for (double a : e.class_accuracy) out.push_back(fmt(a));
  return out;
}

double high_freq_accuracy(const net::Evaluation& e) { return 0.5 * (e.class_accuracy[2] + e.class_accuracy[3]); }

// -------------------------------------------------------------------- ablation

int cmd_ablation(const json& j, const RunContext& ctx) {
  TrainSetup s;
  std::vector<double> velocities{0.1, 1.0, 10.0, 100.0}, dampings{0.01, 0.1, 1.0, 10.0};
  double time = 1.0;
  std::size_t grid = 8;
  bool train = true;
  JsonReader r(j, "ablation");
  r.get("velocities", velocities);
  r.get("dampings", dampings);
  r.get("time", time);
  r.get("grid", grid);
  r.get("train", train);
  read_training(r, s, 5);
  const std::uint64_t seed = read_seed(r, ctx);
  r.finish();
  require(!velocities.empty() && !dampings.empty() && grid >= 1, "ablation: empty sweep");
  require(!s.model.heat_baseline, "ablation: sweeps wave parameters, model.heat_baseline must be false");
  for (double v : velocities)
    for (double a : dampings) WaveParams{v, a, time}.validate();
  json resolved = training_json(s);
  resolved.update({{"velocities", velocities}, {"dampings", dampings}, {"time", time}, {"grid", grid},
                   {"train", train}, {"seed", seed}});

  const Log log(ctx.log);
  const FrequencyGrid fg = frequency_grid(grid, grid, Boundary::kPeriodic);
  net::Dataset data;
  if (train) {
    net::SyntheticSpec spec = s.data;
    spec.seed = seed;
    data = net::make_synthetic(spec);
  }
  CsvWriter csv(prepare_out(ctx) / "ablation.csv", "ablation", resolved, seed,
                {"velocity", "damping", "overdamped_bins", "total_bins", "overdamped_fraction", "test_accuracy",
                 "acc_low_0", "acc_low_90", "acc_high_0", "acc_high_90", "final_train_loss", "seconds"});
  for (double v : velocities) {
    for (double a : dampings) {
      std::size_t over = 0;
      const double gamma_sq = 0.25 * a * a;
      for (std::size_t y = 0; y < grid; ++y)
        for (std::size_t x = 0; x < grid; ++x) over += v * v * fg.spatial_sq(y, x) <= gamma_sq;
      const double frac = static_cast<double>(over) / static_cast<double>(grid * grid);
      std::vector<std::string> row{fmt(v), fmt(a), std::to_string(over), std::to_string(grid * grid), fmt(frac)};
      if (train) {
        net::TrainOptions opts = s.opts;
        opts.seed = seed;
        opts.workers = ctx.workers;
        opts.train_wave_params = false;
        opts.initial_wave = WaveParams{v, a, time};
        const net::TrainReport rep = net::sgd_train(data, s.model, opts);
        const net::EpochStats& last = rep.epochs.back();
        row.push_back(fmt(last.test.accuracy));
        for (const auto& cell : class_cells(last.test)) row.push_back(cell);
        row.push_back(fmt(last.train_loss));
        row.push_back(fmt(rep.seconds));
        log.line("v=", fmt(v), " alpha=", fmt(a), " overdamped=", over, "/", grid * grid,
                 " test_acc=", fmt(last.test.accuracy));
      } else {
        row.insert(row.end(), 7, "");
        log.line("v=", fmt(v), " alpha=", fmt(a), " overdamped=", over, "/", grid * grid);
      }
      csv.row(row);
    }
  }
  return kExitOk;
}

// ----------------------------------------------------------------------- bench

struct SlopeBound {
  double lo = 0.0;
  double hi = 0.0;
};

int cmd_bench(const json& j, const RunContext& ctx) {
  std::vector<std::size_t> sizes{256, 1024, 4096, 16384};
  std::vector<std::string> mixers{"wpo", "dense", "heat"};
  std::size_t channels = 16, repeats = 10, warmups = 3, speedup_at = 4096;
  double velocity = 1.0, damping = 0.1, time = 1.0, min_speedup = 5.0;
  std::vector<double> wpo_slope{0.9, 1.4}, dense_slope{1.8, 2.2};
  JsonReader r(j, "bench");
  r.get("sizes", sizes);
  r.get("mixers", mixers);
  r.get("channels", channels);
  r.get("repeats", repeats);
  r.get("warmups", warmups);
  r.get("velocity", velocity);
  r.get("damping", damping);
  r.get("time", time);
  r.get("wpo_slope", wpo_slope);
  r.get("dense_slope", dense_slope);
  r.get("min_speedup", min_speedup);
  r.get("speedup_at", speedup_at);
  const std::uint64_t seed = read_seed(r, ctx);
  r.finish();
  require(sizes.size() >= 2, "bench: need at least two sizes for a slope");
  require(repeats >= 10, "bench: repeats must be >= 10");
  require(wpo_slope.size() == 2 && dense_slope.size() == 2, "bench: slope bounds are [lo, hi] pairs");
  require(channels >= 1, "bench: channels must be >= 1");
  std::vector<MixerKind> kinds;
  for (const auto& m : mixers) kinds.push_back(mixer_from_string(m));
  for (std::size_t n : sizes) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    require(side * side == n && side >= 2, "bench: size " + std::to_string(n) + " is not a square >= 4");
  }
  const WaveParams params{velocity, damping, time};
  params.validate();
  const json resolved = {{"sizes", sizes}, {"mixers", mixers}, {"channels", channels}, {"repeats", repeats},
                         {"warmups", warmups}, {"velocity", velocity}, {"damping", damping}, {"time", time},
                         {"wpo_slope", wpo_slope}, {"dense_slope", dense_slope}, {"min_speedup", min_speedup},
                         {"speedup_at", speedup_at}, {"seed", seed}};
  const Log log(ctx.log);
  const fs::path out = prepare_out(ctx);
  CsvWriter csv(out / "bench.csv", "bench", resolved, seed,
                {"mixer", "tokens", "channels", "median_ns", "min_ns", "repeats", "checksum"});
  std::vector<std::vector<BenchRecord>> records(kinds.size());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    for (std::size_t n : sizes) {
      const BenchRecord b = bench_mixer(kinds[k], n, channels, warmups, repeats, seed, params);
      csv.row({std::string(to_string(b.kind)), std::to_string(b.tokens), std::to_string(b.channels),
               std::to_string(b.median_ns), std::to_string(b.min_ns), std::to_string(b.repeats), fmt(b.checksum)});
      log.line(to_string(b.kind), " N=", n, " median ", fmt(static_cast<double>(b.median_ns) * 1e-6), " ms");
      records[k].push_back(b);
    }
  }

  CsvWriter fit(out / "bench_fit.csv", "bench", resolved, seed, {"metric", "value", "lower", "upper", "status"});
  bool ok = true;
  std::vector<double> xs(sizes.begin(), sizes.end());
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::vector<double> ys;
    for (const auto& b : records[k]) ys.push_back(static_cast<double>(b.median_ns));
    const double slope = loglog_slope(xs, ys);
    std::optional<SlopeBound> bound;
    if (kinds[k] == MixerKind::kWpo) bound = SlopeBound{wpo_slope[0], wpo_slope[1]};
    if (kinds[k] == MixerKind::kDense) bound = SlopeBound{dense_slope[0], dense_slope[1]};
    std::string status = "info";
    if (bound) {
      const bool pass = slope >= bound->lo && slope <= bound->hi;
      status = yes_no(pass);
      ok = ok && pass;
    }
    fit.row({"slope_" + std::string(to_string(kinds[k])), fmt(slope), bound ? fmt(bound->lo) : "",
             bound ? fmt(bound->hi) : "", status});
    log.line("[", status, "] ", to_string(kinds[k]), " log-log slope ", fmt(slope));
  }
  const auto find = [&](MixerKind kind) -> const BenchRecord* {
    for (std::size_t k = 0; k < kinds.size(); ++k)
      if (kinds[k] == kind)
        for (const auto& b : records[k])
          if (b.tokens == speedup_at) return &b;
    return nullptr;
  };
  const BenchRecord* w = find(MixerKind::kWpo);
  const BenchRecord* d = find(MixerKind::kDense);
  if (w != nullptr && d != nullptr) {
    const double speedup = static_cast<double>(d->median_ns) / static_cast<double>(w->median_ns);
    // Hardware dependent: reported as a warning, never a failure.
    const std::string status = speedup >= min_speedup ? "pass" : "warn";
    fit.row({"speedup_dense_over_wpo_at_" + std::to_string(speedup_at), fmt(speedup), fmt(min_speedup), "", status});
    log.line("[", status, "] wpo is ", fmt(speedup), "x faster than dense at N=", speedup_at,
             " (soft threshold ", fmt(min_speedup), "x, hardware dependent)");
  }
  return ok ? kExitOk : kExitTolerance;
}

// ------------------------------------------------------------------- train-toy

int cmd_train_toy(const json& j, const RunContext& ctx) {
  TrainSetup s;
  std::size_t repeats = 1;
  double min_accuracy = 0.9;
  std::vector<std::string> variants{"wave", "heat"};
  bool save = true;
  JsonReader r(j, "train-toy");
  read_training(r, s, 20);
  r.get("repeats", repeats);
  r.get("min_accuracy", min_accuracy);
  r.get("variants", variants);
  r.get("save_weights", save);
  const std::uint64_t seed = read_seed(r, ctx);
  r.finish();
  require(repeats >= 1, "train-toy: repeats must be >= 1");
  require(!variants.empty(), "train-toy: variants must not be empty");
  for (const auto& v : variants) require(v == "wave" || v == "heat", "train-toy: unknown variant '" + v + "'");
  json resolved = training_json(s);
  resolved.update({{"repeats", repeats}, {"min_accuracy", min_accuracy}, {"variants", variants},
                   {"save_weights", save}, {"seed", seed}});

  const Log log(ctx.log);
  const fs::path out = prepare_out(ctx);
  CsvWriter curve(out / "learning_curve.csv", "train-toy", resolved, seed,
                  {"variant", "seed", "epoch", "train_loss", "test_accuracy", "acc_low_0", "acc_low_90",
                   "acc_high_0", "acc_high_90", "seconds"});
  CsvWriter summary(out / "train_summary.csv", "train-toy", resolved, seed,
                    {"variant", "seed", "epochs", "test_accuracy", "high_freq_accuracy", "acc_low_0",
                     "acc_low_90", "acc_high_0", "acc_high_90", "seconds"});
  bool ok = true;
  std::map<std::string, double> high_sum;
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    const std::uint64_t run_seed = seed + rep;
    net::SyntheticSpec spec = s.data;
    spec.seed = run_seed;
    const net::Dataset data = net::make_synthetic(spec);
    for (const auto& variant : variants) {
      net::ModelConfig model = s.model;
      model.heat_baseline = variant == "heat";
      net::TrainOptions opts = s.opts;
      opts.seed = run_seed;
      opts.workers = ctx.workers;
      opts.on_epoch = [&](const net::EpochStats& e) {
        std::vector<std::string> row{variant, std::to_string(run_seed), std::to_string(e.epoch), fmt(e.train_loss),
                                     fmt(e.test.accuracy)};
        for (const auto& c : class_cells(e.test)) row.push_back(c);
        row.push_back(fmt(e.seconds));
        curve.row(row);
      };
      const net::TrainReport report = net::sgd_train(data, model, opts);
      const net::Evaluation& last = report.epochs.back().test;
      std::vector<std::string> row{variant, std::to_string(run_seed), std::to_string(report.epochs.size()),
                                   fmt(last.accuracy), fmt(high_freq_accuracy(last))};
      for (const auto& c : class_cells(last)) row.push_back(c);
      row.push_back(fmt(report.seconds));
      summary.row(row);
      high_sum[variant] += high_freq_accuracy(last);
      const bool acc_ok = variant != "wave" || last.accuracy >= min_accuracy;
      ok = ok && acc_ok;
      log.line(acc_ok ? "[pass] " : "[FAIL] ", variant, " seed ", run_seed, ": test accuracy ", fmt(last.accuracy),
               ", high-frequency classes ", fmt(high_freq_accuracy(last)), " after ", report.epochs.size(),
               " epochs, ", fmt(report.seconds), " s");
      if (save) {
        net::save_weights(out / ("weights_" + variant + "_seed" + std::to_string(run_seed)), report.weights, model);
      }
    }
  }
  if (high_sum.count("wave") && high_sum.count("heat")) {
    const double wave = high_sum["wave"] / static_cast<double>(repeats);
    const double heat = high_sum["heat"] / static_cast<double>(repeats);
    ok = ok && heat <= wave;
    log.line(heat <= wave ? "[pass] " : "[FAIL] ", "mean high-frequency accuracy: heat ", fmt(heat), " <= wave ",
             fmt(wave));
  }
  return ok ? kExitOk : kExitTolerance;
}

// ------------------------------------------------------------------- propagate

GrayImage to_gray(const FeatureField& f) {
  const auto [lo, hi] = std::minmax_element(f.data().begin(), f.data().end());
  const double range = *hi - *lo;
  GrayImage img{f.width(), f.height(), std::vector<std::uint8_t>(f.size())};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = range > 1e-12 ? (f.data()[i] - *lo) / range : std::clamp(f.data()[i], 0.0, 1.0);
    img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * v));
  }
  return img;
}

int cmd_propagate(const json& j, const RunContext& ctx) {
  std::string input;
  double velocity = 1.0, damping = 0.1;
  std::vector<double> times{0.0, 1.0, 2.0, 4.0, 8.0};
  std::size_t max_dim = 2048;
  JsonReader r(j, "propagate");
  r.get("input", input);
  r.get("velocity", velocity);
  r.get("damping", damping);
  r.get("times", times);
  r.get("max_dim", max_dim);
  const std::uint64_t seed = read_seed(r, ctx);
  r.finish();
  require(!input.empty(), "propagate: 'input' (path to a P5 PGM) is required");
  require(!times.empty(), "propagate: times must not be empty");
  for (double t : times) WaveParams{velocity, damping, t}.validate();
  fs::path in_path(input);
  if (in_path.is_relative()) in_path = ctx.config_dir / in_path;
  const GrayImage img = read_pgm(in_path, max_dim);
  const json resolved = {{"input", input}, {"velocity", velocity}, {"damping", damping}, {"times", times},
                         {"max_dim", max_dim}, {"seed", seed}};

  FeatureField u0(img.height, img.width, 1);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) u0.data()[i] = img.pixels[i] / 255.0;
  const FeatureField v0(u0.dims());
  const Log log(ctx.log);
  const fs::path out = prepare_out(ctx);
  CsvWriter csv(out / "propagate.csv", "propagate", resolved, seed,
                {"time", "tensor", "snapshot", "min", "max", "mean", "modal_energy"});
  for (std::size_t k = 0; k < times.size(); ++k) {
    const WaveParams p{velocity, damping, times[k]};
    const WpoState s = wpo_forward({u0, v0}, p);
    const std::string stem = "u_" + std::to_string(k);
    save_tensor(s.u, out / (stem + ".wft"));
    write_pgm(out / (stem + ".pgm"), to_gray(s.u));
    const auto [lo, hi] = std::minmax_element(s.u.data().begin(), s.u.data().end());
    double mean = 0.0;
    for (double v : s.u.data()) mean += v;
    mean /= static_cast<double>(s.u.size());
    csv.row({fmt(times[k]), stem + ".wft", stem + ".pgm", fmt(*lo), fmt(*hi), fmt(mean), fmt(modal_energy(s, p))});
    log.line("t=", fmt(times[k]), " -> ", stem, ".pgm range [", fmt(*lo), ", ", fmt(*hi), "]");
  }
  return kExitOk;
}

using Command = int (*)(const json&, const RunContext&);

const std::vector<std::pair<std::string, Command>>& table() {
  static const std::vector<std::pair<std::string, Command>> t{
      {"verify-oracle", cmd_verify_oracle}, {"spectral-compare", cmd_spectral_compare},
      {"ablation", cmd_ablation},           {"bench", cmd_bench},
      {"train-toy", cmd_train_toy},         {"propagate", cmd_propagate}};
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, fn] : table()) n.push_back(name);
    return n;
  }();
  return names;
}

int run_command(const std::string& name, const json& config, const RunContext& ctx) {
  for (const auto& [n, fn] : table())
    if (n == name) return fn(config, ctx);
  throw ConfigError("unknown subcommand '" + name + "'");
}

std::size_t resolve_workers(std::size_t flag, const char* env) {
  if (env != nullptr && *env != '\0') {
    const std::string s(env);
    if (s.size() > 6 || s.find_first_not_of("0123456789") != std::string::npos || std::stoul(s) == 0) {
      throw ConfigError("WAVEKIT_WORKERS must be a positive integer, got '" + s + "'");
    }
    return std::stoul(s);
  }
  if (flag == 0) throw ConfigError("--workers must be >= 1");
  return flag;
}

}  // namespace wavekit::cli
