#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wavekit/cli/bench.hpp"
#include "wavekit/cli/commands.hpp"
#include "wavekit/cli/csv.hpp"
#include "wavekit/cli/pgm.hpp"
#include "wavekit/tensor_io.hpp"

namespace wavekit::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wavekit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "wavekit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return cli_main(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

struct Csv {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cells.push_back(c);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  Csv csv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      csv.comments.push_back(line);
    } else if (csv.header.empty()) {
      csv.header = split(line);
    } else {
      csv.rows.push_back(split(line));
    }
  }
  return csv;
}

std::string column(const Csv& csv, const std::vector<std::string>& row, const std::string& name) {
  for (std::size_t i = 0; i < csv.header.size(); ++i)
    if (csv.header[i] == name) return row.at(i);
  ADD_FAILURE() << "no column " << name;
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Format, RoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 5.172318620381234e-05, -2.5e300, 0.0}) EXPECT_EQ(std::stod(fmt(v)), v);
  EXPECT_EQ(fmt(1.0), "1");
}

TEST(Workers, EnvironmentOverridesFlag) {
  EXPECT_EQ(resolve_workers(3, nullptr), 3u);
  EXPECT_EQ(resolve_workers(3, ""), 3u);
  EXPECT_EQ(resolve_workers(3, "5"), 5u);
  EXPECT_THROW(resolve_workers(3, "0"), ConfigError);
  EXPECT_THROW(resolve_workers(3, "two"), ConfigError);
  EXPECT_THROW(resolve_workers(0, nullptr), ConfigError);
}

TEST_F(CliTest, ArgumentErrorsExitTwo) {
  const auto cfg = write_config("c.json", "{}");
  EXPECT_EQ(run({"verify-oracle"}), kExitConfig);
  EXPECT_EQ(run({"nonsense", "--config", cfg.string()}), kExitConfig);
  EXPECT_EQ(run({"verify-oracle", "--config", (dir_ / "missing.json").string()}), kExitConfig);
  EXPECT_EQ(run({"verify-oracle", "--config", write_config("bad.json", "{ not json").string()}), kExitConfig);
  EXPECT_EQ(run({"verify-oracle", "--config", cfg.string(), "--workers", "x"}), kExitConfig);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST_F(CliTest, UnknownKeysRejectedEverywhere) {
  for (const std::string& sub : subcommands()) {
    const auto cfg = write_config(sub + ".json", R"({"definitely_not_a_key": 1})");
    EXPECT_EQ(run({sub, "--config", cfg.string(), "--out", (dir_ / sub).string()}), kExitConfig) << sub;
    EXPECT_NE(err_.str().find("definitely_not_a_key"), std::string::npos) << sub;
  }
  const auto nested = write_config("n.json", R"({"model": {"dropout": 0.5}})");
  EXPECT_EQ(run({"train-toy", "--config", nested.string()}), kExitConfig);
  const auto typed = write_config("t.json", R"({"grid": "big"})");
  EXPECT_EQ(run({"verify-oracle", "--config", typed.string()}), kExitConfig);
}

TEST_F(CliTest, VerifyOracleDefaultPasses) {
  const auto cfg = write_config("c.json", "{}");
  ASSERT_EQ(run({"verify-oracle", "--config", cfg.string(), "--out", dir_.string(), "--seed", "7"}), kExitOk)
      << err_.str();
  const Csv csv = read_csv(dir_ / "verify_oracle.csv");
  ASSERT_GE(csv.comments.size(), 4u);
  EXPECT_EQ(csv.comments[0].rfind("# tool: wavekit ", 0), 0u);
  EXPECT_EQ(csv.comments[2], "# seed: 7");
  EXPECT_NE(csv.comments[3].find("\"seed\":7"), std::string::npos);
  EXPECT_NE(csv.comments[3].find("\"dt\":0.002"), std::string::npos);
  ASSERT_EQ(csv.rows.size(), 8u);
  for (const auto& row : csv.rows) {
    ASSERT_EQ(row.size(), csv.header.size()) << row[0];
    EXPECT_EQ(column(csv, row, "pass"), "pass") << row[0];
  }
  EXPECT_LT(std::stod(column(csv, csv.rows[0], "value")), 1e-3);
  EXPECT_EQ(read_csv(dir_ / "convergence.csv").rows.size(), 4u);
}

TEST_F(CliTest, VerifyOracleToleranceFailureExitsOne) {
  const auto cfg = write_config("c.json", R"({"tolerance": 1e-12})");
  EXPECT_EQ(run({"verify-oracle", "--config", cfg.string(), "--out", dir_.string()}), kExitTolerance);
  const auto cfl = write_config("d.json", R"({"dt": 0.9})");
  EXPECT_EQ(run({"verify-oracle", "--config", cfl.string(), "--out", dir_.string()}), kExitConfig);
}

TEST_F(CliTest, SpectralCompareRows) {
  const auto cfg = write_config("c.json", R"({"times": [1.0], "points": 17})");
  ASSERT_EQ(run({"spectral-compare", "--config", cfg.string(), "--out", dir_.string()}), kExitOk);
  const Csv csv = read_csv(dir_ / "spectral_compare.csv");
  ASSERT_EQ(csv.rows.size(), 17u);
  EXPECT_NEAR(std::stod(column(csv, csv.rows[0], "wave_gain")), 1.0, 1e-12);
  EXPECT_EQ(column(csv, csv.rows[0], "heat_gain"), "1");
  for (const auto& row : csv.rows) EXPECT_EQ(row.size(), csv.header.size());
  const auto& last = csv.rows.back();  // |ω| = π
  EXPECT_NEAR(std::stod(column(csv, last, "heat_gain")), 5.17e-5, 0.01e-5);
  EXPECT_NEAR(std::stod(column(csv, last, "wave_envelope")), 0.951, 5e-4);
}

TEST_F(CliTest, AblationOverdampedFractions) {
  const auto cfg = write_config("c.json", R"({"train": false})");
  ASSERT_EQ(run({"ablation", "--config", cfg.string(), "--out", dir_.string()}), kExitOk);
  const Csv csv = read_csv(dir_ / "ablation.csv");
  ASSERT_EQ(csv.rows.size(), 16u);
  auto fraction = [&](const std::string& v, const std::string& a) {
    for (const auto& row : csv.rows)
      if (row[0] == v && row[1] == a) return std::stod(column(csv, row, "overdamped_fraction"));
    return -1.0;
  };
  EXPECT_EQ(fraction("0.1", "10"), 1.0);
  EXPECT_EQ(fraction("100", "0.01"), 1.0 / 64.0);
}

TEST_F(CliTest, AblationTrainsEachCell) {
  const auto cfg = write_config("c.json", R"({"velocities": [1.0], "dampings": [0.1, 10.0], "epochs": 1,
      "data": {"train_count": 32, "test_count": 16}})");
  ASSERT_EQ(run({"ablation", "--config", cfg.string(), "--out", dir_.string()}), kExitOk) << err_.str();
  const Csv csv = read_csv(dir_ / "ablation.csv");
  ASSERT_EQ(csv.rows.size(), 2u);
  for (const auto& row : csv.rows) {
    const double acc = std::stod(column(csv, row, "test_accuracy"));
    EXPECT_GE(acc, 0.0);
    EXPECT_LE(acc, 1.0);
  }
  const auto heat = write_config("h.json", R"({"model": {"heat_baseline": true}})");
  EXPECT_EQ(run({"ablation", "--config", heat.string(), "--out", dir_.string()}), kExitConfig);
}

TEST_F(CliTest, BenchSmall) {
  const auto cfg = write_config("c.json", R"({"sizes": [64, 256], "repeats": 10, "warmups": 1,
      "wpo_slope": [0.0, 5.0], "dense_slope": [0.0, 5.0], "speedup_at": 256})");
  ASSERT_EQ(run({"bench", "--config", cfg.string(), "--out", dir_.string()}), kExitOk) << err_.str();
  const Csv csv = read_csv(dir_ / "bench.csv");
  ASSERT_EQ(csv.rows.size(), 6u);
  for (const auto& row : csv.rows) {
    EXPECT_GT(std::stoll(column(csv, row, "median_ns")), 0);
    EXPECT_FALSE(column(csv, row, "checksum").empty());
  }
  const Csv fit = read_csv(dir_ / "bench_fit.csv");
  ASSERT_EQ(fit.rows.size(), 4u);
  EXPECT_EQ(fit.rows[3][0], "speedup_dense_over_wpo_at_256");
  const auto bad = write_config("b.json", R"({"sizes": [100, 200]})");
  EXPECT_EQ(run({"bench", "--config", bad.string(), "--out", dir_.string()}), kExitConfig);
  const auto few = write_config("f.json", R"({"repeats": 3})");
  EXPECT_EQ(run({"bench", "--config", few.string(), "--out", dir_.string()}), kExitConfig);
}

TEST(Bench, DenseMixerMatchesDirectProduct) {
  const DenseMixer m(9, 3);
  std::vector<double> x(9 * 2), y;
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(1.0 + static_cast<double>(i));
  m.apply(x, 2, y);
  // Identity input recovers columns: e_j ↦ column j.
  std::vector<double> e(9, 0.0), col;
  e[4] = 1.0;
  m.apply(e, 1, col);
  double direct = 0.0;
  for (std::size_t j = 0; j < 9; ++j) {
    std::vector<double> ej(9, 0.0), cj;
    ej[j] = 1.0;
    m.apply(ej, 1, cj);
    direct += cj[2] * x[j * 2 + 1];
  }
  EXPECT_NEAR(y[2 * 2 + 1], direct, 1e-12);
  for (double v : col) EXPECT_LE(std::abs(v), 1.0 / 3.0 + 1e-7);
}

TEST(Bench, TimingRecordsMedian) {
  int calls = 0;
  const BenchRecord r = time_body([&] { return static_cast<double>(++calls); }, 3, 10);
  EXPECT_EQ(calls, 13);
  EXPECT_EQ(r.repeats, 10u);
  EXPECT_EQ(r.checksum, 13.0);
  EXPECT_LE(r.min_ns, r.median_ns);
}

TEST_F(CliTest, TrainToyIsReproducible) {
  const auto cfg = write_config("c.json", R"({"epochs": 2, "min_accuracy": 0.0,
      "data": {"train_count": 32, "test_count": 16}})");
  const fs::path a = dir_ / "a", b = dir_ / "b";
  ASSERT_EQ(run({"train-toy", "--config", cfg.string(), "--out", a.string(), "--seed", "3"}), kExitOk) << err_.str();
  ASSERT_EQ(run({"train-toy", "--config", cfg.string(), "--out", b.string(), "--seed", "3", "--workers", "2"}),
            kExitOk);
  const Csv ca = read_csv(a / "learning_curve.csv"), cb = read_csv(b / "learning_curve.csv");
  ASSERT_EQ(ca.rows.size(), 4u);  // 2 variants × 2 epochs
  EXPECT_EQ(ca.comments, cb.comments);
  for (std::size_t i = 0; i < ca.rows.size(); ++i) {
    // Every column except wall-clock seconds is bitwise identical.
    EXPECT_EQ(std::vector<std::string>(ca.rows[i].begin(), ca.rows[i].end() - 1),
              std::vector<std::string>(cb.rows[i].begin(), cb.rows[i].end() - 1));
  }
  EXPECT_TRUE(fs::exists(a / "weights_wave_seed3" / "manifest.json"));
  EXPECT_TRUE(fs::exists(a / "weights_heat_seed3" / "stage0.block0.wpo.raw_v.wft"));
  EXPECT_EQ(slurp(a / "weights_wave_seed3" / "head.weight.wft"), slurp(b / "weights_wave_seed3" / "head.weight.wft"));

  const auto strict = write_config("s.json", R"({"epochs": 1, "min_accuracy": 1.01, "variants": ["wave"],
      "save_weights": false, "data": {"train_count": 32, "test_count": 16}})");
  EXPECT_EQ(run({"train-toy", "--config", strict.string(), "--out", (dir_ / "s").string()}), kExitTolerance);
}

TEST_F(CliTest, PropagateWritesSnapshots) {
  GrayImage img{12, 8, std::vector<std::uint8_t>(96)};
  for (std::size_t i = 0; i < 96; ++i) img.pixels[i] = static_cast<std::uint8_t>((i * 37) % 256);
  write_pgm(dir_ / "in.pgm", img);
  const auto cfg = write_config("c.json", R"({"input": "in.pgm", "times": [0, 2]})");
  ASSERT_EQ(run({"propagate", "--config", cfg.string(), "--out", (dir_ / "o").string()}), kExitOk) << err_.str();
  const FeatureField u0 = load_tensor(dir_ / "o" / "u_0.wft");
  EXPECT_EQ(u0.dims(), (Dims{8, 12, 1}));
  EXPECT_NEAR(u0.at(0, 0, 1), 37.0 / 255.0, 1e-12);
  // t = 0 snapshot renormalizes the original range 0..255 back onto itself.
  EXPECT_EQ(read_pgm(dir_ / "o" / "u_0.pgm", 64).pixels, img.pixels);
  EXPECT_EQ(read_pgm(dir_ / "o" / "u_1.pgm", 64).width, 12u);

  const auto capped = write_config("d.json", R"({"input": "in.pgm", "max_dim": 10})");
  EXPECT_EQ(run({"propagate", "--config", capped.string(), "--out", (dir_ / "o").string()}), kExitConfig);
  std::ofstream(dir_ / "ascii.pgm") << "P2\n2 2\n255\n0 0 0 0\n";
  const auto ascii = write_config("e.json", R"({"input": "ascii.pgm"})");
  EXPECT_EQ(run({"propagate", "--config", ascii.string(), "--out", (dir_ / "o").string()}), kExitConfig);
}

TEST_F(CliTest, PgmParsing) {
  std::ofstream(dir_ / "c.pgm", std::ios::binary) << "P5\n# comment\n2 # mid\n2\n15\n" << std::string("\x00\x0f\x07\x10", 4);
  const GrayImage g = read_pgm(dir_ / "c.pgm", 8);
  EXPECT_EQ(g.pixels, (std::vector<std::uint8_t>{0, 255, 119, 255}));
  std::ofstream(dir_ / "short.pgm", std::ios::binary) << "P5\n4 4\n255\n" << std::string(10, 'x');
  EXPECT_THROW(read_pgm(dir_ / "short.pgm", 8), PgmError);
  std::ofstream(dir_ / "wide.pgm", std::ios::binary) << "P5\n2 2\n65535\n" << std::string(8, 'x');
  EXPECT_THROW(read_pgm(dir_ / "wide.pgm", 8), PgmError);
}

}  // namespace
}  // namespace wavekit::cli
