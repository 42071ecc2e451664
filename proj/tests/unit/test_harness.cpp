#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ssr/config_io.hpp"
#include "ssr/errors.hpp"
#include "ssr/harness.hpp"
#include "test_support.hpp"

namespace {

using namespace ssr;
namespace fs = std::filesystem;
using ssr::testing::small_config;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("ssr_test_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Harness, EnhancementEstimateAndPropagatedError) {
  MeanEstimate s{3.0, 0.0, 0.3, 20};
  MeanEstimate u{2.0, 0.0, 0.1, 20};
  const auto r = scan_rate_ratio(s, u);
  EXPECT_DOUBLE_EQ(r.value, 2.25);
  EXPECT_NEAR(r.standard_error, 2.0 * 2.25 * std::sqrt(0.01 + 0.0025), 1e-14);
  u.mean = 0.0;
  EXPECT_TRUE(std::isnan(scan_rate_ratio(s, u).value));
}

TEST(Harness, MeanEstimateUsesSampleDeviation) {
  const auto m = estimate_mean({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.sd, std::sqrt(5.0 / 3.0), 1e-14);
  EXPECT_NEAR(m.standard_error, std::sqrt(5.0 / 3.0) / 2.0, 1e-14);
  EXPECT_EQ(m.count, 4u);
}

TEST(Harness, DefaultsValidate) {
  EXPECT_NO_THROW(default_config(Scale::kDesk).validate());
  EXPECT_NO_THROW(default_config(Scale::kFull).validate());
  EXPECT_TRUE(default_config(Scale::kDesk).warnings().empty());
  const auto full = default_config(Scale::kFull);
  EXPECT_EQ(full.repetitions, 200);
  EXPECT_EQ(full.synth.n_spectra, 401);
  EXPECT_DOUBLE_EQ(full.synth.faxion.power_fraction, 0.01);
}

TEST(ConfigIo, RoundTripPreservesEverything) {
  auto c = default_config(Scale::kFull);
  c.axion_physical = HaloscopePhysical{};
  c.checks.max_em_standard_error = 0.2;
  c.seed = 99;
  const auto text = to_json(c).dump();
  const auto back = parse_experiment_config(text);
  EXPECT_EQ(to_json(back).dump(), text);
  EXPECT_EQ(config_hash(back), config_hash(c));
}

TEST(ConfigIo, DecibelAndEfficiencyForms) {
  const auto c = parse_experiment_config(R"({
    "squeezed": {"G_s_db": 10, "eta": 0.64},
    "synth": {"faxion": {"step_hz": -20000}}
  })");
  EXPECT_NEAR(c.squeezed.G_s, 10.0, 1e-12);
  EXPECT_NEAR(c.squeezed.lambda_t, 0.8, 1e-15);
  EXPECT_DOUBLE_EQ(c.pipeline.tuning_shift_hz, 20000.0);
}

TEST(ConfigIo, RejectsMalformedAndInconsistentInput) {
  EXPECT_THROW(parse_experiment_config("{ \"seed\": "), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"sede": 3})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"squeezed": {"G_s": 2, "G_s_db": 3}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"pipeline": {"tuning_shift_hz": 5000}})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"scale": "huge"})"), ConfigError);
  EXPECT_THROW(parse_experiment_config(R"({"repetitions": "many"})"), ConfigError);
  EXPECT_THROW(load_experiment_config("/nonexistent/config.json"), ConfigError);
}

TEST(ConfigIo, HashIsStableAndSensitive) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  auto a = default_config(Scale::kDesk);
  auto b = a;
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(hex64(255), "00000000000000ff");
}

class CampaignFixture : public ::testing::Test {
 protected:
  static ExperimentConfig config(unsigned threads, const fs::path& out) {
    auto c = small_config(0.5);
    c.repetitions = 3;
    c.threads = threads;
    c.output_dir = out.string();
    return c;
  }
};

TEST_F(CampaignFixture, ResultFilesAreIndependentOfThreadCount) {
  const auto d1 = scratch("campaign1");
  const auto d2 = scratch("campaign2");
  auto c1 = config(1, d1);
  auto c2 = config(3, d1);  // same output_dir keeps the config hash equal
  const auto r1 = run_campaign(c1);
  const auto r2 = run_campaign(c2);
  write_campaign(d1, c1, r1);
  write_campaign(d2, c2, r2);
  for (const char* f : {"results.json", "faxion_powers.csv"}) {
    EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  }
  EXPECT_FALSE(r1.failed_campaign);
  EXPECT_EQ(r1.failed, 0u);
  EXPECT_GT(r1.mu_s.mean, r1.mu_u.mean);

  const auto manifest = read_json_file(d1 / "manifest.json");
  EXPECT_EQ(manifest.at("seed").get<std::uint64_t>(), c1.seed);
  EXPECT_EQ(manifest.at("version").get<std::string>(), version_string());
  EXPECT_EQ(manifest.at("config_hash").get<std::string>(), hex64(config_hash(c1)));
  ASSERT_EQ(manifest.at("repetitions").size(), 3u);
  EXPECT_EQ(manifest.at("repetitions")[1].at("seed_squeezed").get<std::uint64_t>(),
            derive_seed(c1.seed, 1, 1));
  EXPECT_TRUE(fs::exists(d1 / "faxion_powers.svg"));
  EXPECT_TRUE(fs::exists(d1 / "timing.json"));
}

TEST_F(CampaignFixture, NoSignalGivesNoExcess) {
  auto c = config(1, scratch("campaign0"));
  c.synth.faxion.power_fraction = 0.0;
  c.repetitions = 6;
  const auto r = run_campaign(c);
  ASSERT_FALSE(r.failed_campaign);
  EXPECT_LT(std::abs(r.mu_s.mean), 3.0 * r.mu_s.sd / std::sqrt(6.0) + 1e-12);
  EXPECT_LT(std::abs(r.mu_u.mean), 3.0 * r.mu_u.sd / std::sqrt(6.0) + 1e-12);
}

TEST_F(CampaignFixture, FailingRepetitionsFailTheCampaign) {
  auto c = config(1, scratch("campaignf"));
  c.pipeline.max_rejected_fraction = 1e-9;  // every repetition raises the alarm
  c.pipeline.reject_sigma = 0.5;
  const auto r = run_campaign(c);
  EXPECT_TRUE(r.failed_campaign);
  EXPECT_EQ(r.failed, 3u);
  EXPECT_NE(r.repetitions[0].error.find("contamination"), std::string::npos);
  const auto checks = evaluate_checks(c, r);
  EXPECT_FALSE(checks.front().passed);
}

#ifdef SSR_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(SSR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitStatuses) {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "bad.json") << "{ \"seed\": ";
  }
  EXPECT_EQ(run_cli("campaign --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("visibility --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("no-such-command"), 2);
  EXPECT_EQ(run_cli("axion-params --check --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "axion_params.json"));
  EXPECT_EQ(run_cli("scanrate-grid --eta 0.69 --out " + dir.string()), 0);
  EXPECT_TRUE(fs::exists(dir / "grid_eta_0.69.csv"));
  EXPECT_EQ(run_cli("scanrate-grid --eta 1.5"), 2);
  EXPECT_EQ(run_cli("pipeline --in " + (dir / "nothing").string()), 2);
  {
    std::ofstream(dir / "strict.json")
        << R"({"synth": {"if_band_hz": 600000, "n_spectra": 31, "faxion": {"start_window_hz": 400000, "power_fraction": 0.5}},
              "repetitions": 2, "checks": {"min_retained_fraction": 1.01}})";
  }
  EXPECT_EQ(run_cli("campaign --config " + (dir / "strict.json").string() + " --check --out " +
                    (dir / "camp").string()),
            4);
}
#endif

}  // namespace
