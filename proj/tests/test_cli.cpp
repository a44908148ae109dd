#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "bridgelab/cli.hpp"
#include "bridgelab/config.hpp"
#include "bridgelab/dataset_io.hpp"

using namespace bridgelab;
namespace fs = std::filesystem;

namespace {

const std::string kDir = "/tmp/bridgelab_test_cli";

std::string write_file(const std::string& name, const std::string& text) {
  fs::create_directories(kDir);
  const std::string path = kDir + "/" + name;
  std::ofstream out(path, std::ios::trunc);
  out << text;
  return path;
}

std::string tiny_config() {
  return write_file("tiny.cfg",
                    "task=gauss_channel\n"
                    "variant=nadb\n"
                    "task.dim=2\n"
                    "train.steps=120\n"
                    "train.mean_steps=120\n"
                    "train.lr=1e-3\n"
                    "sample.count=8\n"
                    "diag.samples_per_t=16\n");
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Runs the entry point while capturing its stderr text.
int run_cli(const std::vector<std::string>& args, std::string* err_text = nullptr) {
  std::ostringstream captured;
  std::streambuf* old = std::cerr.rdbuf(captured.rdbuf());
  const int code = cli_main(args);
  std::cerr.rdbuf(old);
  if (err_text) *err_text = captured.str();
  return code;
}

}  // namespace

TEST_CASE("help succeeds and unknown arguments are configuration errors") {
  CHECK(run_cli({"--help"}) == 0);
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"no-such-command"}) == 2);
  CHECK(run_cli({"train-mean"}) == 2);  // --config is required
}

TEST_CASE("config parsing accepts the documented keys and rejects the rest") {
  const RunConfig cfg = parse_config_text(
      "# comment line\n"
      "task = patch_blur\n"
      "variant = i2sb\n\n"
      "task.patch_side = 8\n"
      "beta.total_variance = 0.140625\n");
  CHECK(cfg.task == "patch_blur");
  CHECK(cfg.variant == "i2sb");
  CHECK(cfg.patch_side == 8);
  CHECK(cfg.beta_total_variance == 0.140625);
  CHECK(cfg.alpha == 0.4);

  CHECK_THROWS_AS(parse_config_text("task=gauss_channel\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("task=gauss_channel\nvariant=nadb\nbogus=1\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("task=gauss_channel\nvariant=nadb\ntask=again\n"),
      ConfigError);
  CHECK_THROWS_AS(parse_config_text("task=gauss_channel\nvariant=nadb\nalpha=1.5\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("task=gauss_channel\nvariant=nadb\nkind=i2sb\n"),
      ConfigError);
  CHECK_THROWS_AS(
      parse_config_text("task=gauss_channel\nvariant=nadb\nsampler.d=0.1\n"),
      ConfigError);
  CHECK_THROWS_AS(load_config("/tmp/bridgelab_no_such_config.cfg"), IoError);
}

TEST_CASE("equivalent configs hash identically and differing ones do not") {
  const RunConfig a = parse_config_text(
      "task=gauss_channel\nvariant=nadb\nalpha=0.4\ntrain.steps=500\n");
  const RunConfig b = parse_config_text(
      "# reordered with noise\ntrain.steps = 500\nvariant = nadb\n"
      "task = gauss_channel\n");
  CHECK(canonical_config_text(a) == canonical_config_text(b));
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash_hex8(a).size() == 8);

  const RunConfig c = parse_config_text(
      "task=gauss_channel\nvariant=nadb\ntrain.steps=501\n");
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("automatic amplitude calibration matches the schedule peak") {
  const RunConfig cfg = parse_config_text(
      "task=gauss_channel\nvariant=nadb\nk=auto\nbeta.total_variance=0.140625\n");
  CHECK(cfg.k_auto);
  const ScheduleSpec spec = nadb_spec_from(cfg);
  CHECK(spec.k == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("paired datasets round-trip through the binary format") {
  fs::create_directories(kDir);
  const std::string path = kDir + "/pairs.brds";
  const std::vector<Vec> rows = {{0.5, -1.25}, {3.75, 0.0}, {-2.5, 1e-9}};
  save_dataset(path, rows, 2);
  int dim = 0;
  const std::vector<Vec> back = load_dataset(path, &dim);
  CHECK(dim == 2);
  CHECK(back == rows);

  CHECK_THROWS_AS(save_dataset(path, {{1.0}, {1.0, 2.0}}, 1), std::invalid_argument);
  write_file("pairs_bad.brds", "BRXX garbage");
  CHECK_THROWS_AS(load_dataset(kDir + "/pairs_bad.brds"), IoError);
  std::string bytes = read_bytes(path);
  bytes.resize(bytes.size() - 5);
  write_file("pairs_cut.brds", bytes);
  CHECK_THROWS_AS(load_dataset(kDir + "/pairs_cut.brds"), IoError);
}

TEST_CASE("training commands produce checkpoints and logs where promised") {
  fs::remove_all(kDir);
  const std::string cfg = tiny_config();
  const std::string out = kDir + "/run_a";

  // The mean-fed arm cannot start before its mean network exists.
  std::string err;
  CHECK(run_cli({"train-bridge", "--config", cfg, "--out", out, "--seed", "3"}, &err) ==
        2);
  CHECK(err.find("mean.ckpt") != std::string::npos);

  CHECK(run_cli({"train-mean", "--config", cfg, "--out", out, "--seed", "3"}) == 0);
  CHECK(fs::exists(out + "/mean.ckpt"));
  CHECK(run_cli({"train-bridge", "--config", cfg, "--out", out, "--seed", "3"}) == 0);
  CHECK(fs::exists(out + "/eps_nadb.ckpt"));
  CHECK(fs::exists(out + "/train_log_nadb.csv"));

  // Variant override trains the baseline arm into the same directory.
  CHECK(run_cli({"train-bridge", "--config", cfg, "--out", out, "--seed", "3",
                 "--variant", "i2sb"}) == 0);
  CHECK(fs::exists(out + "/eps_i2sb.ckpt"));

  std::ifstream log(out + "/train_log_nadb.csv");
  std::string line;
  std::getline(log, line);
  CHECK(line.find("# config_hash=") == 0);
  CHECK(line.find("seed=3") != std::string::npos);
  CHECK(line.find("variant=nadb") != std::string::npos);
}

TEST_CASE("sampling and diagnostics emit their full report set") {
  const std::string cfg = tiny_config();
  const std::string out = kDir + "/run_a";
  REQUIRE(fs::exists(out + "/eps_nadb.ckpt"));

  CHECK(run_cli({"sample", "--config", cfg, "--out", out, "--seed", "3",
                 "--trajectory"}) == 0);
  CHECK(fs::exists(out + "/outputs_nadb_nfe10.brds"));
  CHECK(fs::exists(out + "/inputs_nadb_nfe10.brds"));
  CHECK(fs::exists(out + "/references_nadb_nfe10.brds"));
  CHECK(fs::exists(out + "/trajectory_nadb_nfe10.csv"));
  int dim = 0;
  CHECK(load_dataset(out + "/outputs_nadb_nfe10.brds", &dim).size() == 8);
  CHECK(dim == 2);

  CHECK(run_cli({"diagnose", "--config", cfg, "--out", out, "--seed", "3"}) == 0);
  const RunConfig parsed = load_config(cfg);
  const std::string suffix = "_" + config_hash_hex8(parsed) + "_s3";
  for (const char* stem : {"endpoint_probe", "noise_curves", "theorem1", "metrics"}) {
    CHECK(fs::exists(out + "/" + stem + suffix + ".csv"));
  }

  // The oracle hook runs the sampler with the exact residual instead of a net.
  CHECK(run_cli({"sample", "--config", cfg, "--out", kDir + "/run_oracle", "--seed",
                 "3", "--checkpoint", "oracle", "--variant", "nadb-nomean"}) == 0);
  CHECK(fs::exists(kDir + "/run_oracle/outputs_nadb-nomean_nfe10.brds"));
}

TEST_CASE("a rerun with the same seed reproduces every artifact byte for byte") {
  const std::string cfg = tiny_config();
  const std::string out_b = kDir + "/run_b";
  const std::string out_c = kDir + "/run_c";
  for (const std::string& out : {out_b, out_c}) {
    REQUIRE(run_cli({"train-mean", "--config", cfg, "--out", out, "--seed", "3"}) == 0);
    REQUIRE(run_cli({"train-bridge", "--config", cfg, "--out", out, "--seed", "3"}) ==
            0);
    REQUIRE(run_cli({"sample", "--config", cfg, "--out", out, "--seed", "3",
                     "--trajectory"}) == 0);
    REQUIRE(run_cli({"diagnose", "--config", cfg, "--out", out, "--seed", "3"}) == 0);
  }
  const RunConfig parsed = load_config(cfg);
  const std::string suffix = "_" + config_hash_hex8(parsed) + "_s3";
  const std::vector<std::string> artifacts = {
      "mean.ckpt",
      "eps_nadb.ckpt",
      "train_log_nadb.csv",
      "outputs_nadb_nfe10.brds",
      "trajectory_nadb_nfe10.csv",
      "endpoint_probe" + suffix + ".csv",
      "noise_curves" + suffix + ".csv",
      "theorem1" + suffix + ".csv",
      "metrics" + suffix + ".csv",
  };
  for (const std::string& name : artifacts) {
    CAPTURE(name);
    CHECK(read_bytes(out_b + "/" + name) == read_bytes(out_c + "/" + name));
  }
  // The first run from a different directory agrees too.
  CHECK(read_bytes(kDir + "/run_a/mean.ckpt") == read_bytes(out_b + "/mean.ckpt"));
}

TEST_CASE("seeds and variants change the artifacts they should") {
  const std::string cfg = tiny_config();
  const std::string out = kDir + "/run_seed9";
  REQUIRE(run_cli({"train-mean", "--config", cfg, "--out", out, "--seed", "9"}) == 0);
  CHECK(read_bytes(out + "/mean.ckpt") != read_bytes(kDir + "/run_b/mean.ckpt"));
}

TEST_CASE("alpha sweep trains one aligned arm per requested alpha") {
  const std::string cfg = write_file("sweep.cfg",
                                     "task=gauss_channel\n"
                                     "variant=nadb-nomean\n"
                                     "train.steps=60\n"
                                     "train.lr=1e-3\n"
                                     "sample.count=4\n");
  const std::string out = kDir + "/run_sweep";
  CHECK(run_cli({"sweep-alpha", "--config", cfg, "--out", out, "--seed", "1",
                 "--alphas", "0.3,0.5"}) == 0);
  const RunConfig parsed = load_config(cfg);
  const std::string path =
      out + "/sweep_alpha_" + config_hash_hex8(parsed) + "_s1.csv";
  REQUIRE(fs::exists(path));
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line.find("# config_hash=") == 0);
  std::getline(in, line);
  CHECK(line == "alpha,final_loss,mse,psnr_toy");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 2);

  // The baseline arm has no alpha to sweep.
  const std::string bad = write_file("sweep_bad.cfg",
                                     "task=gauss_channel\nvariant=i2sb\n");
  CHECK(run_cli({"sweep-alpha", "--config", bad, "--out", out, "--seed", "1"}) == 2);
}

TEST_CASE("missing artifacts surface as configuration errors with the path") {
  const std::string cfg = tiny_config();
  std::string err;
  CHECK(run_cli({"sample", "--config", cfg, "--out", kDir + "/empty", "--seed", "0"},
                &err) == 2);
  CHECK(err.find("checkpoint") != std::string::npos);
  CHECK(run_cli({"diagnose", "--config", cfg, "--out", kDir + "/empty", "--seed",
                 "0"}) == 2);
}
