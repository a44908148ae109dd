#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "bridgelab/diagnostics.hpp"

using namespace bridgelab;

namespace {

PairedDataset constant_pair(Vec x0, Vec x1) {
  PairedDataset ds;
  ds.name = "constant_pair";
  ds.dim = static_cast<int>(x0.size());
  ds.degradation = "none";
  ds.draw = [x0 = std::move(x0), x1 = std::move(x1)](CounterRng&, Vec& a, Vec& b) {
    a = x0;
    b = x1;
  };
  return ds;
}

Vec gaussian_draws(int n, double mean, double stddev, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Vec out(static_cast<std::size_t>(n));
  for (double& v : out) v = mean + stddev * rng.normal();
  return out;
}

}  // namespace

TEST_CASE("sorted coupling distance obeys its closed-form identities") {
  const Vec a = gaussian_draws(20000, 0.0, 1.0, 3);
  CHECK(w2_exact_1d(a, a) == 0.0);

  Vec shifted = a;
  for (double& v : shifted) v += 0.75;
  CHECK(w2_exact_1d(a, shifted) == doctest::Approx(0.75).epsilon(1e-12));

  Vec reversed(a.rbegin(), a.rend());
  CHECK(w2_exact_1d(a, reversed) == 0.0);

  CHECK_THROWS_AS(w2_exact_1d(a, Vec{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(w2_exact_1d({}, {}), std::invalid_argument);
}

TEST_CASE("distance between offset unit gaussians is their mean gap") {
  const Vec a = gaussian_draws(100000, 0.0, 1.0, 5);
  const Vec b = gaussian_draws(100000, 1.0, 1.0, 6);
  CHECK(w2_exact_1d(a, b) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("distance between nested gaussians matches the scale gap") {
  // For centered 1-D gaussians the distance is the difference of standard
  // deviations: sqrt(2) - 1 and 1 - 1/sqrt(2).
  const Vec unit = gaussian_draws(100000, 0.0, 1.0, 7);
  const Vec wide = gaussian_draws(100000, 0.0, std::sqrt(2.0), 8);
  const Vec narrow = gaussian_draws(100000, 0.0, std::sqrt(0.5), 9);
  CHECK(w2_exact_1d(unit, wide) == doctest::Approx(0.41421356237309515).epsilon(0.03));
  CHECK(w2_exact_1d(unit, narrow) == doctest::Approx(0.29289321881345254).epsilon(0.03));
}

TEST_CASE("endpoint-mean contraction is trivially tight on the identity task") {
  const PairedDataset ds = make_gauss_channel(1, 0.0);
  const Predictor identity = [](const Vec& x, std::optional<double>) { return x; };
  const Theorem1Result r = theorem1_check(identity, ds, 2000, 0);
  CHECK(r.w2_before == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.w2_after == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.mse_before == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.mse_after == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.holds);
}

TEST_CASE("half-slope map contracts the noisy channel as predicted") {
  // x1 = x0 + eta doubles the variance; halving x1 is the exact conditional
  // mean, so the distances land at sqrt(2)-1 before and 1-1/sqrt(2) after.
  const PairedDataset ds = make_gauss_channel(1, 1.0);
  const Predictor half = [](const Vec& x, std::optional<double>) {
    return Vec{0.5 * x[0]};
  };
  const Theorem1Result r = theorem1_check(half, ds, 100000, 11);
  CHECK(r.w2_before == doctest::Approx(0.41421356237309515).epsilon(0.03));
  CHECK(r.w2_after == doctest::Approx(0.29289321881345254).epsilon(0.03));
  CHECK(r.mse_before == doctest::Approx(1.0).epsilon(0.03));  // E|eta|^2
  CHECK(r.mse_after == doctest::Approx(0.5).epsilon(0.03));
  CHECK(r.se_diff > 0.0);
  CHECK(r.holds);
  CHECK(r.w2_after < r.w2_before);
}

TEST_CASE("an inflating map is reported as breaking the contraction") {
  const PairedDataset ds = make_gauss_channel(1, 1.0);
  const Predictor inflate = [](const Vec& x, std::optional<double>) {
    return Vec{4.0 * x[0]};
  };
  const Theorem1Result r = theorem1_check(inflate, ds, 10000, 12);
  CHECK(r.w2_after > r.w2_before);
  CHECK_FALSE(r.holds);
}

TEST_CASE("probe reports a unit variance ratio for the exact residual") {
  const Vec x0 = {0.8, -0.2, 0.5, 0.1, -0.6, 0.9, 0.3, -0.8};
  const Vec x1 = {0.1, 0.4, -0.3, 0.7, 0.2, -0.5, 0.6, 0.0};
  const PairedDataset ds = constant_pair(x0, x1);
  const ScheduleSpec spec = make_nadb_spec(0.4, 0.75);
  const Predictor oracle = make_oracle_predictor(spec, x0);
  const std::vector<double> grid = {1e-3, 0.1, 0.5, 0.9, 0.999};
  const std::vector<ProbeRow> rows = endpoint_probe(oracle, spec, ds, grid, 128, 0);
  REQUIRE(rows.size() == grid.size());
  for (const ProbeRow& row : rows) {
    CHECK(row.n_samples == 128.0);
    CHECK(row.target_variance > 0.0);
    CHECK(row.pred_variance / row.target_variance == doctest::Approx(1.0).epsilon(0.01));
    CHECK(row.cosine_similarity >= 0.999);
  }
}

TEST_CASE("probe reports zero similarity for a silent predictor") {
  const PairedDataset ds = make_gauss_channel(4, 1.0);
  const ScheduleSpec spec = make_nadb_spec(0.4, 0.75);
  const Predictor silent = [](const Vec& x, std::optional<double>) {
    return Vec(x.size(), 0.0);
  };
  const std::vector<ProbeRow> rows = endpoint_probe(silent, spec, ds, {0.5}, 64, 0);
  CHECK(rows[0].pred_variance == 0.0);
  CHECK(rows[0].cosine_similarity == 0.0);
}

TEST_CASE("probe rows do not depend on the worker fan-out") {
  const PairedDataset ds = make_gauss_channel(3, 0.5);
  const ScheduleSpec spec = make_i2sb_spec(triangular_beta_table(1.0));
  const Predictor eps = [](const Vec& x, std::optional<double>) {
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = 0.3 * x[i] - 0.1;
    return out;
  };
  const std::vector<double> grid = default_probe_grid();
  const auto serial = endpoint_probe(eps, spec, ds, grid, 32, 4, nullptr, 1);
  const auto parallel = endpoint_probe(eps, spec, ds, grid, 32, 4, nullptr, 5);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].pred_variance == parallel[i].pred_variance);
    CHECK(serial[i].target_variance == parallel[i].target_variance);
    CHECK(serial[i].cosine_similarity == parallel[i].cosine_similarity);
  }
}

TEST_CASE("default probe grid hugs both endpoints strictly inside (0, 1)") {
  const std::vector<double> grid = default_probe_grid();
  REQUIRE(grid.size() >= 10);
  CHECK(grid.front() == 1e-3);
  CHECK(grid.back() == 0.999);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(grid[i] > 0.0);
    CHECK(grid[i] < 1.0);
    if (i > 0) CHECK(grid[i] > grid[i - 1]);
  }
  CHECK_THROWS_AS(endpoint_probe([](const Vec& x, std::optional<double>) { return x; },
                                 make_nadb_spec(0.4, 0.75),
                                 make_gauss_channel(1, 1.0), {0.0}, 8, 0),
                  std::domain_error);
}

TEST_CASE("noise curve table exposes the endpoint mismatch in one sweep") {
  const ScheduleSpec i2sb = make_i2sb_spec(triangular_beta_table(0.140625));
  const ScheduleSpec nadb = make_nadb_spec(0.4, 0.75);
  std::vector<double> grid;
  for (int i = 0; i <= 1000; ++i) grid.push_back(i / 1000.0);
  const std::vector<NoiseCurveRow> rows = noise_curves(i2sb, nadb, grid);
  REQUIRE(rows.size() == grid.size());

  CHECK(rows.front().i2sb_input == 0.0);
  CHECK(rows.front().i2sb_target == 1.0);
  CHECK(rows.front().nadb_input == 0.0);
  CHECK(rows.front().nadb_target == 0.0);
  CHECK(rows.back().i2sb_input == 0.0);
  CHECK(rows.back().i2sb_target == 0.0);
  CHECK(rows.back().nadb_input == 0.0);
  CHECK(rows.back().nadb_target == 0.0);

  double peak_nadb_input = 0.0;
  for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
    // The baseline's target amplitude decays monotonically while the aligned
    // target rises from zero, peaks, and returns to zero.
    CHECK(rows[i].i2sb_target < rows[i - 1].i2sb_target);
    peak_nadb_input = std::max(peak_nadb_input, rows[i].nadb_input);
  }
  CHECK(peak_nadb_input == doctest::Approx(0.75 / 4.0).epsilon(1e-12));
  CHECK(rows[500].nadb_input == doctest::Approx(0.1875).epsilon(1e-12));

  CHECK_THROWS_AS(noise_curves(nadb, nadb, grid), std::invalid_argument);
}

TEST_CASE("restoration metrics match hand-computed values") {
  const std::vector<Vec> ref = {{0.0, 0.0}, {0.0, 0.0}};
  const std::vector<Vec> out = {{0.1, 0.1}, {0.1, 0.1}};
  const RestorationMetrics m = restoration_metrics(ref, out);
  CHECK(m.mse == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(m.psnr_toy == doctest::Approx(20.0).epsilon(1e-12));

  const RestorationMetrics perfect = restoration_metrics(ref, ref);
  CHECK(perfect.mse == 0.0);
  CHECK(std::isinf(perfect.psnr_toy));

  // Raw error counts overshoot, the toy psnr is computed after clipping.
  const std::vector<Vec> over = {{1.5, 1.5}, {1.5, 1.5}};
  const std::vector<Vec> ones = {{1.0, 1.0}, {1.0, 1.0}};
  const RestorationMetrics clipped = restoration_metrics(ones, over);
  CHECK(clipped.mse == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(std::isinf(clipped.psnr_toy));

  CHECK_THROWS_AS(restoration_metrics(ref, {{0.1, 0.1}}), std::invalid_argument);
}

TEST_CASE("report writers emit the documented layouts") {
  const std::string dir = "/tmp/bridgelab_test_diag";
  std::filesystem::create_directories(dir);
  {
    ProbeRow row;
    row.t = 0.5;
    row.pred_variance = 0.25;
    row.target_variance = 0.5;
    row.cosine_similarity = 0.75;
    row.n_samples = 64;
    write_probe_csv(dir + "/probe.csv", {row}, "config_hash=00000000 seed=0");
    std::ifstream in(dir + "/probe.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "# config_hash=00000000 seed=0");
    std::getline(in, line);
    CHECK(line == "t,pred_variance,target_variance,cosine_similarity,n_samples");
    std::getline(in, line);
    CHECK(line == "0.5,0.25,0.5,0.75,64");
  }
  {
    Theorem1Result r;
    r.w2_before = 0.414;
    r.w2_after = 0.293;
    r.mse_before = 2.0;
    r.mse_after = 0.5;
    r.se_diff = 0.004;
    r.holds = true;
    write_theorem1_csv(dir + "/t1.csv", r, "config_hash=00000000 seed=0");
    std::ifstream in(dir + "/t1.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    CHECK(line == "w2_before,w2_after,mse_before,mse_after,se_diff,holds");
    std::getline(in, line);
    CHECK(line == "0.414,0.293,2,0.5,0.004,1");
  }
  std::filesystem::remove_all(dir);
}
