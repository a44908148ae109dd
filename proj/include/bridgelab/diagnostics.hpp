#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bridgelab/sampler.hpp"
#include "bridgelab/tasks.hpp"

namespace bridgelab {

struct ProbeRow {
  double t = 0.0;
  double pred_variance = 0.0;    // mean over draws of per-vector component variance
  double target_variance = 0.0;
  double cosine_similarity = 0.0;
  double n_samples = 0.0;
};

// Sweeps the bridge-time grid, builds fresh supervised draws at each t, and
// compares the predictor's output against the true target. mean, when
// present, supplies xhat0 = M(x1). Grid points run on independent rng streams,
// so the fan-out over threads cannot change the result.
std::vector<ProbeRow> endpoint_probe(const Predictor& eps, const ScheduleSpec& spec,
                                     const PairedDataset& dataset,
                                     const std::vector<double>& t_grid, int samples_per_t,
                                     std::uint64_t seed, const Predictor* mean = nullptr,
                                     int threads = 1);

// Geometric spacing down to 1e-3 near t = 0, mirrored near t = 1.
std::vector<double> default_probe_grid();

struct NoiseCurveRow {
  double t = 0.0;
  double i2sb_input = 0.0;
  double i2sb_target = 0.0;
  double nadb_input = 0.0;
  double nadb_target = 0.0;
};

std::vector<NoiseCurveRow> noise_curves(const ScheduleSpec& i2sb_spec,
                                        const ScheduleSpec& nadb_spec,
                                        const std::vector<double>& t_grid);

// Exact 1-D squared-Wasserstein-2 by sorted coupling, sqrt'd. Equal counts
// required; input order is irrelevant.
double w2_exact_1d(std::vector<double> samples_a, std::vector<double> samples_b);

struct Theorem1Result {
  double w2_before = 0.0;   // w2(rho0, rho1)
  double w2_after = 0.0;    // w2(rho0, rhohat0)
  double mse_before = 0.0;  // E|x0 - x1|^2
  double mse_after = 0.0;   // E|x0 - M(x1)|^2
  double se_diff = 0.0;     // block standard error of the w2 difference
  bool holds = false;       // w2_after <= w2_before + 3 * se_diff
};

// Checks the endpoint-mean contraction on a 1-D task: mapping x1 through M
// should not move the distribution farther from rho0 than rho1 was.
Theorem1Result theorem1_check(const Predictor& mean_net, const PairedDataset& dataset_1d,
                              int n, std::uint64_t seed);

struct RestorationMetrics {
  double mse = 0.0;
  double psnr_toy = 0.0;  // 10*log10(1/mse) on [0,1]-clipped values; inf below 1e-12
};

RestorationMetrics restoration_metrics(const std::vector<Vec>& reference,
                                       const std::vector<Vec>& output);

struct DiagnosticsReport {
  std::vector<ProbeRow> probe;
  std::vector<NoiseCurveRow> curves;
  Theorem1Result theorem1;
  bool theorem1_ran = false;
  RestorationMetrics metrics;
  bool metrics_ran = false;
};

void write_probe_csv(const std::string& path, const std::vector<ProbeRow>& rows,
                     const std::string& metadata);
void write_noise_curves_csv(const std::string& path, const std::vector<NoiseCurveRow>& rows,
                            const std::string& metadata);
void write_theorem1_csv(const std::string& path, const Theorem1Result& result,
                        const std::string& metadata);
void write_metrics_csv(const std::string& path, const RestorationMetrics& metrics,
                       const std::string& metadata);

}  // namespace bridgelab
