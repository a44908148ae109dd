#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bridgelab/bridge_sample.hpp"
#include "bridgelab/regressor.hpp"
#include "bridgelab/tasks.hpp"

namespace bridgelab {

struct TrainConfig {
  int batch_size = 32;
  int steps = 2000;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  double t_min = 1e-4;  // lower edge of the bridge-time draw, in [0, 0.01]
  int time_bins = 20;
  ScheduleSpec bridge;
  bool use_mean_network = false;
};

void validate(const TrainConfig& cfg);

// The four training arms: the two formulations, each with and without the
// learned endpoint-mean estimate standing in for x1.
enum class Variant { I2sb, Nadb, I2sbWithMean, NadbNoMean };

bool variant_uses_mean(Variant v);
BridgeKind variant_kind(Variant v);
const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

struct TrainingLog {
  int time_bins = 0;
  std::vector<double> loss;                  // one entry per step
  std::vector<std::vector<double>> bin_mse;  // per step; NaN where the bin saw no draw
};

void write_training_log_csv(const std::string& path, const TrainingLog& log,
                            const std::string& metadata);

using Batch = std::vector<std::pair<Vec, Vec>>;  // (x0, x1) pairs

Batch draw_batch(const PairedDataset& dataset, int batch_size, CounterRng& rng);

// Per-sample loss for one bridge draw, with the gradient of
// batch-mean loss accumulated into grad when it is non-null. Exposed so the
// loss at a pinned (t, z) is directly testable.
double bridge_sample_loss(const RegressorParams& eps, const ScheduleSpec& spec,
                          const Vec& x0, const Vec& x1, const Vec& xhat0, double t,
                          const Vec& z, double inv_batch, GradientBuffer* grad);

// One optimizer step on a batch: per sample draw t ~ U[t_min, 1] and
// z ~ N(0, I), build the bridge draw, regress on its target. Returns the batch
// loss (mean squared residual per component). bin_mse, when present, receives
// time_bins entries with NaN for bins the batch did not touch. mean, when
// non-null, supplies xhat0 = M(x1) and is never updated.
double nadb_training_step(RegressorParams& eps, const RegressorParams* mean,
                          const Batch& batch, const TrainConfig& cfg, AdamState& adam,
                          CounterRng& rng, Vec* bin_mse = nullptr);
double i2sb_training_step(RegressorParams& eps, const RegressorParams* mean,
                          const Batch& batch, const TrainConfig& cfg, AdamState& adam,
                          CounterRng& rng, Vec* bin_mse = nullptr);

// Fits M(x1) to x0 by MSE with Adam. The schedule inside cfg is not used.
RegressorParams train_mean_network(const PairedDataset& dataset, const TrainConfig& cfg,
                                   TrainingLog* log = nullptr);

// Trains one arm from scratch. cfg.bridge.kind must match the variant's
// formulation; mean is required exactly for the arms that use it.
std::pair<RegressorParams, TrainingLog> train_bridge(const PairedDataset& dataset,
                                                     const TrainConfig& cfg, Variant variant,
                                                     const RegressorParams* mean);

}  // namespace bridgelab
