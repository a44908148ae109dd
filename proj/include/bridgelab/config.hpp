#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bridgelab/schedule.hpp"
#include "bridgelab/tasks.hpp"
#include "bridgelab/training.hpp"

namespace bridgelab {

// Flat key = value run description. `task` and `variant` are required; every
// other key falls back to the default below. Unknown keys are rejected.
//
//   task = gauss_channel | patch_blur | patch_quantize | clusters2d   (required)
//   variant = i2sb | nadb | i2sb-mean | nadb-nomean                   (required)
//   kind = i2sb | nadb          optional, must agree with variant when present
//   task.dim = 1                gauss_channel width
//   task.noise_sigma = 1.0      gauss_channel noise level
//   task.patch_side = 8         patch tasks
//   task.kernel = uniform3 | gaussian3
//   task.levels = 4             patch_quantize
//   task.modes = 4              clusters2d
//   alpha = 0.4                 endpoint sharpness
//   k = 0.75 | auto             noise amplitude; auto calibrates from the schedule
//   beta.shape = triangular
//   beta.total_variance = 1.0
//   t_min = 1e-4
//   train.batch_size = 32
//   train.steps = 20000
//   train.mean_steps = 10000
//   train.lr = 1e-4
//   train.time_bins = 20
//   sampler.nfe = 10
//   sampler.d = auto | float    stage switch time
//   sampler.w_rule = ratio | constant | deterministic
//   sampler.w_constant = 0.5
//   sample.count = 512          held-out pairs for sample/metrics runs
//   diag.samples_per_t = 256    draws per probe grid point
//   sweep.alphas = 0.3,0.4,0.5
struct RunConfig {
  std::string task;
  std::string variant;
  std::optional<std::string> kind;

  int task_dim = 1;
  double noise_sigma = 1.0;
  int patch_side = 8;
  std::string kernel = "uniform3";
  int levels = 4;
  int modes = 4;

  double alpha = 0.4;
  bool k_auto = false;
  double k = 0.75;
  std::string beta_shape = "triangular";
  double beta_total_variance = 1.0;
  double t_min = 1e-4;

  int batch_size = 32;
  int steps = 20000;
  int mean_steps = 10000;
  double lr = 1e-4;
  int time_bins = 20;

  int nfe = 10;
  std::optional<double> sampler_d;
  std::string w_rule = "ratio";
  double w_constant = 0.5;

  int sample_count = 512;
  int diag_samples_per_t = 256;
  std::string sweep_alphas = "0.3,0.4,0.5";
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

// Effective configuration rendered as sorted key = value lines; two configs
// hash equal exactly when every effective value matches.
std::string canonical_config_text(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex8(const RunConfig& cfg);

PairedDataset make_task(const RunConfig& cfg);
ScheduleSpec i2sb_spec_from(const RunConfig& cfg);
ScheduleSpec nadb_spec_from(const RunConfig& cfg);  // resolves k = auto via calibration
ScheduleSpec schedule_for_variant(const RunConfig& cfg, Variant variant);

TrainConfig bridge_train_config(const RunConfig& cfg, Variant variant, std::uint64_t seed);
TrainConfig mean_train_config(const RunConfig& cfg, std::uint64_t seed);

std::vector<double> parse_alpha_list(const std::string& text);

}  // namespace bridgelab
