#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "bridgelab/bridge_sample.hpp"
#include "bridgelab/regressor.hpp"
#include "bridgelab/tasks.hpp"

namespace bridgelab {

// The reverse sampler only needs a residual estimate at (x, t); a trained net
// and an analytic stand-in both fit this shape.
using Predictor = std::function<Vec(const Vec& x, std::optional<double> t)>;

Predictor make_net_predictor(RegressorParams params);

// Emits the exact residual (xt - x0) / scale(t) for a known clean vector;
// with it the sampler must reproduce the bridge marginals exactly.
Predictor make_oracle_predictor(ScheduleSpec spec, Vec x0);

enum class WRule { Ratio, Constant, Deterministic };

WRule parse_w_rule(const std::string& name);

// Destination times below d take the anchored update (which stays valid down
// to t = 0), the rest take the drift update. d defaults to the validity
// threshold (1 - alpha) / (2 - alpha) of the drift form.
double stage_threshold(double alpha);

struct SamplerPlan {
  ScheduleSpec spec;
  std::vector<double> grid;  // 0 = t_0 < ... < t_N = 1
  double d = 0.0;            // stage switch time; unused for I2SB
  WRule w_rule = WRule::Ratio;
  double w_constant = 0.5;
};

SamplerPlan make_sampler_plan(const ScheduleSpec& spec, int nfe,
                              std::optional<double> d_override = std::nullopt,
                              WRule w_rule = WRule::Ratio, double w_constant = 0.5);

// Noise amplitudes of the two update forms; both clamp roundoff-negative
// radicands to zero and reject radicands below -1e-12.
double stage1_sigma(const ScheduleSpec& spec, double s, double t);
double stage2_sigma(const ScheduleSpec& spec, double s, double t, double w);

// Drift update from time t down to s >= stage_threshold(alpha) - 1e-12:
//   x_s = x_t - eps * (t^a - s^a) + stage1_sigma * z.
// s == t returns xt unchanged.
Vec stage1_step(const ScheduleSpec& spec, double s, double t, const Vec& xt,
                const Vec& eps, const Vec& z);

// Anchored update, valid on all of [0, 1]:
//   x_s = a * eps - b * x_t + c * xhat0 + stage2_sigma * z
// with a = t^a (w + s^a - 1 - w t^a), b = s^a - 1 - w t^a, c = s^a - w t^a.
// s == t returns xt unchanged; s = 0, w = 0 reduces to the x0 prediction.
Vec stage2_step(const ScheduleSpec& spec, double s, double t, const Vec& xt,
                const Vec& eps, const Vec& xhat0, double w, const Vec& z);

// Brownian-bridge posterior step of the I2SB baseline:
//   x_s ~ N(x0p + (sig2_s / sig2_t)(x_t - x0p), sig2_s (sig2_t - sig2_s) / sig2_t)
// with x0p the x0 prediction at t. s == t returns xt unchanged.
Vec i2sb_reverse_step(const ScheduleSpec& spec, double s, double t, const Vec& xt,
                      const Vec& eps, const Vec& z);

struct TrajectoryStep {
  double t = 0.0;  // destination time of the step
  int stage = 0;   // 1 or 2 for the two-stage sampler, 0 for the baseline
  double sigma = 0.0;
  Vec state;
  Vec x0_pred;  // prediction made at the step's source time
};

struct TrajectoryRecord {
  std::vector<TrajectoryStep> steps;
  Vec final_state;
};

// Runs the reverse chain from the far endpoint at t = 1 down the plan's grid.
// mean, when present, supplies the clean-endpoint estimate xhat0 = M(x1) that
// both seeds the chain and anchors the stage-2 updates; otherwise x1 itself
// does. Aborts with DivergenceError naming the step if the state leaves
// finite range.
TrajectoryRecord generate(const SamplerPlan& plan, const Predictor& eps,
                          const Predictor* mean, const Vec& x1, CounterRng& rng);

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record,
                          const std::string& metadata);

struct SampleRun {
  std::vector<Vec> references;  // x0
  std::vector<Vec> inputs;      // x1
  std::vector<Vec> outputs;     // generated
  TrajectoryRecord first_trajectory;
};

// Draws n held-out pairs, then runs one trajectory per pair on per-sample
// rng streams (stream id = trajectory base + index), so results do not depend
// on the thread count. oracle_eps replaces the predictor with the exact
// residual built from each sample's own reference.
SampleRun run_sampling(const SamplerPlan& plan, const Predictor& eps, const Predictor* mean,
                       const PairedDataset& dataset, int n, std::uint64_t seed,
                       int threads = 1, bool oracle_eps = false);

}  // namespace bridgelab
