#include "bridgelab/sampler.hpp"

#include <cmath>
#include <memory>
#include <thread>

#include "bridgelab/csv.hpp"

namespace bridgelab {

namespace {

constexpr double kRadicandTolerance = 1e-12;

void check_step_times(double s, double t) {
  if (!(s >= 0.0 && s <= t && t <= 1.0)) {
    throw std::domain_error("sampler step needs 0 <= s <= t <= 1");
  }
}

void check_step_dims(const Vec& xt, const Vec& eps, const Vec& z) {
  if (xt.empty() || xt.size() != eps.size() || xt.size() != z.size()) {
    throw std::invalid_argument("sampler step vectors must share one nonempty dimension");
  }
}

double sqrt_clamped(double radicand, const char* what) {
  if (radicand < -kRadicandTolerance) {
    throw std::domain_error(std::string(what) + ": negative noise radicand " +
                            std::to_string(radicand));
  }
  return radicand > 0.0 ? std::sqrt(radicand) : 0.0;
}

}  // namespace

Predictor make_net_predictor(RegressorParams params) {
  auto shared = std::make_shared<const RegressorParams>(std::move(params));
  return [shared](const Vec& x, std::optional<double> t) {
    return forward(*shared, x, t, nullptr);
  };
}

Predictor make_oracle_predictor(ScheduleSpec spec, Vec x0) {
  auto shared = std::make_shared<const Vec>(std::move(x0));
  return [spec, shared](const Vec& x, std::optional<double> t) {
    if (!t.has_value()) throw std::invalid_argument("oracle predictor needs a time");
    const double scale = spec.kind == BridgeKind::NADB
                             ? pow_alpha(*t, spec.alpha)
                             : std::sqrt(spec.sigma2(*t));
    if (!(scale > 0.0)) {
      throw std::domain_error("oracle predictor undefined at t = " + std::to_string(*t));
    }
    Vec out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - (*shared)[i]) / scale;
    return out;
  };
}

WRule parse_w_rule(const std::string& name) {
  if (name == "ratio") return WRule::Ratio;
  if (name == "constant") return WRule::Constant;
  if (name == "deterministic") return WRule::Deterministic;
  throw ConfigError("unknown w_rule '" + name +
                    "' (expected ratio, constant, or deterministic)");
}

double stage_threshold(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  return (1.0 - alpha) / (2.0 - alpha);
}

SamplerPlan make_sampler_plan(const ScheduleSpec& spec, int nfe,
                              std::optional<double> d_override, WRule w_rule,
                              double w_constant) {
  if (nfe < 1) throw std::invalid_argument("nfe must be >= 1");
  if (!(w_constant >= 0.0) || !std::isfinite(w_constant)) {
    throw std::invalid_argument("w_constant must be finite and >= 0");
  }
  SamplerPlan plan;
  plan.spec = spec;
  plan.w_rule = w_rule;
  plan.w_constant = w_constant;
  plan.grid.resize(static_cast<std::size_t>(nfe) + 1);
  for (int i = 0; i <= nfe; ++i) {
    plan.grid[static_cast<std::size_t>(i)] =
        static_cast<double>(i) / static_cast<double>(nfe);
  }
  if (spec.kind == BridgeKind::NADB) {
    const double threshold = stage_threshold(spec.alpha);
    plan.d = d_override.value_or(threshold);
    if (plan.d < threshold - 1e-12 || plan.d > 1.0) {
      throw std::invalid_argument("stage switch d must lie in [(1-alpha)/(2-alpha), 1]");
    }
  } else {
    plan.d = 0.0;
  }
  return plan;
}

double stage1_sigma(const ScheduleSpec& spec, double s, double t) {
  const double a = spec.k * s * (1.0 - s);
  const double b = spec.k * pow_alpha(s, spec.alpha) * pow_alpha(t, 1.0 - spec.alpha) *
                   (1.0 - t);
  return sqrt_clamped(a * a - b * b, "stage1_step");
}

double stage2_sigma(const ScheduleSpec& spec, double s, double t, double w) {
  const double a = spec.k * s * (1.0 - s);
  const double b = spec.k * w * t * (1.0 - t);
  return sqrt_clamped(a * a - b * b, "stage2_step");
}

Vec stage1_step(const ScheduleSpec& spec, double s, double t, const Vec& xt,
                const Vec& eps, const Vec& z) {
  if (spec.kind != BridgeKind::NADB) {
    throw std::invalid_argument("stage1_step requires the noise-aligned formulation");
  }
  check_step_times(s, t);
  check_step_dims(xt, eps, z);
  if (s == t) return xt;
  if (s < stage_threshold(spec.alpha) - 1e-12) {
    throw std::domain_error("stage1_step: destination time " + std::to_string(s) +
                            " is below the validity threshold " +
                            std::to_string(stage_threshold(spec.alpha)));
  }
  const double delta = pow_alpha(t, spec.alpha) - pow_alpha(s, spec.alpha);
  const double sigma = stage1_sigma(spec, s, t);
  Vec out(xt.size());
  for (std::size_t i = 0; i < xt.size(); ++i) {
    out[i] = xt[i] - eps[i] * delta + sigma * z[i];
  }
  return out;
}

Vec stage2_step(const ScheduleSpec& spec, double s, double t, const Vec& xt,
                const Vec& eps, const Vec& xhat0, double w, const Vec& z) {
  if (spec.kind != BridgeKind::NADB) {
    throw std::invalid_argument("stage2_step requires the noise-aligned formulation");
  }
  check_step_times(s, t);
  check_step_dims(xt, eps, z);
  if (xhat0.size() != xt.size()) {
    throw std::invalid_argument("stage2_step: xhat0 dimension mismatch");
  }
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw std::domain_error("stage2_step: w must be finite and >= 0");
  }
  if (s == t) return xt;
  if (!(t > 0.0)) throw std::domain_error("stage2_step needs t > 0");
  const double ta = pow_alpha(t, spec.alpha);
  const double sa = pow_alpha(s, spec.alpha);
  const double a = ta * (w + sa - 1.0 - w * ta);
  const double b = sa - 1.0 - w * ta;
  const double c = sa - w * ta;
  const double sigma = stage2_sigma(spec, s, t, w);
  Vec out(xt.size());
  for (std::size_t i = 0; i < xt.size(); ++i) {
    out[i] = a * eps[i] - b * xt[i] + c * xhat0[i] + sigma * z[i];
  }
  return out;
}

Vec i2sb_reverse_step(const ScheduleSpec& spec, double s, double t, const Vec& xt,
                      const Vec& eps, const Vec& z) {
  if (spec.kind != BridgeKind::I2SB) {
    throw std::invalid_argument("i2sb_reverse_step requires an I2SB schedule");
  }
  check_step_times(s, t);
  check_step_dims(xt, eps, z);
  if (s == t) return xt;
  const double sig2_t = spec.sigma2(t);
  if (!(sig2_t > 0.0)) {
    throw std::domain_error("i2sb_reverse_step needs sigma2(t) > 0");
  }
  const double sig2_s = spec.sigma2(s);
  const double sigma_t = std::sqrt(sig2_t);
  const double r = sig2_s / sig2_t;
  const double sigma = sqrt_clamped(sig2_s * (sig2_t - sig2_s) / sig2_t, "i2sb_reverse_step");
  Vec out(xt.size());
  for (std::size_t i = 0; i < xt.size(); ++i) {
    const double x0p = xt[i] - sigma_t * eps[i];
    out[i] = x0p + r * (xt[i] - x0p) + sigma * z[i];
  }
  return out;
}

namespace {

double w_for_step(const SamplerPlan& plan, double s, double t) {
  switch (plan.w_rule) {
    case WRule::Ratio:
      return s / t;
    case WRule::Constant:
      return plan.w_constant;
    case WRule::Deterministic: {
      const double denom = t * (1.0 - t);
      if (!(denom > 0.0)) {
        throw std::domain_error("deterministic w rule is undefined at t = " +
                                std::to_string(t));
      }
      return s * (1.0 - s) / denom;
    }
  }
  throw std::logic_error("unreachable w rule");
}

}  // namespace

TrajectoryRecord generate(const SamplerPlan& plan, const Predictor& eps,
                          const Predictor* mean, const Vec& x1, CounterRng& rng) {
  if (x1.empty()) throw std::invalid_argument("generate: empty input");
  const ScheduleSpec& spec = plan.spec;
  const bool nadb = spec.kind == BridgeKind::NADB;
  const Vec xhat0 = mean ? (*mean)(x1, std::nullopt) : x1;
  if (xhat0.size() != x1.size()) {
    throw std::invalid_argument("generate: endpoint-mean output dimension mismatch");
  }
  TrajectoryRecord record;
  record.steps.reserve(plan.grid.size() - 1);
  Vec state = xhat0;
  Vec z(x1.size());
  for (std::size_t n = plan.grid.size() - 1; n > 0; --n) {
    const double t = plan.grid[n];
    const double s = plan.grid[n - 1];
    if (!all_finite(state)) {
      throw DivergenceError("sampler state diverged before the step to t = " +
                            std::to_string(s));
    }
    const Vec e = eps(state, t);
    if (e.size() != state.size() || !all_finite(e)) {
      throw DivergenceError("predictor output invalid at t = " + std::to_string(t));
    }
    TrajectoryStep step;
    step.t = s;
    step.x0_pred = predict_x0(spec, t, state, e);
    rng.fill_normal(z);
    if (!nadb) {
      step.stage = 0;
      step.sigma = sqrt_clamped(
          spec.sigma2(s) * (spec.sigma2(t) - spec.sigma2(s)) / spec.sigma2(t),
          "i2sb_reverse_step");
      state = i2sb_reverse_step(spec, s, t, state, e, z);
    } else if (s < plan.d) {
      const double w = w_for_step(plan, s, t);
      step.stage = 2;
      step.sigma = stage2_sigma(spec, s, t, w);
      state = stage2_step(spec, s, t, state, e, xhat0, w, z);
    } else {
      step.stage = 1;
      step.sigma = stage1_sigma(spec, s, t);
      state = stage1_step(spec, s, t, state, e, z);
    }
    step.state = state;
    record.steps.push_back(std::move(step));
  }
  if (!all_finite(state)) {
    throw DivergenceError("sampler state diverged at the final step");
  }
  record.final_state = state;
  return record;
}

void write_trajectory_csv(const std::string& path, const TrajectoryRecord& record,
                          const std::string& metadata) {
  CsvWriter csv(path, metadata, {"step", "t", "stage", "sigma", "state_norm", "x0_pred_norm"});
  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    const TrajectoryStep& s = record.steps[i];
    csv.row({static_cast<double>(i), s.t, static_cast<double>(s.stage), s.sigma,
             norm(s.state), norm(s.x0_pred)});
  }
  csv.close();
}

SampleRun run_sampling(const SamplerPlan& plan, const Predictor& eps, const Predictor* mean,
                       const PairedDataset& dataset, int n, std::uint64_t seed,
                       int threads, bool oracle_eps) {
  if (n < 1) throw std::invalid_argument("run_sampling needs n >= 1");
  SampleRun run;
  run.references.resize(static_cast<std::size_t>(n));
  run.inputs.resize(static_cast<std::size_t>(n));
  run.outputs.resize(static_cast<std::size_t>(n));
  CounterRng draw_rng(seed, streams::kEval);
  for (int i = 0; i < n; ++i) {
    dataset.draw(draw_rng, run.references[static_cast<std::size_t>(i)],
                 run.inputs[static_cast<std::size_t>(i)]);
  }
  const int workers = std::max(1, std::min(threads, n));
  std::vector<TrajectoryRecord> first(1);
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const std::size_t idx = static_cast<std::size_t>(i);
      CounterRng rng(seed, streams::kTrajectoryBase + static_cast<std::uint64_t>(i));
      const Predictor local_oracle =
          oracle_eps ? make_oracle_predictor(plan.spec, run.references[idx]) : Predictor();
      TrajectoryRecord rec =
          generate(plan, oracle_eps ? local_oracle : eps, mean, run.inputs[idx], rng);
      run.outputs[idx] = rec.final_state;
      if (i == 0) first[0] = std::move(rec);
    }
  };
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    const int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int begin = w * chunk;
      const int end = std::min(n, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end, w] {
        try {
          work(begin, end);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& err : errors) {
      if (err) std::rethrow_exception(err);
    }
  }
  run.first_trajectory = std::move(first[0]);
  return run;
}

}  // namespace bridgelab
