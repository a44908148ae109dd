#include "bridgelab/training.hpp"

#include <cmath>
#include <limits>

#include "bridgelab/csv.hpp"

namespace bridgelab {

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (cfg.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(cfg.lr > 0.0) || !std::isfinite(cfg.lr)) {
    throw std::invalid_argument("lr must be positive and finite");
  }
  if (!(cfg.t_min >= 0.0 && cfg.t_min <= 0.01)) {
    throw std::invalid_argument("t_min must lie in [0, 0.01]");
  }
  if (cfg.time_bins < 2) throw std::invalid_argument("time_bins must be >= 2");
}

bool variant_uses_mean(Variant v) {
  return v == Variant::Nadb || v == Variant::I2sbWithMean;
}

BridgeKind variant_kind(Variant v) {
  return (v == Variant::Nadb || v == Variant::NadbNoMean) ? BridgeKind::NADB
                                                          : BridgeKind::I2SB;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::I2sb: return "i2sb";
    case Variant::Nadb: return "nadb";
    case Variant::I2sbWithMean: return "i2sb-mean";
    case Variant::NadbNoMean: return "nadb-nomean";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  if (name == "i2sb") return Variant::I2sb;
  if (name == "nadb") return Variant::Nadb;
  if (name == "i2sb-mean") return Variant::I2sbWithMean;
  if (name == "nadb-nomean") return Variant::NadbNoMean;
  throw ConfigError("unknown variant '" + name +
                    "' (expected i2sb, nadb, i2sb-mean, or nadb-nomean)");
}

void write_training_log_csv(const std::string& path, const TrainingLog& log,
                            const std::string& metadata) {
  std::vector<std::string> header = {"step", "loss"};
  for (int b = 0; b < log.time_bins; ++b) header.push_back("bin_" + std::to_string(b));
  CsvWriter csv(path, metadata, header);
  for (std::size_t s = 0; s < log.loss.size(); ++s) {
    std::vector<double> row;
    row.reserve(header.size());
    row.push_back(static_cast<double>(s));
    row.push_back(log.loss[s]);
    for (double v : log.bin_mse[s]) row.push_back(v);
    csv.row(row);
  }
  csv.close();
}

Batch draw_batch(const PairedDataset& dataset, int batch_size, CounterRng& rng) {
  Batch batch(static_cast<std::size_t>(batch_size));
  for (auto& [x0, x1] : batch) dataset.draw(rng, x0, x1);
  return batch;
}

double bridge_sample_loss(const RegressorParams& eps, const ScheduleSpec& spec,
                          const Vec& x0, const Vec& x1, const Vec& xhat0, double t,
                          const Vec& z, double inv_batch, GradientBuffer* grad) {
  const BridgeSample bs = make_bridge_sample(spec, t, x0, x1, xhat0, z);
  ForwardTape tape;
  const Vec out = forward(eps, bs.xt, t, grad ? &tape : nullptr);
  const std::size_t d = out.size();
  double loss = 0.0;
  Vec ograd(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double r = out[i] - bs.yt[i];
    loss += r * r;
    ograd[i] = 2.0 * r * inv_batch / static_cast<double>(d);
  }
  loss /= static_cast<double>(d);
  if (grad) backward_accumulate(eps, tape, ograd, *grad);
  return loss;
}

namespace {

double bridge_step(RegressorParams& eps, const RegressorParams* mean, const Batch& batch,
                   const TrainConfig& cfg, AdamState& adam, CounterRng& rng,
                   Vec* bin_mse, BridgeKind kind) {
  if (cfg.bridge.kind != kind) {
    throw std::invalid_argument("training step formulation does not match cfg.bridge.kind");
  }
  if (batch.empty()) throw std::invalid_argument("training step needs a nonempty batch");
  static thread_local GradientBuffer grad;
  if (grad.weights.size() != eps.layer_count() ||
      (eps.layer_count() > 0 && grad.weights[0].size() != eps.weights[0].size())) {
    grad = GradientBuffer::zeros_like(eps);
  } else {
    grad.reset();
  }
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  const int bins = cfg.time_bins;
  Vec bin_sum(static_cast<std::size_t>(bins), 0.0);
  std::vector<int> bin_count(static_cast<std::size_t>(bins), 0);
  double loss = 0.0;
  Vec z;
  for (const auto& [x0, x1] : batch) {
    const double t = cfg.t_min + (1.0 - cfg.t_min) * rng.uniform();
    z.resize(x0.size());
    rng.fill_normal(z);
    const Vec xhat0 = mean ? forward(*mean, x1, std::nullopt) : x1;
    const double sample_loss =
        bridge_sample_loss(eps, cfg.bridge, x0, x1, xhat0, t, z, inv_batch, &grad);
    loss += sample_loss;
    const int b = std::min(bins - 1, static_cast<int>(t * bins));
    bin_sum[static_cast<std::size_t>(b)] += sample_loss;
    bin_count[static_cast<std::size_t>(b)] += 1;
  }
  loss *= inv_batch;
  if (!std::isfinite(loss)) throw DivergenceError("non-finite training loss");
  adam_step(eps, grad, adam, cfg.lr);
  if (bin_mse) {
    bin_mse->assign(static_cast<std::size_t>(bins),
                    std::numeric_limits<double>::quiet_NaN());
    for (int b = 0; b < bins; ++b) {
      if (bin_count[static_cast<std::size_t>(b)] > 0) {
        (*bin_mse)[static_cast<std::size_t>(b)] =
            bin_sum[static_cast<std::size_t>(b)] / bin_count[static_cast<std::size_t>(b)];
      }
    }
  }
  return loss;
}

}  // namespace

double nadb_training_step(RegressorParams& eps, const RegressorParams* mean,
                          const Batch& batch, const TrainConfig& cfg, AdamState& adam,
                          CounterRng& rng, Vec* bin_mse) {
  return bridge_step(eps, mean, batch, cfg, adam, rng, bin_mse, BridgeKind::NADB);
}

double i2sb_training_step(RegressorParams& eps, const RegressorParams* mean,
                          const Batch& batch, const TrainConfig& cfg, AdamState& adam,
                          CounterRng& rng, Vec* bin_mse) {
  return bridge_step(eps, mean, batch, cfg, adam, rng, bin_mse, BridgeKind::I2SB);
}

RegressorParams train_mean_network(const PairedDataset& dataset, const TrainConfig& cfg,
                                   TrainingLog* log) {
  validate(cfg);
  if (!dataset.draw || dataset.dim <= 0) {
    throw std::invalid_argument("train_mean_network: empty dataset");
  }
  CounterRng init_rng(cfg.seed, streams::kMeanInit);
  RegressorParams net = make_mean_network(dataset.dim, init_rng);
  AdamState adam = AdamState::zeros_like(net);
  GradientBuffer grad = GradientBuffer::zeros_like(net);
  CounterRng rng(cfg.seed, streams::kMeanBatches);
  if (log) {
    log->time_bins = 0;
    log->loss.clear();
    log->bin_mse.clear();
  }
  const double inv_batch = 1.0 / static_cast<double>(cfg.batch_size);
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = draw_batch(dataset, cfg.batch_size, rng);
    grad.reset();
    double loss = 0.0;
    for (const auto& [x0, x1] : batch) {
      ForwardTape tape;
      const Vec out = forward(net, x1, std::nullopt, &tape);
      const std::size_t d = out.size();
      Vec ograd(d);
      for (std::size_t i = 0; i < d; ++i) {
        const double r = out[i] - x0[i];
        loss += r * r / static_cast<double>(d);
        ograd[i] = 2.0 * r * inv_batch / static_cast<double>(d);
      }
      backward_accumulate(net, tape, ograd, grad);
    }
    loss *= inv_batch;
    if (!std::isfinite(loss)) {
      throw DivergenceError("non-finite mean-network loss at step " + std::to_string(step));
    }
    adam_step(net, grad, adam, cfg.lr);
    if (log) {
      log->loss.push_back(loss);
      log->bin_mse.emplace_back();
    }
  }
  return net;
}

std::pair<RegressorParams, TrainingLog> train_bridge(const PairedDataset& dataset,
                                                     const TrainConfig& cfg, Variant variant,
                                                     const RegressorParams* mean) {
  validate(cfg);
  if (!dataset.draw || dataset.dim <= 0) {
    throw std::invalid_argument("train_bridge: empty dataset");
  }
  if (cfg.bridge.kind != variant_kind(variant)) {
    throw ConfigError(std::string("variant ") + variant_name(variant) +
                      " does not match the configured bridge formulation");
  }
  if (variant_uses_mean(variant) && mean == nullptr) {
    throw ConfigError(std::string("variant ") + variant_name(variant) +
                      " needs a trained endpoint-mean network");
  }
  if (!variant_uses_mean(variant)) mean = nullptr;
  if (mean && mean->data_dim() != dataset.dim) {
    throw ConfigError("endpoint-mean network dimension does not match the task");
  }
  CounterRng init_rng(cfg.seed, streams::kEpsInit);
  RegressorParams eps = make_eps_network(dataset.dim, init_rng);
  AdamState adam = AdamState::zeros_like(eps);
  CounterRng rng(cfg.seed, streams::kBridgeBatches);
  TrainingLog log;
  log.time_bins = cfg.time_bins;
  log.loss.reserve(static_cast<std::size_t>(cfg.steps));
  log.bin_mse.reserve(static_cast<std::size_t>(cfg.steps));
  const bool nadb = variant_kind(variant) == BridgeKind::NADB;
  for (int step = 0; step < cfg.steps; ++step) {
    const Batch batch = draw_batch(dataset, cfg.batch_size, rng);
    Vec bin_mse;
    double loss;
    try {
      loss = nadb ? nadb_training_step(eps, mean, batch, cfg, adam, rng, &bin_mse)
                  : i2sb_training_step(eps, mean, batch, cfg, adam, rng, &bin_mse);
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " at step " + std::to_string(step));
    }
    log.loss.push_back(loss);
    log.bin_mse.push_back(std::move(bin_mse));
  }
  return {std::move(eps), std::move(log)};
}

}  // namespace bridgelab
