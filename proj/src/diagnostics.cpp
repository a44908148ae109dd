#include "bridgelab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "bridgelab/bridge_sample.hpp"
#include "bridgelab/csv.hpp"

namespace bridgelab {

std::vector<ProbeRow> endpoint_probe(const Predictor& eps, const ScheduleSpec& spec,
                                     const PairedDataset& dataset,
                                     const std::vector<double>& t_grid, int samples_per_t,
                                     std::uint64_t seed, const Predictor* mean,
                                     int threads) {
  if (t_grid.empty()) throw std::invalid_argument("endpoint_probe: empty t grid");
  if (samples_per_t < 1) throw std::invalid_argument("endpoint_probe: samples_per_t < 1");
  for (double t : t_grid) {
    if (!(t > 0.0 && t < 1.0)) {
      throw std::domain_error("endpoint_probe: grid times must lie strictly inside (0, 1)");
    }
  }
  std::vector<ProbeRow> rows(t_grid.size());
  auto probe_one = [&](std::size_t j) {
    const double t = t_grid[j];
    CounterRng rng(seed, streams::kProbeBase + static_cast<std::uint64_t>(j));
    double pred_var = 0.0, target_var = 0.0, cos_sum = 0.0;
    Vec x0, x1, z;
    for (int i = 0; i < samples_per_t; ++i) {
      dataset.draw(rng, x0, x1);
      z.resize(x0.size());
      rng.fill_normal(z);
      const Vec xhat0 = mean ? (*mean)(x1, std::nullopt) : x1;
      const BridgeSample bs = make_bridge_sample(spec, t, x0, x1, xhat0, z);
      const Vec pred = eps(bs.xt, t);
      if (pred.size() != bs.yt.size()) {
        throw std::invalid_argument("endpoint_probe: predictor dimension mismatch");
      }
      pred_var += component_variance(pred);
      target_var += component_variance(bs.yt);
      cos_sum += cosine_similarity(pred, bs.yt);
    }
    ProbeRow row;
    row.t = t;
    row.pred_variance = pred_var / samples_per_t;
    row.target_variance = target_var / samples_per_t;
    row.cosine_similarity = cos_sum / samples_per_t;
    row.n_samples = samples_per_t;
    rows[j] = row;
  };
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(t_grid.size())));
  if (workers == 1) {
    for (std::size_t j = 0; j < t_grid.size(); ++j) probe_one(j);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = static_cast<std::size_t>(w); j < t_grid.size();
               j += static_cast<std::size_t>(workers)) {
            probe_one(j);
          }
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
  return rows;
}

std::vector<double> default_probe_grid() {
  return {1e-3, 2e-3, 5e-3, 0.01, 0.02, 0.05, 0.1, 0.2, 0.35, 0.5,
          0.65, 0.8,  0.9,  0.95, 0.98, 0.99, 0.995, 0.999};
}

std::vector<NoiseCurveRow> noise_curves(const ScheduleSpec& i2sb_spec,
                                        const ScheduleSpec& nadb_spec,
                                        const std::vector<double>& t_grid) {
  if (i2sb_spec.kind != BridgeKind::I2SB || nadb_spec.kind != BridgeKind::NADB) {
    throw std::invalid_argument("noise_curves needs one spec of each formulation");
  }
  std::vector<NoiseCurveRow> rows;
  rows.reserve(t_grid.size());
  for (double t : t_grid) {
    NoiseCurveRow row;
    row.t = t;
    row.i2sb_input = input_noise_coefficient(i2sb_spec, t);
    row.i2sb_target = target_noise_coefficient(i2sb_spec, t);
    row.nadb_input = input_noise_coefficient(nadb_spec, t);
    row.nadb_target = target_noise_coefficient(nadb_spec, t);
    rows.push_back(row);
  }
  return rows;
}

double w2_exact_1d(std::vector<double> samples_a, std::vector<double> samples_b) {
  if (samples_a.size() != samples_b.size() || samples_a.empty()) {
    throw std::invalid_argument("w2_exact_1d needs equal nonzero sample counts");
  }
  std::sort(samples_a.begin(), samples_a.end());
  std::sort(samples_b.begin(), samples_b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < samples_a.size(); ++i) {
    const double d = samples_a[i] - samples_b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(samples_a.size()));
}

Theorem1Result theorem1_check(const Predictor& mean_net, const PairedDataset& dataset_1d,
                              int n, std::uint64_t seed) {
  if (dataset_1d.dim != 1) {
    throw std::invalid_argument("theorem1_check needs a 1-D paired dataset");
  }
  constexpr int kBlocks = 10;
  if (n < 10 * kBlocks) throw std::invalid_argument("theorem1_check needs n >= 100");
  CounterRng rng(seed, streams::kEval);
  std::vector<double> a0(static_cast<std::size_t>(n)), a1(static_cast<std::size_t>(n)),
      ahat(static_cast<std::size_t>(n));
  Vec x0, x1;
  double mse_before = 0.0, mse_after = 0.0;
  for (int i = 0; i < n; ++i) {
    dataset_1d.draw(rng, x0, x1);
    const Vec m = mean_net(x1, std::nullopt);
    if (m.size() != 1) throw std::invalid_argument("theorem1_check: mean output not 1-D");
    a0[static_cast<std::size_t>(i)] = x0[0];
    a1[static_cast<std::size_t>(i)] = x1[0];
    ahat[static_cast<std::size_t>(i)] = m[0];
    mse_before += (x1[0] - x0[0]) * (x1[0] - x0[0]);
    mse_after += (m[0] - x0[0]) * (m[0] - x0[0]);
  }
  Theorem1Result r;
  r.mse_before = mse_before / n;
  r.mse_after = mse_after / n;
  r.w2_before = w2_exact_1d(a0, a1);
  r.w2_after = w2_exact_1d(a0, ahat);
  // Block-wise w2 differences estimate the sampling error of the comparison.
  const int block = n / kBlocks;
  std::vector<double> diffs;
  diffs.reserve(kBlocks);
  for (int b = 0; b < kBlocks; ++b) {
    const auto begin = static_cast<std::size_t>(b * block);
    const auto end = static_cast<std::size_t>(b == kBlocks - 1 ? n : (b + 1) * block);
    std::vector<double> b0(a0.begin() + begin, a0.begin() + end);
    std::vector<double> b1(a1.begin() + begin, a1.begin() + end);
    std::vector<double> bh(ahat.begin() + begin, ahat.begin() + end);
    diffs.push_back(w2_exact_1d(b0, bh) - w2_exact_1d(b0, b1));
  }
  const double dm = mean(diffs);
  double var = 0.0;
  for (double d : diffs) var += (d - dm) * (d - dm);
  var /= static_cast<double>(diffs.size() - 1);
  r.se_diff = std::sqrt(var / diffs.size());
  r.holds = r.w2_after <= r.w2_before + 3.0 * r.se_diff;
  return r;
}

RestorationMetrics restoration_metrics(const std::vector<Vec>& reference,
                                       const std::vector<Vec>& output) {
  if (reference.size() != output.size() || reference.empty()) {
    throw std::invalid_argument("restoration_metrics needs matched nonempty sample sets");
  }
  double mse = 0.0, mse_clipped = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i].size() != output[i].size()) {
      throw std::invalid_argument("restoration_metrics: shape mismatch at row " +
                                  std::to_string(i));
    }
    for (std::size_t j = 0; j < reference[i].size(); ++j) {
      const double d = output[i][j] - reference[i][j];
      mse += d * d;
      const double dc = std::clamp(output[i][j], 0.0, 1.0) -
                        std::clamp(reference[i][j], 0.0, 1.0);
      mse_clipped += dc * dc;
      ++count;
    }
  }
  mse /= static_cast<double>(count);
  mse_clipped /= static_cast<double>(count);
  RestorationMetrics m;
  m.mse = mse;
  m.psnr_toy = mse_clipped < 1e-12 ? std::numeric_limits<double>::infinity()
                                   : 10.0 * std::log10(1.0 / mse_clipped);
  return m;
}

void write_probe_csv(const std::string& path, const std::vector<ProbeRow>& rows,
                     const std::string& metadata) {
  CsvWriter csv(path, metadata,
                {"t", "pred_variance", "target_variance", "cosine_similarity", "n_samples"});
  for (const ProbeRow& r : rows) {
    csv.row({r.t, r.pred_variance, r.target_variance, r.cosine_similarity, r.n_samples});
  }
  csv.close();
}

void write_noise_curves_csv(const std::string& path, const std::vector<NoiseCurveRow>& rows,
                            const std::string& metadata) {
  CsvWriter csv(path, metadata, {"t", "i2sb_input", "i2sb_target", "nadb_input", "nadb_target"});
  for (const NoiseCurveRow& r : rows) {
    csv.row({r.t, r.i2sb_input, r.i2sb_target, r.nadb_input, r.nadb_target});
  }
  csv.close();
}

void write_theorem1_csv(const std::string& path, const Theorem1Result& result,
                        const std::string& metadata) {
  CsvWriter csv(path, metadata,
                {"w2_before", "w2_after", "mse_before", "mse_after", "se_diff", "holds"});
  csv.row({result.w2_before, result.w2_after, result.mse_before, result.mse_after,
           result.se_diff, result.holds ? 1.0 : 0.0});
  csv.close();
}

void write_metrics_csv(const std::string& path, const RestorationMetrics& metrics,
                       const std::string& metadata) {
  CsvWriter csv(path, metadata, {"mse", "psnr_toy"});
  csv.row({metrics.mse, metrics.psnr_toy});
  csv.close();
}

}  // namespace bridgelab
