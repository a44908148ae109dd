#include "bridgelab/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>

#include "bridgelab/config.hpp"
#include "bridgelab/csv.hpp"
#include "bridgelab/dataset_io.hpp"
#include "bridgelab/diagnostics.hpp"
#include "bridgelab/sampler.hpp"
#include "bridgelab/training.hpp"

namespace bridgelab {

namespace {

namespace fs = std::filesystem;

int worker_threads() {
  if (const char* env = std::getenv("BRIDGELAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 256) {
      throw ConfigError("BRIDGELAB_THREADS must be an integer in [1, 256]");
    }
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "run configuration file")->required();
  cmd->add_option("--out", args->out_dir, "output directory (created if missing)");
  cmd->add_option("--seed", args->seed, "base seed for every random stream");
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

std::string run_metadata(const RunConfig& cfg, std::uint64_t seed) {
  return "config_hash=" + config_hash_hex8(cfg) + " seed=" + std::to_string(seed);
}

std::string mean_checkpoint_path(const std::string& out_dir) {
  return out_dir + "/mean.ckpt";
}

std::string eps_checkpoint_path(const std::string& out_dir, Variant variant) {
  return std::string(out_dir) + "/eps_" + variant_name(variant) + ".ckpt";
}

RegressorParams load_required_checkpoint(const std::string& path, const char* role) {
  if (!fs::exists(path)) {
    throw ConfigError(std::string(role) + " checkpoint not found at " + path +
                      " (train it first or pass the path explicitly)");
  }
  return load_checkpoint(path);
}

Variant resolve_variant(const RunConfig& cfg, const std::string& override_name) {
  return parse_variant(override_name.empty() ? cfg.variant : override_name);
}

// Returns the mean predictor when the arm calls for one, else null.
std::optional<Predictor> mean_predictor_for(const RunConfig& cfg, Variant variant,
                                            const std::string& out_dir,
                                            const std::string& override_path) {
  if (!variant_uses_mean(variant)) return std::nullopt;
  const std::string path =
      override_path.empty() ? mean_checkpoint_path(out_dir) : override_path;
  RegressorParams params = load_required_checkpoint(path, "endpoint-mean");
  const PairedDataset task = make_task(cfg);
  if (params.data_dim() != task.dim) {
    throw ConfigError("endpoint-mean checkpoint dimension " +
                      std::to_string(params.data_dim()) + " does not match task dim " +
                      std::to_string(task.dim));
  }
  return make_net_predictor(std::move(params));
}

int cmd_train_mean(const CommonArgs& args) {
  const RunConfig cfg = load_config(args.config_path);
  ensure_out_dir(args.out_dir);
  const PairedDataset task = make_task(cfg);
  const TrainConfig tc = mean_train_config(cfg, args.seed);
  TrainingLog log;
  const RegressorParams net = train_mean_network(task, tc, &log);
  const std::string path = mean_checkpoint_path(args.out_dir);
  save_checkpoint(path, net);
  std::cout << "trained endpoint-mean network on " << task.name << " for " << tc.steps
            << " steps\n"
            << "first loss " << format_double(log.loss.front()) << ", final loss "
            << format_double(log.loss.back()) << "\n"
            << "checkpoint " << path << "\n";
  return 0;
}

int cmd_train_bridge(const CommonArgs& args, const std::string& variant_override,
                     const std::string& mean_override) {
  const RunConfig cfg = load_config(args.config_path);
  ensure_out_dir(args.out_dir);
  const Variant variant = resolve_variant(cfg, variant_override);
  const PairedDataset task = make_task(cfg);
  const TrainConfig tc = bridge_train_config(cfg, variant, args.seed);
  std::optional<RegressorParams> mean;
  if (variant_uses_mean(variant)) {
    const std::string path =
        mean_override.empty() ? mean_checkpoint_path(args.out_dir) : mean_override;
    mean = load_required_checkpoint(path, "endpoint-mean");
  }
  auto [eps, log] = train_bridge(task, tc, variant, mean ? &*mean : nullptr);
  const std::string ckpt = eps_checkpoint_path(args.out_dir, variant);
  save_checkpoint(ckpt, eps);
  const std::string log_path =
      args.out_dir + "/train_log_" + variant_name(variant) + ".csv";
  write_training_log_csv(log_path, log,
                         run_metadata(cfg, args.seed) + " variant=" + variant_name(variant));
  std::cout << "trained " << variant_name(variant) << " arm on " << task.name << " for "
            << tc.steps << " steps\n"
            << "first loss " << format_double(log.loss.front()) << ", final loss "
            << format_double(log.loss.back()) << "\n"
            << "checkpoint " << ckpt << "\ntraining log " << log_path << "\n";
  return 0;
}

SamplerPlan plan_from(const RunConfig& cfg, Variant variant, int nfe_override) {
  const ScheduleSpec spec = schedule_for_variant(cfg, variant);
  const int nfe = nfe_override > 0 ? nfe_override : cfg.nfe;
  return make_sampler_plan(spec, nfe, cfg.sampler_d, parse_w_rule(cfg.w_rule),
                           cfg.w_constant);
}

int cmd_sample(const CommonArgs& args, const std::string& variant_override,
               const std::string& checkpoint_override, const std::string& mean_override,
               int nfe_override, int count_override, bool write_trajectory) {
  const RunConfig cfg = load_config(args.config_path);
  ensure_out_dir(args.out_dir);
  const Variant variant = resolve_variant(cfg, variant_override);
  const PairedDataset task = make_task(cfg);
  const SamplerPlan plan = plan_from(cfg, variant, nfe_override);
  const bool oracle = checkpoint_override == "oracle";
  Predictor eps;
  if (!oracle) {
    const std::string path = checkpoint_override.empty()
                                 ? eps_checkpoint_path(args.out_dir, variant)
                                 : checkpoint_override;
    RegressorParams params = load_required_checkpoint(path, "bridge");
    if (params.data_dim() != task.dim) {
      throw ConfigError("bridge checkpoint dimension does not match the task");
    }
    eps = make_net_predictor(std::move(params));
  }
  const std::optional<Predictor> mean =
      mean_predictor_for(cfg, variant, args.out_dir, mean_override);
  const int count = count_override > 0 ? count_override : cfg.sample_count;
  const SampleRun run = run_sampling(plan, eps, mean ? &*mean : nullptr, task, count,
                                     args.seed, worker_threads(), oracle);
  const std::string tag =
      std::string(variant_name(variant)) + "_nfe" + std::to_string(plan.grid.size() - 1);
  save_dataset(args.out_dir + "/outputs_" + tag + ".brds", run.outputs, task.dim);
  save_dataset(args.out_dir + "/inputs_" + tag + ".brds", run.inputs, task.dim);
  save_dataset(args.out_dir + "/references_" + tag + ".brds", run.references, task.dim);
  const RestorationMetrics metrics = restoration_metrics(run.references, run.outputs);
  std::cout << "sampled " << count << " trajectories (" << tag << ")\n"
            << "mse " << format_double(metrics.mse) << ", psnr_toy "
            << format_double(metrics.psnr_toy) << "\n"
            << "outputs " << args.out_dir << "/outputs_" << tag << ".brds\n";
  if (write_trajectory) {
    const std::string path = args.out_dir + "/trajectory_" + tag + ".csv";
    write_trajectory_csv(path, run.first_trajectory,
                         run_metadata(cfg, args.seed) + " variant=" + variant_name(variant));
    std::cout << "trajectory " << path << "\n";
  }
  return 0;
}

int cmd_diagnose(const CommonArgs& args, const std::string& variant_override,
                 const std::string& checkpoint_override, const std::string& mean_override) {
  const RunConfig cfg = load_config(args.config_path);
  ensure_out_dir(args.out_dir);
  const Variant variant = resolve_variant(cfg, variant_override);
  const PairedDataset task = make_task(cfg);
  const std::string suffix = "_" + config_hash_hex8(cfg) + "_s" + std::to_string(args.seed);
  const std::string meta = run_metadata(cfg, args.seed) + " variant=" + variant_name(variant);

  const ScheduleSpec nadb = nadb_spec_from(cfg);
  const ScheduleSpec i2sb = i2sb_spec_from(cfg);
  std::vector<double> curve_grid;
  for (int i = 0; i <= 1000; ++i) curve_grid.push_back(i / 1000.0);
  write_noise_curves_csv(args.out_dir + "/noise_curves" + suffix + ".csv",
                         noise_curves(i2sb, nadb, curve_grid), meta);

  const std::string eps_path = checkpoint_override.empty()
                                   ? eps_checkpoint_path(args.out_dir, variant)
                                   : checkpoint_override;
  RegressorParams eps_params = load_required_checkpoint(eps_path, "bridge");
  if (eps_params.data_dim() != task.dim) {
    throw ConfigError("bridge checkpoint dimension does not match the task");
  }
  const Predictor eps = make_net_predictor(std::move(eps_params));
  const std::optional<Predictor> mean =
      mean_predictor_for(cfg, variant, args.out_dir, mean_override);

  const ScheduleSpec spec = schedule_for_variant(cfg, variant);
  const std::vector<ProbeRow> probe =
      endpoint_probe(eps, spec, task, default_probe_grid(), cfg.diag_samples_per_t,
                     args.seed, mean ? &*mean : nullptr, worker_threads());
  write_probe_csv(args.out_dir + "/endpoint_probe" + suffix + ".csv", probe, meta);

  const std::string theorem_path = args.out_dir + "/theorem1" + suffix + ".csv";
  if (task.dim == 1 && mean) {
    write_theorem1_csv(theorem_path, theorem1_check(*mean, task, 100000, args.seed), meta);
  } else {
    CsvWriter csv(theorem_path,
                  meta + " not_applicable=" +
                      (task.dim != 1 ? "task_not_1d" : "variant_has_no_mean"),
                  {"w2_before", "w2_after", "mse_before", "mse_after", "se_diff", "holds"});
    csv.close();
  }

  const SamplerPlan plan = plan_from(cfg, variant, 0);
  const SampleRun run = run_sampling(plan, eps, mean ? &*mean : nullptr, task,
                                     cfg.sample_count, args.seed, worker_threads(), false);
  write_metrics_csv(args.out_dir + "/metrics" + suffix + ".csv",
                    restoration_metrics(run.references, run.outputs), meta);

  std::cout << "diagnostics for " << variant_name(variant) << " on " << task.name
            << " written to " << args.out_dir << " (suffix " << suffix << ")\n";
  return 0;
}

int cmd_sweep_alpha(const CommonArgs& args, const std::string& alphas_override) {
  const RunConfig base = load_config(args.config_path);
  ensure_out_dir(args.out_dir);
  const Variant variant = parse_variant(base.variant);
  if (variant_kind(variant) != BridgeKind::NADB) {
    throw ConfigError("sweep-alpha applies to the noise-aligned arms only");
  }
  const std::vector<double> alphas =
      parse_alpha_list(alphas_override.empty() ? base.sweep_alphas : alphas_override);
  const PairedDataset task = make_task(base);

  std::optional<RegressorParams> mean;
  if (variant_uses_mean(variant)) {
    const TrainConfig mc = mean_train_config(base, args.seed);
    mean = train_mean_network(task, mc);
    save_checkpoint(mean_checkpoint_path(args.out_dir), *mean);
  }
  std::optional<Predictor> mean_pred;
  if (mean) mean_pred = make_net_predictor(*mean);

  CsvWriter csv(args.out_dir + "/sweep_alpha_" + config_hash_hex8(base) + "_s" +
                    std::to_string(args.seed) + ".csv",
                run_metadata(base, args.seed) + " variant=" + variant_name(variant),
                {"alpha", "final_loss", "mse", "psnr_toy"});
  for (double alpha : alphas) {
    RunConfig cfg = base;
    cfg.alpha = alpha;
    const TrainConfig tc = bridge_train_config(cfg, variant, args.seed);
    auto [eps, log] = train_bridge(task, tc, variant, mean ? &*mean : nullptr);
    const SamplerPlan plan = plan_from(cfg, variant, 0);
    const SampleRun run =
        run_sampling(plan, make_net_predictor(std::move(eps)),
                     mean_pred ? &*mean_pred : nullptr, task, cfg.sample_count, args.seed,
                     worker_threads(), false);
    const RestorationMetrics metrics = restoration_metrics(run.references, run.outputs);
    csv.row({alpha, log.loss.back(), metrics.mse, metrics.psnr_toy});
    std::cout << "alpha " << format_double(alpha) << ": final loss "
              << format_double(log.loss.back()) << ", mse " << format_double(metrics.mse)
              << ", psnr_toy " << format_double(metrics.psnr_toy) << "\n";
  }
  csv.close();
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"desk-scale diffusion-bridge toolkit"};
  app.require_subcommand(1);

  CommonArgs train_mean_args;
  CLI::App* train_mean = app.add_subcommand("train-mean", "fit the endpoint-mean network");
  add_common(train_mean, &train_mean_args);

  CommonArgs train_bridge_args;
  std::string tb_variant, tb_mean;
  CLI::App* train_bridge = app.add_subcommand("train-bridge", "fit one bridge arm");
  add_common(train_bridge, &train_bridge_args);
  train_bridge->add_option("--variant", tb_variant,
                           "i2sb | nadb | i2sb-mean | nadb-nomean (default from config)");
  train_bridge->add_option("--mean-checkpoint", tb_mean, "endpoint-mean checkpoint path");

  CommonArgs sample_args;
  std::string sm_variant, sm_ckpt, sm_mean;
  int sm_nfe = 0, sm_count = 0;
  bool sm_traj = false;
  CLI::App* sample = app.add_subcommand("sample", "run reverse trajectories on held-out pairs");
  add_common(sample, &sample_args);
  sample->add_option("--variant", sm_variant, "arm to sample (default from config)");
  sample->add_option("--checkpoint", sm_ckpt,
                     "bridge checkpoint path, or 'oracle' for the analytic residual");
  sample->add_option("--mean-checkpoint", sm_mean, "endpoint-mean checkpoint path");
  sample->add_option("--nfe", sm_nfe, "reverse steps (default from config)");
  sample->add_option("--count", sm_count, "trajectories to run (default from config)");
  sample->add_flag("--trajectory", sm_traj, "write the first trajectory as CSV");

  CommonArgs diag_args;
  std::string dg_variant, dg_ckpt, dg_mean;
  CLI::App* diagnose = app.add_subcommand("diagnose", "emit probe, curve, and metric reports");
  add_common(diagnose, &diag_args);
  diagnose->add_option("--variant", dg_variant, "arm to probe (default from config)");
  diagnose->add_option("--checkpoint", dg_ckpt, "bridge checkpoint path");
  diagnose->add_option("--mean-checkpoint", dg_mean, "endpoint-mean checkpoint path");

  CommonArgs sweep_args;
  std::string sw_alphas;
  CLI::App* sweep = app.add_subcommand("sweep-alpha", "train and score one arm per alpha");
  add_common(sweep, &sweep_args);
  sweep->add_option("--alphas", sw_alphas, "comma-separated alpha values");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train_mean->parsed()) return cmd_train_mean(train_mean_args);
    if (train_bridge->parsed()) {
      return cmd_train_bridge(train_bridge_args, tb_variant, tb_mean);
    }
    if (sample->parsed()) {
      return cmd_sample(sample_args, sm_variant, sm_ckpt, sm_mean, sm_nfe, sm_count, sm_traj);
    }
    if (diagnose->parsed()) return cmd_diagnose(diag_args, dg_variant, dg_ckpt, dg_mean);
    if (sweep->parsed()) return cmd_sweep_alpha(sweep_args, sw_alphas);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DivergenceError& e) {
    std::cerr << "numeric divergence: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace bridgelab
