#include "bridgelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "bridgelab/csv.hpp"
#include "bridgelab/sampler.hpp"

namespace bridgelab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has non-numeric value '" + value + "'");
  }
  if (pos != value.size()) {
    throw ConfigError("config key '" + key + "' has trailing junk in value '" + value + "'");
  }
  if (!std::isfinite(v)) {
    throw ConfigError("config key '" + key + "' must be finite");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError("config key '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

void check_positive_int(const std::string& key, int v) {
  if (v < 1) throw ConfigError("config key '" + key + "' must be >= 1");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::string> seen;
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        " is not 'key = value': " + stripped);
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + " has an empty key or value");
    }
    if (!seen.emplace(key, value).second) {
      throw ConfigError("config key '" + key + "' appears twice");
    }
  }

  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = seen.find(key);
    if (it == seen.end()) return std::nullopt;
    std::string v = it->second;
    seen.erase(it);
    return v;
  };

  if (auto v = take("task")) cfg.task = *v;
  if (auto v = take("variant")) cfg.variant = *v;
  if (auto v = take("kind")) cfg.kind = *v;
  if (auto v = take("task.dim")) cfg.task_dim = parse_int("task.dim", *v);
  if (auto v = take("task.noise_sigma")) cfg.noise_sigma = parse_double("task.noise_sigma", *v);
  if (auto v = take("task.patch_side")) cfg.patch_side = parse_int("task.patch_side", *v);
  if (auto v = take("task.kernel")) cfg.kernel = *v;
  if (auto v = take("task.levels")) cfg.levels = parse_int("task.levels", *v);
  if (auto v = take("task.modes")) cfg.modes = parse_int("task.modes", *v);
  if (auto v = take("alpha")) cfg.alpha = parse_double("alpha", *v);
  if (auto v = take("k")) {
    if (*v == "auto") {
      cfg.k_auto = true;
    } else {
      cfg.k = parse_double("k", *v);
    }
  }
  if (auto v = take("beta.shape")) cfg.beta_shape = *v;
  if (auto v = take("beta.total_variance")) {
    cfg.beta_total_variance = parse_double("beta.total_variance", *v);
  }
  if (auto v = take("t_min")) cfg.t_min = parse_double("t_min", *v);
  if (auto v = take("train.batch_size")) cfg.batch_size = parse_int("train.batch_size", *v);
  if (auto v = take("train.steps")) cfg.steps = parse_int("train.steps", *v);
  if (auto v = take("train.mean_steps")) cfg.mean_steps = parse_int("train.mean_steps", *v);
  if (auto v = take("train.lr")) cfg.lr = parse_double("train.lr", *v);
  if (auto v = take("train.time_bins")) cfg.time_bins = parse_int("train.time_bins", *v);
  if (auto v = take("sampler.nfe")) cfg.nfe = parse_int("sampler.nfe", *v);
  if (auto v = take("sampler.d")) {
    if (*v != "auto") cfg.sampler_d = parse_double("sampler.d", *v);
  }
  if (auto v = take("sampler.w_rule")) cfg.w_rule = *v;
  if (auto v = take("sampler.w_constant")) cfg.w_constant = parse_double("sampler.w_constant", *v);
  if (auto v = take("sample.count")) cfg.sample_count = parse_int("sample.count", *v);
  if (auto v = take("diag.samples_per_t")) {
    cfg.diag_samples_per_t = parse_int("diag.samples_per_t", *v);
  }
  if (auto v = take("sweep.alphas")) cfg.sweep_alphas = *v;

  if (!seen.empty()) {
    throw ConfigError("unknown config key '" + seen.begin()->first + "'");
  }
  if (cfg.task.empty()) throw ConfigError("missing required config key 'task'");
  if (cfg.variant.empty()) throw ConfigError("missing required config key 'variant'");

  const Variant variant = parse_variant(cfg.variant);
  if (cfg.task != "gauss_channel" && cfg.task != "patch_blur" &&
      cfg.task != "patch_quantize" && cfg.task != "clusters2d") {
    throw ConfigError("unknown task '" + cfg.task + "'");
  }
  if (cfg.kind) {
    if (*cfg.kind != "i2sb" && *cfg.kind != "nadb") {
      throw ConfigError("config key 'kind' must be i2sb or nadb");
    }
    const bool nadb = variant_kind(variant) == BridgeKind::NADB;
    if ((*cfg.kind == "nadb") != nadb) {
      throw ConfigError("config key 'kind' contradicts variant '" + cfg.variant + "'");
    }
  }
  check_positive_int("task.dim", cfg.task_dim);
  if (!(cfg.noise_sigma >= 0.0)) throw ConfigError("task.noise_sigma must be >= 0");
  if (cfg.patch_side < 3) throw ConfigError("task.patch_side must be >= 3");
  if (cfg.kernel != "uniform3" && cfg.kernel != "gaussian3") {
    throw ConfigError("task.kernel must be uniform3 or gaussian3");
  }
  if (cfg.levels < 2) throw ConfigError("task.levels must be >= 2");
  check_positive_int("task.modes", cfg.modes);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!cfg.k_auto && !(cfg.k > 0.0)) throw ConfigError("k must be positive or auto");
  if (cfg.beta_shape != "triangular") {
    throw ConfigError("beta.shape '" + cfg.beta_shape + "' is not supported (triangular only)");
  }
  if (!(cfg.beta_total_variance > 0.0)) throw ConfigError("beta.total_variance must be > 0");
  if (!(cfg.t_min >= 0.0 && cfg.t_min <= 0.01)) throw ConfigError("t_min must lie in [0, 0.01]");
  check_positive_int("train.batch_size", cfg.batch_size);
  check_positive_int("train.steps", cfg.steps);
  check_positive_int("train.mean_steps", cfg.mean_steps);
  if (!(cfg.lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (cfg.time_bins < 2) throw ConfigError("train.time_bins must be >= 2");
  check_positive_int("sampler.nfe", cfg.nfe);
  if (cfg.sampler_d) {
    const double threshold = stage_threshold(cfg.alpha);
    if (*cfg.sampler_d < threshold - 1e-12 || *cfg.sampler_d > 1.0) {
      throw ConfigError("sampler.d must lie in [(1-alpha)/(2-alpha), 1]");
    }
  }
  parse_w_rule(cfg.w_rule);
  if (!(cfg.w_constant >= 0.0)) throw ConfigError("sampler.w_constant must be >= 0");
  check_positive_int("sample.count", cfg.sample_count);
  check_positive_int("diag.samples_per_t", cfg.diag_samples_per_t);
  parse_alpha_list(cfg.sweep_alphas);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string canonical_config_text(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["task"] = cfg.task;
  kv["variant"] = cfg.variant;
  kv["kind"] = cfg.kind.value_or("-");
  kv["task.dim"] = std::to_string(cfg.task_dim);
  kv["task.noise_sigma"] = format_double(cfg.noise_sigma);
  kv["task.patch_side"] = std::to_string(cfg.patch_side);
  kv["task.kernel"] = cfg.kernel;
  kv["task.levels"] = std::to_string(cfg.levels);
  kv["task.modes"] = std::to_string(cfg.modes);
  kv["alpha"] = format_double(cfg.alpha);
  kv["k"] = cfg.k_auto ? "auto" : format_double(cfg.k);
  kv["beta.shape"] = cfg.beta_shape;
  kv["beta.total_variance"] = format_double(cfg.beta_total_variance);
  kv["t_min"] = format_double(cfg.t_min);
  kv["train.batch_size"] = std::to_string(cfg.batch_size);
  kv["train.steps"] = std::to_string(cfg.steps);
  kv["train.mean_steps"] = std::to_string(cfg.mean_steps);
  kv["train.lr"] = format_double(cfg.lr);
  kv["train.time_bins"] = std::to_string(cfg.time_bins);
  kv["sampler.nfe"] = std::to_string(cfg.nfe);
  kv["sampler.d"] = cfg.sampler_d ? format_double(*cfg.sampler_d) : "auto";
  kv["sampler.w_rule"] = cfg.w_rule;
  kv["sampler.w_constant"] = format_double(cfg.w_constant);
  kv["sample.count"] = std::to_string(cfg.sample_count);
  kv["diag.samples_per_t"] = std::to_string(cfg.diag_samples_per_t);
  kv["sweep.alphas"] = cfg.sweep_alphas;
  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  const std::string text = canonical_config_text(cfg);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string config_hash_hex8(const RunConfig& cfg) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = config_hash(cfg);
  std::string out(8, '0');
  for (int i = 7; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

PairedDataset make_task(const RunConfig& cfg) {
  if (cfg.task == "gauss_channel") return make_gauss_channel(cfg.task_dim, cfg.noise_sigma);
  if (cfg.task == "patch_blur") {
    return make_patch_blur(cfg.patch_side, cfg.kernel == "uniform3" ? BlurKernel::Uniform3
                                                                    : BlurKernel::Gaussian3);
  }
  if (cfg.task == "patch_quantize") return make_patch_quantize(cfg.patch_side, cfg.levels);
  if (cfg.task == "clusters2d") return make_2d_clusters(cfg.modes);
  throw ConfigError("unknown task '" + cfg.task + "'");
}

ScheduleSpec i2sb_spec_from(const RunConfig& cfg) {
  return make_i2sb_spec(triangular_beta_table(cfg.beta_total_variance));
}

ScheduleSpec nadb_spec_from(const RunConfig& cfg) {
  const double k = cfg.k_auto ? calibrate_k(i2sb_spec_from(cfg)) : cfg.k;
  return make_nadb_spec(cfg.alpha, k);
}

ScheduleSpec schedule_for_variant(const RunConfig& cfg, Variant variant) {
  return variant_kind(variant) == BridgeKind::NADB ? nadb_spec_from(cfg)
                                                   : i2sb_spec_from(cfg);
}

TrainConfig bridge_train_config(const RunConfig& cfg, Variant variant, std::uint64_t seed) {
  TrainConfig tc;
  tc.batch_size = cfg.batch_size;
  tc.steps = cfg.steps;
  tc.lr = cfg.lr;
  tc.seed = seed;
  tc.t_min = cfg.t_min;
  tc.time_bins = cfg.time_bins;
  tc.bridge = schedule_for_variant(cfg, variant);
  tc.use_mean_network = variant_uses_mean(variant);
  return tc;
}

TrainConfig mean_train_config(const RunConfig& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.batch_size = cfg.batch_size;
  tc.steps = cfg.mean_steps;
  tc.lr = cfg.lr;
  tc.seed = seed;
  tc.t_min = cfg.t_min;
  tc.time_bins = cfg.time_bins;
  tc.bridge = nadb_spec_from(cfg);
  tc.use_mean_network = false;
  return tc;
}

std::vector<double> parse_alpha_list(const std::string& text) {
  std::vector<double> alphas;
  std::istringstream parts(text);
  std::string item;
  while (std::getline(parts, item, ',')) {
    const std::string v = trim(item);
    if (v.empty()) continue;
    const double a = parse_double("sweep.alphas", v);
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigError("sweep alpha " + v + " must lie in (0, 1)");
    }
    alphas.push_back(a);
  }
  if (alphas.empty()) throw ConfigError("sweep.alphas lists no values");
  return alphas;
}

}  // namespace bridgelab
