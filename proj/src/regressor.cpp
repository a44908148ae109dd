#include "bridgelab/regressor.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace bridgelab {

namespace {

double activate(double x, Activation a) {
  if (a == Activation::Tanh) return std::tanh(x);
  return x / (1.0 + std::exp(-x));  // silu
}

double activate_grad(double x, Activation a) {
  if (a == Activation::Tanh) {
    const double th = std::tanh(x);
    return 1.0 - th * th;
  }
  const double s = 1.0 / (1.0 + std::exp(-x));
  return s * (1.0 + x * (1.0 - s));
}

void check_architecture(const std::vector<int>& dims, int time_embed_dim) {
  if (dims.size() < 2) throw std::invalid_argument("network needs at least one layer");
  for (int d : dims) {
    if (d <= 0) throw std::invalid_argument("layer widths must be positive");
  }
  if (time_embed_dim < 0 || time_embed_dim % 2 != 0) {
    throw std::invalid_argument("time_embed_dim must be even and nonnegative");
  }
  if (dims.front() <= time_embed_dim) {
    throw std::invalid_argument("input width must exceed time_embed_dim");
  }
}

}  // namespace

std::size_t RegressorParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    n += weights[l].size() + biases[l].size();
  }
  return n;
}

RegressorParams make_regressor(std::vector<int> layer_dims, int time_embed_dim,
                               Activation activation, CounterRng& rng) {
  check_architecture(layer_dims, time_embed_dim);
  RegressorParams p;
  p.layer_dims = std::move(layer_dims);
  p.time_embed_dim = time_embed_dim;
  p.activation = activation;
  const std::size_t layers = p.layer_dims.size() - 1;
  p.weights.resize(layers);
  p.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const int fan_in = p.layer_dims[l];
    const int fan_out = p.layer_dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    p.weights[l].resize(static_cast<std::size_t>(fan_in) * fan_out);
    for (double& w : p.weights[l]) w = rng.uniform(-bound, bound);
    p.biases[l].assign(static_cast<std::size_t>(fan_out), 0.0);
  }
  return p;
}

RegressorParams make_eps_network(int data_dim, CounterRng& rng, int hidden,
                                 int time_embed_dim) {
  return make_regressor({data_dim + time_embed_dim, hidden, hidden, data_dim},
                        time_embed_dim, Activation::Silu, rng);
}

RegressorParams make_mean_network(int data_dim, CounterRng& rng, int hidden) {
  return make_regressor({data_dim, hidden, hidden, data_dim}, 0, Activation::Silu, rng);
}

Vec time_features(double t, int n) {
  if (n < 0 || n % 2 != 0) throw std::invalid_argument("time feature count must be even");
  Vec f(static_cast<std::size_t>(n));
  constexpr double pi = 3.14159265358979323846;
  double freq = pi;
  for (int j = 0; j < n / 2; ++j) {
    f[2 * j] = std::sin(freq * t);
    f[2 * j + 1] = std::cos(freq * t);
    freq *= 2.0;
  }
  return f;
}

Vec forward(const RegressorParams& params, const Vec& x, std::optional<double> t,
            ForwardTape* tape) {
  if (static_cast<int>(x.size()) != params.data_dim()) {
    throw std::invalid_argument("forward: input has wrong dimension");
  }
  if (t.has_value() != (params.time_embed_dim > 0)) {
    throw std::invalid_argument(
        "forward: time must be supplied exactly when the net is time-conditioned");
  }
  Vec in(static_cast<std::size_t>(params.input_dim()));
  std::copy(x.begin(), x.end(), in.begin());
  if (params.time_embed_dim > 0) {
    const Vec tf = time_features(*t, params.time_embed_dim);
    std::copy(tf.begin(), tf.end(), in.begin() + x.size());
  }
  if (tape) {
    tape->input = in;
    tape->pre.assign(params.layer_count(), {});
    tape->act.assign(params.layer_count(), {});
  }
  Vec cur = std::move(in);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const int fan_in = params.layer_dims[l];
    const int fan_out = params.layer_dims[l + 1];
    const std::vector<double>& w = params.weights[l];
    Vec next(static_cast<std::size_t>(fan_out));
    for (int o = 0; o < fan_out; ++o) {
      double acc = params.biases[l][static_cast<std::size_t>(o)];
      const double* row = w.data() + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) acc += row[i] * cur[static_cast<std::size_t>(i)];
      next[static_cast<std::size_t>(o)] = acc;
    }
    if (tape) tape->pre[l] = next;
    const bool last = l + 1 == params.layer_count();
    if (!last) {
      for (double& v : next) v = activate(v, params.activation);
      if (tape) tape->act[l] = next;
    }
    cur = std::move(next);
  }
  return cur;
}

GradientBuffer GradientBuffer::zeros_like(const RegressorParams& params) {
  GradientBuffer g;
  g.weights.resize(params.layer_count());
  g.biases.resize(params.layer_count());
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    g.weights[l].assign(params.weights[l].size(), 0.0);
    g.biases[l].assign(params.biases[l].size(), 0.0);
  }
  return g;
}

void GradientBuffer::reset() {
  for (auto& w : weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : biases) std::fill(b.begin(), b.end(), 0.0);
}

void backward_accumulate(const RegressorParams& params, const ForwardTape& tape,
                         const Vec& output_grad, GradientBuffer& grad) {
  if (static_cast<int>(output_grad.size()) != params.output_dim()) {
    throw std::invalid_argument("backward: output_grad has wrong dimension");
  }
  Vec delta = output_grad;
  for (std::size_t l = params.layer_count(); l-- > 0;) {
    const int fan_in = params.layer_dims[l];
    const int fan_out = params.layer_dims[l + 1];
    const bool last = l + 1 == params.layer_count();
    if (!last) {
      for (int o = 0; o < fan_out; ++o) {
        delta[static_cast<std::size_t>(o)] *=
            activate_grad(tape.pre[l][static_cast<std::size_t>(o)], params.activation);
      }
    }
    const Vec& in = l == 0 ? tape.input : tape.act[l - 1];
    std::vector<double>& gw = grad.weights[l];
    for (int o = 0; o < fan_out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      grad.biases[l][static_cast<std::size_t>(o)] += d;
      double* row = gw.data() + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) row[i] += d * in[static_cast<std::size_t>(i)];
    }
    if (l == 0) break;
    Vec prev(static_cast<std::size_t>(fan_in), 0.0);
    const std::vector<double>& w = params.weights[l];
    for (int o = 0; o < fan_out; ++o) {
      const double d = delta[static_cast<std::size_t>(o)];
      const double* row = w.data() + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) prev[static_cast<std::size_t>(i)] += d * row[i];
    }
    delta = std::move(prev);
  }
}

GradientBuffer backward(const RegressorParams& params, const ForwardTape& tape,
                        const Vec& output_grad) {
  GradientBuffer g = GradientBuffer::zeros_like(params);
  backward_accumulate(params, tape, output_grad, g);
  return g;
}

AdamState AdamState::zeros_like(const RegressorParams& params) {
  AdamState s;
  s.m_w.resize(params.layer_count());
  s.v_w.resize(params.layer_count());
  s.m_b.resize(params.layer_count());
  s.v_b.resize(params.layer_count());
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    s.m_w[l].assign(params.weights[l].size(), 0.0);
    s.v_w[l].assign(params.weights[l].size(), 0.0);
    s.m_b[l].assign(params.biases[l].size(), 0.0);
    s.v_b[l].assign(params.biases[l].size(), 0.0);
  }
  return s;
}

void adam_step(RegressorParams& params, const GradientBuffer& grad, AdamState& state,
               double lr) {
  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    if (!all_finite(grad.weights[l]) || !all_finite(grad.biases[l])) {
      throw DivergenceError("adam_step: non-finite gradient in layer " + std::to_string(l));
    }
  }
  state.step += 1;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  auto update = [&](std::vector<double>& p, const std::vector<double>& g,
                    std::vector<double>& m, std::vector<double>& v) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      p[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
    }
  };
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    update(params.weights[l], grad.weights[l], state.m_w[l], state.v_w[l]);
    update(params.biases[l], grad.biases[l], state.m_b[l], state.v_b[l]);
  }
}

namespace {

constexpr char kMagic[4] = {'B', 'R', 'L', 'B'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in, const std::string& path) {
  T value;
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("checkpoint truncated: " + path);
  return value;
}

}  // namespace

void save_checkpoint(const std::string& path, const RegressorParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open checkpoint for writing: " + path);
  out.write(kMagic, 4);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint32_t>(params.layer_dims.size()));
  for (int d : params.layer_dims) write_pod(out, static_cast<std::int32_t>(d));
  write_pod(out, static_cast<std::int32_t>(params.time_embed_dim));
  write_pod(out, static_cast<std::uint32_t>(params.activation == Activation::Silu ? 0 : 1));
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    out.write(reinterpret_cast<const char*>(params.weights[l].data()),
              static_cast<std::streamsize>(params.weights[l].size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(params.biases[l].data()),
              static_cast<std::streamsize>(params.biases[l].size() * sizeof(double)));
  }
  if (!out) throw IoError("checkpoint write failed: " + path);
}

RegressorParams load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw IoError("not a checkpoint file (bad magic): " + path);
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version) + ": " + path);
  }
  const auto n_dims = read_pod<std::uint32_t>(in, path);
  if (n_dims < 2 || n_dims > 64) throw IoError("implausible layer count: " + path);
  RegressorParams p;
  p.layer_dims.resize(n_dims);
  for (auto& d : p.layer_dims) d = read_pod<std::int32_t>(in, path);
  p.time_embed_dim = read_pod<std::int32_t>(in, path);
  const auto act = read_pod<std::uint32_t>(in, path);
  if (act > 1) throw IoError("unknown activation tag: " + path);
  p.activation = act == 0 ? Activation::Silu : Activation::Tanh;
  check_architecture(p.layer_dims, p.time_embed_dim);
  const std::size_t layers = p.layer_dims.size() - 1;
  p.weights.resize(layers);
  p.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t nw = static_cast<std::size_t>(p.layer_dims[l]) * p.layer_dims[l + 1];
    p.weights[l].resize(nw);
    in.read(reinterpret_cast<char*>(p.weights[l].data()),
            static_cast<std::streamsize>(nw * sizeof(double)));
    p.biases[l].resize(static_cast<std::size_t>(p.layer_dims[l + 1]));
    in.read(reinterpret_cast<char*>(p.biases[l].data()),
            static_cast<std::streamsize>(p.biases[l].size() * sizeof(double)));
    if (!in) throw IoError("checkpoint truncated: " + path);
  }
  return p;
}

}  // namespace bridgelab
