#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bridgelab/common.hpp"
#include "bridgelab/rng.hpp"

namespace bridgelab {

enum class Activation { Silu, Tanh };

// Fully-connected net. layer_dims runs [input, hidden..., output]; the input
// width already includes the time features, so layer_dims.front() equals
// data_dim() + time_embed_dim. Hidden layers are activated, the last layer is
// linear. Weights are row-major (out x in).
struct RegressorParams {
  std::vector<int> layer_dims;
  std::vector<std::vector<double>> weights;
  std::vector<Vec> biases;
  int time_embed_dim = 0;
  Activation activation = Activation::Silu;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int data_dim() const { return layer_dims.front() - time_embed_dim; }
  std::size_t layer_count() const { return weights.size(); }
  std::size_t parameter_count() const;
};

// Glorot-uniform init: each layer drawn uniform with bound
// sqrt(6 / (fan_in + fan_out)), biases zero.
RegressorParams make_regressor(std::vector<int> layer_dims, int time_embed_dim,
                               Activation activation, CounterRng& rng);

// Default architectures: one hidden stack of width 128. The bridge net is
// conditioned on t through 16 sinusoidal features; the endpoint-mean net sees
// only the data vector.
RegressorParams make_eps_network(int data_dim, CounterRng& rng, int hidden = 128,
                                 int time_embed_dim = 16);
RegressorParams make_mean_network(int data_dim, CounterRng& rng, int hidden = 128);

// Sin/cos pairs at frequencies 2^j * pi, j = 0 .. n/2 - 1. n must be even.
Vec time_features(double t, int n);

struct ForwardTape {
  Vec input;                  // data plus time features
  std::vector<Vec> pre;       // pre-activation per layer
  std::vector<Vec> act;       // post-activation per hidden layer
};

// t must be present iff time_embed_dim > 0. The tape, when supplied, holds
// everything backward() needs.
Vec forward(const RegressorParams& params, const Vec& x, std::optional<double> t,
            ForwardTape* tape = nullptr);

struct GradientBuffer {
  std::vector<std::vector<double>> weights;
  std::vector<Vec> biases;

  static GradientBuffer zeros_like(const RegressorParams& params);
  void reset();
};

// Reverse-mode gradient of output . output_grad with respect to every weight
// and bias, accumulated into grad (callers zero it between batches).
void backward_accumulate(const RegressorParams& params, const ForwardTape& tape,
                         const Vec& output_grad, GradientBuffer& grad);
GradientBuffer backward(const RegressorParams& params, const ForwardTape& tape,
                        const Vec& output_grad);

struct AdamState {
  std::vector<std::vector<double>> m_w, v_w;
  std::vector<Vec> m_b, v_b;
  std::int64_t step = 0;

  static AdamState zeros_like(const RegressorParams& params);
};

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8 and bias correction.
// Non-finite gradients are rejected with DivergenceError before any update.
void adam_step(RegressorParams& params, const GradientBuffer& grad, AdamState& state,
               double lr);

// Flat little-endian binary checkpoint, magic "BRLB":
//   "BRLB" | u32 version=1 | u32 n_dims | i32 dims[n] | i32 time_embed_dim |
//   u32 activation (0 silu, 1 tanh) | per layer: f64 weights row-major, f64 biases
void save_checkpoint(const std::string& path, const RegressorParams& params);
RegressorParams load_checkpoint(const std::string& path);

}  // namespace bridgelab
