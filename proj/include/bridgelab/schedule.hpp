#pragma once

#include <memory>
#include <vector>

#include "bridgelab/common.hpp"

namespace bridgelab {

enum class BridgeKind { I2SB, NADB };

struct BetaPoint {
  double t;
  double beta;
};

// Piecewise-linear diffusion rate on [0, 1] with its exact prefix/suffix
// integrals precomputed, so sigma2(t) = int_0^t beta and
// sigma2_bar(t) = int_t^1 beta are closed-form per segment and satisfy
// sigma2(t) + sigma2_bar(t) == total to roundoff at any t.
class BetaSchedule {
 public:
  explicit BetaSchedule(std::vector<BetaPoint> table);

  double sigma2(double t) const;      // int_0^t beta
  double sigma2_bar(double t) const;  // int_t^1 beta
  double beta(double t) const;
  double total() const { return total_; }
  const std::vector<BetaPoint>& table() const { return table_; }

 private:
  std::size_t segment(double t) const;
  std::vector<BetaPoint> table_;
  std::vector<double> prefix_;  // prefix_[i] = int_0^{t_i}
  std::vector<double> suffix_;  // suffix_[i] = int_{t_i}^1
  double total_ = 0.0;
};

struct ScheduleSpec {
  BridgeKind kind = BridgeKind::NADB;
  double alpha = 0.4;  // endpoint sharpness, in (0, 1)
  double k = 0.75;     // noise amplitude, > 0
  std::shared_ptr<const BetaSchedule> beta;  // diffusion schedule, required for I2SB

  double sigma2(double t) const;
  double sigma2_bar(double t) const;
  double total_variance() const;
};

ScheduleSpec make_nadb_spec(double alpha, double k);
ScheduleSpec make_i2sb_spec(std::vector<BetaPoint> table);

// Symmetric triangular rate beta(t) = beta_max * min(t, 1-t) with
// beta_max = 4 * total_variance, sampled on a uniform grid. 1001 points puts
// t = 0.5 on the grid so the symmetric midpoint is represented exactly.
std::vector<BetaPoint> triangular_beta_table(double total_variance, int points = 1001);

// Full invariant check; throws std::invalid_argument with the failed invariant.
void validate(const ScheduleSpec& spec);

// t^a evaluated as exp(a * log(t)); t == 0 maps to 0 so endpoint
// coefficients are exact.
double pow_alpha(double t, double a);

struct I2sbCoeffs {
  double mean_w0;  // weight on x0
  double mean_w1;  // weight on the far endpoint
  double noise;    // stochastic amplitude on z
};

struct NadbCoeffs {
  double mean_w0;
  double mean_w1;
  double gamma_x;  // stochastic amplitude k * t * (1 - t)
};

I2sbCoeffs i2sb_coefficients(const ScheduleSpec& spec, double t);
NadbCoeffs nadb_coefficients(const ScheduleSpec& spec, double t);

// Noise amplitude inside the regression target: k * t^(1-alpha) * (1-t) for
// NADB, sigma_bar_t / sqrt(sigma_bar^2 + sigma^2) for I2SB (limit 1 at t = 0).
double target_noise_coefficient(const ScheduleSpec& spec, double t);

// Noise amplitude inside the network input x_t.
double input_noise_coefficient(const ScheduleSpec& spec, double t);

// k such that the NADB stochastic peak k/4 matches the peak of the I2SB
// input-noise amplitude, the max taken over the beta_table grid.
double calibrate_k(const ScheduleSpec& i2sb_spec);

}  // namespace bridgelab
