#include "bridgelab/bridge_sample.hpp"

#include <cmath>

namespace bridgelab {

namespace {

void check_dims(const Vec& x0, const Vec& x1, const Vec& xhat0, const Vec& z) {
  const std::size_t d = x0.size();
  if (d == 0) throw std::invalid_argument("bridge sample needs nonempty vectors");
  if (x1.size() != d || xhat0.size() != d || z.size() != d) {
    throw std::invalid_argument("bridge sample vectors must share one dimension");
  }
}

}  // namespace

BridgeSample make_bridge_sample(const ScheduleSpec& spec, double t, const Vec& x0,
                                const Vec& x1, const Vec& xhat0, const Vec& z) {
  check_dims(x0, x1, xhat0, z);
  BridgeSample s;
  s.t = t;
  s.x0 = x0;
  s.x1 = x1;
  s.xhat0 = xhat0;
  s.z = z;
  const std::size_t d = x0.size();
  s.xt.resize(d);
  s.yt.resize(d);
  if (spec.kind == BridgeKind::NADB) {
    const NadbCoeffs c = nadb_coefficients(spec, t);
    const double gy = target_noise_coefficient(spec, t);
    for (std::size_t i = 0; i < d; ++i) {
      s.xt[i] = c.mean_w0 * x0[i] + c.mean_w1 * xhat0[i] + c.gamma_x * z[i];
      s.yt[i] = (xhat0[i] - x0[i]) + gy * z[i];
    }
  } else {
    const I2sbCoeffs c = i2sb_coefficients(spec, t);
    const double total = spec.sigma2(t) + spec.sigma2_bar(t);
    const double sigma_t = std::sqrt(spec.sigma2(t));
    const double mean_coef = sigma_t / total;
    const double gy = target_noise_coefficient(spec, t);
    for (std::size_t i = 0; i < d; ++i) {
      s.xt[i] = c.mean_w0 * x0[i] + c.mean_w1 * xhat0[i] + c.noise * z[i];
      s.yt[i] = mean_coef * (xhat0[i] - x0[i]) + gy * z[i];
    }
  }
  return s;
}

Vec predict_x0(const ScheduleSpec& spec, double t, const Vec& xt, const Vec& eps) {
  if (xt.size() != eps.size() || xt.empty()) {
    throw std::invalid_argument("predict_x0 vectors must share one nonempty dimension");
  }
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::domain_error("predict_x0 requires t in (0, 1]");
  }
  const double scale = spec.kind == BridgeKind::NADB ? pow_alpha(t, spec.alpha)
                                                     : std::sqrt(spec.sigma2(t));
  Vec out(xt.size());
  for (std::size_t i = 0; i < xt.size(); ++i) out[i] = xt[i] - scale * eps[i];
  return out;
}

}  // namespace bridgelab
