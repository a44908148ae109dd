#include "bridgelab/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace bridgelab {

namespace {

void check_t_range(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw std::domain_error("bridge time t must lie in [0, 1], got " + std::to_string(t));
  }
}

void check_table_shape(const std::vector<BetaPoint>& table) {
  if (table.size() < 2) {
    throw std::invalid_argument("beta_table needs at least two points");
  }
  if (table.front().t != 0.0 || table.back().t != 1.0) {
    throw std::invalid_argument("beta_table must cover [0, 1] exactly");
  }
  for (std::size_t i = 0; i + 1 < table.size(); ++i) {
    if (!(table[i].t < table[i + 1].t)) {
      throw std::invalid_argument("beta_table times must be strictly increasing");
    }
  }
  for (const BetaPoint& p : table) {
    if (!(std::isfinite(p.beta) && p.beta >= 0.0)) {
      throw std::invalid_argument("beta_table values must be finite and nonnegative");
    }
  }
}

}  // namespace

BetaSchedule::BetaSchedule(std::vector<BetaPoint> table) : table_(std::move(table)) {
  check_table_shape(table_);
  const std::size_t n = table_.size();
  prefix_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = table_[i + 1].t - table_[i].t;
    prefix_[i + 1] = prefix_[i] + 0.5 * (table_[i].beta + table_[i + 1].beta) * dt;
  }
  suffix_.assign(n, 0.0);
  for (std::size_t i = n - 1; i > 0; --i) {
    const double dt = table_[i].t - table_[i - 1].t;
    suffix_[i - 1] = suffix_[i] + 0.5 * (table_[i - 1].beta + table_[i].beta) * dt;
  }
  total_ = prefix_.back();
}

std::size_t BetaSchedule::segment(double t) const {
  // Index i with table_[i].t <= t < table_[i+1].t (last segment for t == 1).
  const auto it = std::upper_bound(
      table_.begin(), table_.end(), t,
      [](double v, const BetaPoint& p) { return v < p.t; });
  std::size_t i = static_cast<std::size_t>(it - table_.begin());
  if (i > 0) --i;
  if (i + 1 >= table_.size()) i = table_.size() - 2;
  return i;
}

double BetaSchedule::beta(double t) const {
  check_t_range(t);
  const std::size_t i = segment(t);
  const BetaPoint& a = table_[i];
  const BetaPoint& b = table_[i + 1];
  const double u = (t - a.t) / (b.t - a.t);
  return a.beta + u * (b.beta - a.beta);
}

double BetaSchedule::sigma2(double t) const {
  check_t_range(t);
  if (t == 0.0) return 0.0;
  if (t == 1.0) return total_;
  const std::size_t i = segment(t);
  const BetaPoint& a = table_[i];
  const double dt = t - a.t;
  return prefix_[i] + 0.5 * (a.beta + beta(t)) * dt;
}

double BetaSchedule::sigma2_bar(double t) const {
  check_t_range(t);
  if (t == 0.0) return total_;
  if (t == 1.0) return 0.0;
  const std::size_t i = segment(t);
  const BetaPoint& b = table_[i + 1];
  const double dt = b.t - t;
  return suffix_[i + 1] + 0.5 * (beta(t) + b.beta) * dt;
}

double ScheduleSpec::sigma2(double t) const {
  if (!beta) throw std::invalid_argument("schedule has no beta table");
  return beta->sigma2(t);
}

double ScheduleSpec::sigma2_bar(double t) const {
  if (!beta) throw std::invalid_argument("schedule has no beta table");
  return beta->sigma2_bar(t);
}

double ScheduleSpec::total_variance() const {
  if (!beta) throw std::invalid_argument("schedule has no beta table");
  return beta->total();
}

ScheduleSpec make_nadb_spec(double alpha, double k) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie in (0, 1)");
  }
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument("k must be positive and finite");
  }
  ScheduleSpec spec;
  spec.kind = BridgeKind::NADB;
  spec.alpha = alpha;
  spec.k = k;
  return spec;
}

ScheduleSpec make_i2sb_spec(std::vector<BetaPoint> table) {
  ScheduleSpec spec;
  spec.kind = BridgeKind::I2SB;
  spec.beta = std::make_shared<const BetaSchedule>(std::move(table));
  return spec;
}

std::vector<BetaPoint> triangular_beta_table(double total_variance, int points) {
  if (!(total_variance > 0.0) || !std::isfinite(total_variance)) {
    throw std::invalid_argument("total_variance must be positive and finite");
  }
  if (points < 3) throw std::invalid_argument("beta table needs at least 3 points");
  const double beta_max = 4.0 * total_variance;
  std::vector<BetaPoint> table(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(points - 1);
    table[static_cast<std::size_t>(i)] = {t, beta_max * std::min(t, 1.0 - t)};
  }
  return table;
}

void validate(const ScheduleSpec& spec) {
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) {
    throw std::invalid_argument("schedule invalid: alpha must lie in (0, 1)");
  }
  if (!(spec.k > 0.0) || !std::isfinite(spec.k)) {
    throw std::invalid_argument("schedule invalid: k must be positive");
  }
  if (spec.kind == BridgeKind::I2SB) {
    if (!spec.beta) throw std::invalid_argument("schedule invalid: beta table missing");
    const auto& table = spec.beta->table();
    check_table_shape(table);
    bool any_positive = false;
    for (std::size_t i = 1; i + 1 < table.size(); ++i) {
      if (table[i].beta > 0.0) any_positive = true;
    }
    if (!any_positive) {
      throw std::invalid_argument("schedule invalid: beta is zero on the interior");
    }
    for (double t : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      const double add = spec.sigma2(t) + spec.sigma2_bar(t);
      if (std::abs(add - spec.total_variance()) > 1e-10 * std::max(1.0, spec.total_variance())) {
        throw std::invalid_argument("schedule invalid: sigma2 + sigma2_bar != total");
      }
    }
  }
}

double pow_alpha(double t, double a) {
  if (t == 0.0) return 0.0;
  return std::exp(a * std::log(t));
}

I2sbCoeffs i2sb_coefficients(const ScheduleSpec& spec, double t) {
  if (spec.kind != BridgeKind::I2SB) {
    throw std::invalid_argument("i2sb_coefficients requires an I2SB schedule");
  }
  check_t_range(t);
  const double s2 = spec.sigma2(t);
  const double s2b = spec.sigma2_bar(t);
  const double denom = s2 + s2b;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("degenerate schedule: sigma2 + sigma2_bar is zero");
  }
  I2sbCoeffs c;
  c.mean_w0 = s2b / denom;
  c.mean_w1 = s2 / denom;
  c.noise = std::sqrt(s2 * s2b / denom);
  return c;
}

NadbCoeffs nadb_coefficients(const ScheduleSpec& spec, double t) {
  if (spec.kind != BridgeKind::NADB) {
    throw std::invalid_argument("nadb_coefficients requires an NADB schedule");
  }
  check_t_range(t);
  NadbCoeffs c;
  const double ta = pow_alpha(t, spec.alpha);
  c.mean_w0 = 1.0 - ta;
  c.mean_w1 = ta;
  c.gamma_x = spec.k * t * (1.0 - t);
  return c;
}

double target_noise_coefficient(const ScheduleSpec& spec, double t) {
  check_t_range(t);
  if (spec.kind == BridgeKind::NADB) {
    return spec.k * pow_alpha(t, 1.0 - spec.alpha) * (1.0 - t);
  }
  const double s2 = spec.sigma2(t);
  const double s2b = spec.sigma2_bar(t);
  const double denom = s2 + s2b;
  if (!(denom > 0.0)) {
    throw std::invalid_argument("degenerate schedule: sigma2 + sigma2_bar is zero");
  }
  return std::sqrt(s2b / denom);
}

double input_noise_coefficient(const ScheduleSpec& spec, double t) {
  check_t_range(t);
  if (spec.kind == BridgeKind::NADB) {
    return spec.k * t * (1.0 - t);
  }
  return i2sb_coefficients(spec, t).noise;
}

double calibrate_k(const ScheduleSpec& i2sb_spec) {
  if (i2sb_spec.kind != BridgeKind::I2SB || !i2sb_spec.beta) {
    throw std::invalid_argument("calibrate_k requires an I2SB schedule");
  }
  double peak = 0.0;
  for (const BetaPoint& p : i2sb_spec.beta->table()) {
    const double s2 = i2sb_spec.sigma2(p.t);
    const double s2b = i2sb_spec.sigma2_bar(p.t);
    const double denom = s2 + s2b;
    if (denom > 0.0) peak = std::max(peak, std::sqrt(s2 * s2b / denom));
  }
  if (!(peak > 0.0)) {
    throw std::invalid_argument("calibrate_k: schedule has zero noise everywhere");
  }
  return 4.0 * peak;
}

}  // namespace bridgelab
