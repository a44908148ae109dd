#pragma once

#include "bridgelab/schedule.hpp"

namespace bridgelab {

// One supervised draw from a bridge. The same z appears in xt and yt; yt is
// built from the endpoint-safe decomposition so both t = 0 and t = 1 are
// exact. xhat0 is the far endpoint actually interpolated toward; it equals x1
// when no mean estimate is in play.
struct BridgeSample {
  double t = 0.0;
  Vec x0, x1, xhat0, z;
  Vec xt;  // network input
  Vec yt;  // regression target
};

BridgeSample make_bridge_sample(const ScheduleSpec& spec, double t, const Vec& x0,
                                const Vec& x1, const Vec& xhat0, const Vec& z);

// Inverts the target parameterization at time t: xt - t^alpha * eps for NADB,
// xt - sigma_t * eps for I2SB. Rejects t == 0 where the target is undefined.
Vec predict_x0(const ScheduleSpec& spec, double t, const Vec& xt, const Vec& eps);

}  // namespace bridgelab
