#pragma once

#include <functional>
#include <string>
#include <utility>

#include "bridgelab/common.hpp"
#include "bridgelab/rng.hpp"

namespace bridgelab {

// A paired sampler: each draw yields a clean vector x0 and its degraded
// partner x1 from the same underlying event. All randomness comes from the
// caller's CounterRng, so (seed, stream) fully determines the stream of pairs.
struct PairedDataset {
  std::string name;
  int dim = 0;
  std::string degradation;
  std::function<void(CounterRng&, Vec& x0, Vec& x1)> draw;

  std::pair<Vec, Vec> sample(CounterRng& rng) const {
    Vec x0, x1;
    draw(rng, x0, x1);
    return {std::move(x0), std::move(x1)};
  }
};

// x0 ~ N(0, I), x1 = x0 + noise_sigma * eta.
PairedDataset make_gauss_channel(int dim, double noise_sigma);

enum class BlurKernel { Uniform3, Gaussian3 };

// 3x3 blur with mirrored edges (border pixel repeated), which keeps the patch
// mean exactly for any symmetric normalized kernel. Exposed so tests can feed
// impulses and constants directly.
Vec apply_kernel3(const Vec& img, int side, BlurKernel kernel);

// Clean patches are sums of 2-4 random axis-aligned rectangles clipped to
// [0, 1]; x1 is the blurred patch.
PairedDataset make_patch_blur(int patch_side, BlurKernel kernel);

// Same prior; x1 = round(x0 * (levels-1)) / (levels-1).
PairedDataset make_patch_quantize(int patch_side, int levels);

// 2-D mixture pairs with shared mode labels: x1 scatters around the degraded
// centers, x0 around the clean center of the same mode.
PairedDataset make_2d_clusters(int modes);

std::vector<Vec> cluster_centers_clean(int modes);
std::vector<Vec> cluster_centers_degraded(int modes);

// Mode scatter used by make_2d_clusters, exposed for tests.
constexpr double kClusterSigma = 0.1;

}  // namespace bridgelab
