#include "bridgelab/tasks.hpp"

#include <algorithm>
#include <cmath>

namespace bridgelab {

namespace {

// Sum of 2-4 rectangles, clipped to [0, 1]. Rectangles may degenerate to a
// single row or column; amplitudes keep the patch away from pure black.
void draw_rectangle_patch(CounterRng& rng, int side, Vec& out) {
  out.assign(static_cast<std::size_t>(side) * side, 0.0);
  const int n_rects = 2 + static_cast<int>(rng.uniform_index(3));
  for (int r = 0; r < n_rects; ++r) {
    int r0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(side)));
    int r1 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(side)));
    int c0 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(side)));
    int c1 = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(side)));
    if (r0 > r1) std::swap(r0, r1);
    if (c0 > c1) std::swap(c0, c1);
    const double amp = rng.uniform(0.25, 1.0);
    for (int i = r0; i <= r1; ++i) {
      for (int j = c0; j <= c1; ++j) {
        out[static_cast<std::size_t>(i) * side + j] += amp;
      }
    }
  }
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
}

int mirror_index(int i, int n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - i - 1;
  return i;
}

}  // namespace

PairedDataset make_gauss_channel(int dim, double noise_sigma) {
  if (dim <= 0) throw std::invalid_argument("gauss_channel: dim must be positive");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("gauss_channel: noise_sigma must be finite and >= 0");
  }
  PairedDataset ds;
  ds.name = "gauss_channel";
  ds.dim = dim;
  ds.degradation = "additive gaussian noise, sigma=" + std::to_string(noise_sigma);
  ds.draw = [dim, noise_sigma](CounterRng& rng, Vec& x0, Vec& x1) {
    x0.resize(static_cast<std::size_t>(dim));
    x1.resize(static_cast<std::size_t>(dim));
    rng.fill_normal(x0);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      x1[i] = x0[i] + noise_sigma * rng.normal();
    }
  };
  return ds;
}

Vec apply_kernel3(const Vec& img, int side, BlurKernel kernel) {
  if (side <= 0 || img.size() != static_cast<std::size_t>(side) * side) {
    throw std::invalid_argument("apply_kernel3: image is not side*side");
  }
  double k1d[3];
  if (kernel == BlurKernel::Uniform3) {
    k1d[0] = k1d[1] = k1d[2] = 1.0 / 3.0;
  } else {
    k1d[0] = 0.25;
    k1d[1] = 0.5;
    k1d[2] = 0.25;
  }
  Vec out(img.size(), 0.0);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      double acc = 0.0;
      for (int dr = -1; dr <= 1; ++dr) {
        const int rr = mirror_index(r + dr, side);
        for (int dc = -1; dc <= 1; ++dc) {
          const int cc = mirror_index(c + dc, side);
          acc += k1d[dr + 1] * k1d[dc + 1] * img[static_cast<std::size_t>(rr) * side + cc];
        }
      }
      out[static_cast<std::size_t>(r) * side + c] = acc;
    }
  }
  return out;
}

PairedDataset make_patch_blur(int patch_side, BlurKernel kernel) {
  if (patch_side < 3) throw std::invalid_argument("patch_blur: patch_side must be >= 3");
  PairedDataset ds;
  ds.name = "patch_blur";
  ds.dim = patch_side * patch_side;
  ds.degradation = kernel == BlurKernel::Uniform3 ? "3x3 uniform blur" : "3x3 gaussian blur";
  ds.draw = [patch_side, kernel](CounterRng& rng, Vec& x0, Vec& x1) {
    draw_rectangle_patch(rng, patch_side, x0);
    x1 = apply_kernel3(x0, patch_side, kernel);
  };
  return ds;
}

PairedDataset make_patch_quantize(int patch_side, int levels) {
  if (patch_side < 3) throw std::invalid_argument("patch_quantize: patch_side must be >= 3");
  if (levels < 2) throw std::invalid_argument("patch_quantize: levels must be >= 2");
  PairedDataset ds;
  ds.name = "patch_quantize";
  ds.dim = patch_side * patch_side;
  ds.degradation = std::to_string(levels) + "-level quantization";
  ds.draw = [patch_side, levels](CounterRng& rng, Vec& x0, Vec& x1) {
    draw_rectangle_patch(rng, patch_side, x0);
    x1.resize(x0.size());
    const double scale = static_cast<double>(levels - 1);
    for (std::size_t i = 0; i < x0.size(); ++i) {
      x1[i] = std::round(x0[i] * scale) / scale;
    }
  };
  return ds;
}

std::vector<Vec> cluster_centers_clean(int modes) {
  if (modes < 1) throw std::invalid_argument("clusters: modes must be >= 1");
  constexpr double pi = 3.14159265358979323846;
  std::vector<Vec> centers(static_cast<std::size_t>(modes));
  for (int m = 0; m < modes; ++m) {
    const double th = 2.0 * pi * m / modes;
    centers[static_cast<std::size_t>(m)] = {2.0 * std::cos(th), 2.0 * std::sin(th)};
  }
  return centers;
}

std::vector<Vec> cluster_centers_degraded(int modes) {
  if (modes < 1) throw std::invalid_argument("clusters: modes must be >= 1");
  constexpr double pi = 3.14159265358979323846;
  std::vector<Vec> centers(static_cast<std::size_t>(modes));
  for (int m = 0; m < modes; ++m) {
    const double th = 2.0 * pi * m / modes + 0.5;
    centers[static_cast<std::size_t>(m)] = {4.0 * std::cos(th), 4.0 * std::sin(th)};
  }
  return centers;
}

PairedDataset make_2d_clusters(int modes) {
  const std::vector<Vec> clean = cluster_centers_clean(modes);
  const std::vector<Vec> degraded = cluster_centers_degraded(modes);
  PairedDataset ds;
  ds.name = "clusters2d";
  ds.dim = 2;
  ds.degradation = "mode translation over " + std::to_string(modes) + " clusters";
  ds.draw = [clean, degraded, modes](CounterRng& rng, Vec& x0, Vec& x1) {
    const std::size_t m = rng.uniform_index(static_cast<std::uint64_t>(modes));
    x0 = {clean[m][0] + kClusterSigma * rng.normal(),
          clean[m][1] + kClusterSigma * rng.normal()};
    x1 = {degraded[m][0] + kClusterSigma * rng.normal(),
          degraded[m][1] + kClusterSigma * rng.normal()};
  };
  return ds;
}

}  // namespace bridgelab
