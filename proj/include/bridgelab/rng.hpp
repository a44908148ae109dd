#pragma once

#include <array>
#include <cstdint>

#include "bridgelab/common.hpp"

namespace bridgelab {

// Philox4x32-10 counter-based generator. A (seed, stream) pair selects an
// independent sequence; the draw index is the counter, so parallel streams
// are reproducible regardless of interleaving.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) {
    const std::uint64_t k = splitmix(seed);
    key_[0] = static_cast<std::uint32_t>(k);
    key_[1] = static_cast<std::uint32_t>(k >> 32);
    stream_lo_ = static_cast<std::uint32_t>(stream);
    stream_hi_ = static_cast<std::uint32_t>(stream >> 32);
  }

  std::uint64_t next_u64() {
    if (block_pos_ >= 2) {
      block_ = philox_block(counter_++);
      block_pos_ = 0;
    }
    const int i = 2 * block_pos_++;
    return (static_cast<std::uint64_t>(block_[i + 1]) << 32) | block_[i];
  }

  // Uniform on the open interval (0, 1): 53 random bits offset by half an ulp,
  // so log(uniform()) is always finite.
  double uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  void fill_normal(Vec& v) {
    for (double& x : v) x = normal();
  }

  Vec normal_vec(std::size_t n) {
    Vec v(n);
    fill_normal(v);
    return v;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  static std::uint32_t mulhi(std::uint32_t a, std::uint32_t b, std::uint32_t* lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    *lo = static_cast<std::uint32_t>(p);
    return static_cast<std::uint32_t>(p >> 32);
  }

  std::array<std::uint32_t, 4> philox_block(std::uint64_t ctr) const {
    std::array<std::uint32_t, 4> x = {static_cast<std::uint32_t>(ctr),
                                      static_cast<std::uint32_t>(ctr >> 32),
                                      stream_lo_, stream_hi_};
    std::uint32_t k0 = key_[0];
    std::uint32_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint32_t lo0, lo1;
      const std::uint32_t hi0 = mulhi(0xD2511F53u, x[0], &lo0);
      const std::uint32_t hi1 = mulhi(0xCD9E8D57u, x[2], &lo1);
      x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return x;
  }

  std::uint32_t key_[2];
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int block_pos_ = 2;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stream ids used by the library so that independent phases of a run never
// share a random sequence.
namespace streams {
constexpr std::uint64_t kEpsInit = 0;
constexpr std::uint64_t kMeanInit = 1;
constexpr std::uint64_t kMeanBatches = 2;
constexpr std::uint64_t kBridgeBatches = 3;
constexpr std::uint64_t kEval = 4;
constexpr std::uint64_t kProbeBase = 1000;       // + t-grid index
constexpr std::uint64_t kTrajectoryBase = 2000;  // + sample index
}  // namespace streams

}  // namespace bridgelab
