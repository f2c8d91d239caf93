#pragma once

#include <cstdint>

#include "oblim/grid.hpp"

namespace oblim {

/// 64-bit linear congruential generator; the output is the high 53 bits of
/// the state after each update, mapped to [0, 1). Fixed so that seeded data
/// is reproducible across implementations.
class Lcg64 {
 public:
  explicit Lcg64(std::uint64_t seed) : state_(seed) {}

  double uniform() {
    state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  /// Uniform on [-1, 1).
  double symmetric() { return 2.0 * uniform() - 1.0; }
  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// Zero-mean real field sum_m a_m cos(k_m.x) + b_m sin(k_m.x) over all modes
/// with 0 < max_a |m_a| <= max_mode, coefficients drawn from gen in [-1, 1).
Field random_band_limited(const GridSpec& grid, Lcg64& gen, int max_mode = 4);

VectorField random_band_limited_vector(const GridSpec& grid, Lcg64& gen, int max_mode = 4);
SymTensorField random_band_limited_tensor(const GridSpec& grid, Lcg64& gen, int max_mode = 4);

}  // namespace oblim
