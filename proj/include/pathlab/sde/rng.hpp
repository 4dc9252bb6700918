#pragma once

#include <array>
#include <cstdint>

namespace pathlab::sde {

/* Philox4x32-10 (Salmon et al., SC'11): a keyed bijection on 128-bit
   counters.  Every Gaussian in a run is addressed by
   (master seed, path index, step index, lane), so no generator state is
   shared between paths or threads. */
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key);
};

std::uint64_t splitmix64(std::uint64_t x);

class NormalStream {
 public:
  NormalStream(std::uint64_t master_seed, std::uint64_t path_index);

  // Standard normals for one time step; fills out[0..count).
  void step_normals(std::uint32_t step, int count, double* out) const;

 private:
  Philox4x32::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_;
};

}  // namespace pathlab::sde
