#include "mmarket/rng.hpp"

namespace mmarket {

__extension__ using uint128 = unsigned __int128;

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection; exact for every bound.
  std::uint64_t x = engine_();
  uint128 m = static_cast<uint128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = engine_();
      m = static_cast<uint128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace mmarket
