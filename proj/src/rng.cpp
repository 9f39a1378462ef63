#include "csws/rng.hpp"

#include <boost/math/distributions/normal.hpp>

namespace csws {
namespace rng {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(Counter ctr, std::uint64_t key) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  std::uint32_t x0 = ctr.x0, x1 = ctr.x1, x2 = ctr.x2, x3 = ctr.x3;
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, x0, hi0, lo0);
    mulhilo(kMul1, x2, hi1, lo1);
    x0 = hi1 ^ x1 ^ k0;
    x1 = lo1;
    x2 = hi0 ^ x3 ^ k1;
    x3 = lo0;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {x0, x1, x2, x3};
}

double uniform01(Counter ctr, std::uint64_t key) {
  const auto out = philox4x32(ctr, key);
  const std::uint64_t bits =
      (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  // 53 significand bits, offset by half an ulp so 0 and 1 are unreachable.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

double normal(Counter ctr, std::uint64_t key) {
  static const boost::math::normal_distribution<double> std_normal;
  return boost::math::quantile(std_normal, uniform01(ctr, key));
}

}  // namespace rng
}  // namespace csws
