#include "linbandit/keyed_random.h"

#include <cmath>
#include <numbers>

namespace linbandit {

std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t HashKey(std::uint64_t seed, std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = Mix64(seed);
  for (std::uint64_t w : words) h = Mix64(h ^ w);
  return h;
}

double UnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double StandardNormalAt(std::uint64_t key) {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - UnitInterval(Mix64(key ^ 0x0ULL));
  const double u2 = UnitInterval(Mix64(key ^ 0x1ULL));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t DeriveSeed(std::uint64_t base_seed, std::uint64_t replication,
                         StreamPurpose purpose) {
  return HashKey(base_seed, {replication, static_cast<std::uint64_t>(purpose)});
}

std::uint64_t RandomStream::NextBits() { return NextKey(); }

double RandomStream::NextUniform() { return UnitInterval(NextKey()); }

double RandomStream::NextNormal() { return StandardNormalAt(NextKey()); }

std::uint64_t RandomStream::NextIndex(std::uint64_t n) {
  const unsigned __int128 wide = static_cast<unsigned __int128>(NextKey()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace linbandit
