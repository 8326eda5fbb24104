#pragma once

#include <cstdint>
#include <initializer_list>

namespace linbandit {

// Counter-based randomness. Every value is a pure function of a 64-bit seed
// and a short tuple of 64-bit key words, so draws can be replayed in any
// order and shared between policies.

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t z);

// Folds key words into the seed: h = Mix64(seed); h = Mix64(h ^ w) per word.
std::uint64_t HashKey(std::uint64_t seed, std::initializer_list<std::uint64_t> words);

// Top 53 bits mapped to [0, 1).
double UnitInterval(std::uint64_t bits);

// Standard normal via Box-Muller on the two sub-keys (key, 0) and (key, 1).
double StandardNormalAt(std::uint64_t key);

// Purposes used when splitting a base seed into independent streams.
enum class StreamPurpose : std::uint64_t {
  kNoise = 0x4e4f495345ULL,        // "NOISE"
  kPerturbation = 0x5045525455ULL,  // "PERTU"
  kSampler = 0x53414d504cULL,       // "SAMPL"
  kEnvironment = 0x454e5649ULL,     // "ENVI"
  kThompson = 0x54484f4dULL,        // "THOM"
};

// seed = HashKey(base_seed, {replication, purpose}).
std::uint64_t DeriveSeed(std::uint64_t base_seed, std::uint64_t replication,
                         StreamPurpose purpose);

// Sequential view over a keyed source: the n-th draw uses key
// HashKey(seed, {n}). Each Next* call consumes exactly one counter value.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t NextBits();
  double NextUniform();
  double NextNormal();
  // Uniform over {0, ..., n-1}; n >= 1.
  std::uint64_t NextIndex(std::uint64_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t NextKey() { return HashKey(seed_, {counter_++}); }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace linbandit
