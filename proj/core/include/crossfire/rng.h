#ifndef CROSSFIRE_RNG_H
#define CROSSFIRE_RNG_H

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace crossfire {

// Derives an independent 64-bit seed for a named sub-stream (splitmix64
// finalizer over the combined words). Used so that e.g. the impairment draws
// of one vehicle never depend on how many flows another vehicle owns.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t index = 0);

// Thin wrapper over mt19937_64. Uniform draws are mapped from raw engine bits
// so sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t Below(std::uint64_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Fisher-Yates shuffle driven by Rng::Below.
template <typename T>
void Shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.Below(i)]);
  }
}

}  // namespace crossfire

#endif  // CROSSFIRE_RNG_H
