#ifndef MVM_RNG_HPP
#define MVM_RNG_HPP

#include <cstdint>
#include <random>

namespace mvm {

/// Seeded 64-bit generator with deterministic stream splitting.
///
/// Every random quantity in the library is derived from `next()`, so a seed
/// fixes the whole output bit-for-bit. `uniform()` lies in the open interval
/// (0, 1).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  /// Seed for an independent sub-stream (e.g. a sampling block).
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix(mix(master) ^ mix(stream + 0x632be59bd9b4e019ULL));
  }

  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection keeps the draw unbiased
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  // splitmix64 finaliser
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace mvm

#endif  // MVM_RNG_HPP
