#pragma once

#include <cstdint>

namespace branchlab {

// splitmix64 finalizer. Stateless: hashing (key + index) gives a
// counter-based stream, so draws can be computed in any order or in
// parallel with bit-identical results.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

  std::uint64_t bits(std::uint64_t index) const { return splitmix64(key_ ^ (index * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL)); }

  // uniform in [0, 1)
  double uniform(std::uint64_t index) const {
    return static_cast<double>(bits(index) >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t index, std::uint64_t n) const {
    return bits(index) % n;
  }

 private:
  std::uint64_t key_;
};

}  // namespace branchlab
