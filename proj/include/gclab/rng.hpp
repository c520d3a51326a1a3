#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gclab {

// splitmix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

// Deterministic generator: xoshiro256** 1.0 (Blackman & Vigna), state seeded by
// four consecutive splitmix64 outputs of the user seed.
//
// Derived draws:
//   uniform()   = (next_u64() >> 11) * 2^-53, in [0, 1)
//   bernoulli(p)= p <= 0 ? false : p >= 1 ? true : uniform() < p
//   gaussian()  = Box-Muller cosine branch on (1 - uniform(), uniform()); two
//                 engine draws per sample, nothing cached
//   below(n)    = rejection sampling: draw x until x >= (2^64 - n) mod n, return x mod n
//   shuffle     = Fisher-Yates from the back, swapping i with below(i + 1)
//   fork(tag)   = new generator seeded by splitmix64-mixing the four state
//                 words with `tag`; the parent is not advanced
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();
  bool bernoulli(double p);
  double gaussian();
  std::uint64_t below(std::uint64_t n);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  Rng fork(std::uint64_t tag) const;

  const std::array<std::uint64_t, 4>& state() const { return s_; }

 private:
  Rng() = default;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace gclab
