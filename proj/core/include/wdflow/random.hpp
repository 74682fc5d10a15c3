#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <utility>
#include <vector>

#include "wdflow/text.hpp"

namespace wdflow {

// mt19937_64 with a portable bounded draw, so sequences are identical across
// standard libraries (std::uniform_int_distribution is implementation-defined).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Derives an independent stream from a base seed and a string key.
  static SeededRng keyed(std::uint64_t seed, std::string_view key) {
    return SeededRng(text::splitmix64(seed ^ text::fnv1a64(key)));
  }

  // Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wdflow
