#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace promptsent {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

// 64-bit FNV-1a, optionally continuing from a previous state.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t state = kFnvOffsetBasis) noexcept {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= kFnvPrime;
  }
  return state;
}

// Child seed for (base, tag, indices...). Used for per-tree and
// per-permutation streams so results never depend on thread scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices = {});

// Uniform integer in [0, bound) from a 64-bit engine, by rejection. Unlike
// std::uniform_int_distribution the mapping is identical on every platform.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

// Platform-independent Fisher-Yates shuffle.
template <typename It>
void stable_shuffle(It first, It last, std::mt19937_64& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace promptsent
