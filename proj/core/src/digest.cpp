#include "promptsent/digest.hpp"

#include <string>

#include "promptsent/errors.hpp"

namespace promptsent {

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                          std::initializer_list<std::uint64_t> indices) {
  std::string key = std::to_string(base);
  key += '\x1f';
  key += tag;
  for (auto idx : indices) {
    key += '\x1f';
    key += std::to_string(idx);
  }
  return fnv1a64(key);
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound == 0) throw InvalidArgument("uniform_below: empty range");
  // Largest multiple of bound that fits, so the modulo is unbiased.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t draw = rng();
  while (draw > limit) draw = rng();
  return draw % bound;
}

}  // namespace promptsent
