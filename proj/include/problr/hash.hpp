#pragma once
// FNV-1a 64, used to fingerprint compiled grammars and tables so that models
// and artifacts refuse mismatched inputs.

#include <cstdint>
#include <string_view>

namespace problr {

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace problr
