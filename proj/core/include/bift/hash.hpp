#pragma once

#include <cstdint>
#include <string_view>

namespace bift {

// FNV-1a, used for name-keyed parameter init and config fingerprints.
inline uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace bift
