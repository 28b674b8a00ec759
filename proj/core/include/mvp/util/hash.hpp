#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace mvp {

/// Incremental 64-bit FNV-1a. Used for corpus content hashes.
class ContentHash {
 public:
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return state_; }
  std::string hex() const;

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace mvp
