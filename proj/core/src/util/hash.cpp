#include "mvp/util/hash.hpp"

#include <cstdio>

namespace mvp {

std::string ContentHash::hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace mvp
