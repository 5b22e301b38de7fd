#pragma once

#include "hpflex/bundled_static_data.hpp"
#include "hpflex/static_data.hpp"

namespace hpflex {

// The static tables compiled into the binary.
inline const StaticData& bundled_static_data() {
  static const StaticData data = parse_static_data(std::string(kBundledStaticDataJson));
  return data;
}

}  // namespace hpflex
