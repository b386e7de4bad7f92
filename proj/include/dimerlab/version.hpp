#pragma once

#include "json.hpp"

namespace dimerlab {

inline constexpr const char* kVersion = "0.1.0";

/// Library, dependency and compiler versions plus the active kernel backend.
nlohmann::json build_info();

}  // namespace dimerlab
