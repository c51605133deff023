#pragma once

namespace coopinit {

inline constexpr const char* kVersion = "0.1.0";

// Identifier embedded in run manifests; stable for a given build.
const char* build_id();

}  // namespace coopinit
