// version.hpp — tool version reported in run manifests
#pragma once

namespace roqs {

inline constexpr const char* version_string = "0.1.0";

}  // namespace roqs
