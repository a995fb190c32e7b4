#pragma once

namespace ogl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ogl
