#pragma once

namespace fiberwalk {

inline constexpr const char* kVersion = "0.1.0";

} // namespace fiberwalk
