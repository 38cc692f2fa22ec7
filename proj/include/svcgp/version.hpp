#pragma once

namespace svcgp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace svcgp
