#pragma once

namespace polyschwarz {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace polyschwarz
