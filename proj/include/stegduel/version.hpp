#pragma once

namespace stegduel {

inline constexpr const char* kToolVersion = "stegduel 1.0.0";

}  // namespace stegduel
