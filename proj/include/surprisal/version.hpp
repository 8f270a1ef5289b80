#pragma once

namespace surprisal {

inline constexpr const char* version = "0.1.0";

}  // namespace surprisal
