#pragma once

#include <string_view>

namespace bellsim {

// Embedded in every report so a stored result can be matched to the code
// that produced it. Deliberately constant (no build timestamp): reports must
// be byte-identical across re-runs of the same binary and configuration.
inline constexpr std::string_view kVersion = "bellsim 1.0.0";

} // namespace bellsim
