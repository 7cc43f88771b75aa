#pragma once

namespace riskbias {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace riskbias
