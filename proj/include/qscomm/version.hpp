#pragma once

namespace qscomm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace qscomm
