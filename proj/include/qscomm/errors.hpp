#pragma once

#include <stdexcept>

namespace qscomm {

// Exit-code mapping used by the CLI: ConfigError -> 2, NumericalError -> 3, IoError -> 4.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qscomm
