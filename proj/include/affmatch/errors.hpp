#pragma once

#include <stdexcept>
#include <string>

namespace affmatch {

// Invalid configuration: unknown criterion, malformed strategy, bad flags.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid input data: unparsable fixture lines, rejected query values.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace affmatch
