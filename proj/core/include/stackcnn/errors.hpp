#pragma once

#include <stdexcept>
#include <string>

namespace stackcnn {

/// Malformed input data: event files, model files, config files.
/// Messages carry the offending line or byte offset where known.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or argument values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace stackcnn
