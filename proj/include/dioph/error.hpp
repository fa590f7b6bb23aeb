#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace dioph {

enum class ErrorKind {
    Parse,
    Domain,
    Depth,
    Precision,
    Validation,
    DegenerateGamma,
    Hypothesis,
    Resource,
    Internal,
};

const char* kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, std::optional<long> depth = std::nullopt)
        : std::runtime_error(std::string(kind_name(kind)) + " error: " + what), kind_(kind), depth_(depth) {}

    ErrorKind kind() const { return kind_; }
    // Depth reached when a stream ran out; set only for Depth errors.
    std::optional<long> depth() const { return depth_; }

private:
    ErrorKind kind_;
    std::optional<long> depth_;
};

}  // namespace dioph
