#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace meshrel {

using NodeId = int;

// Error categories double as CLI exit codes.
enum class ErrorCode : int {
    validation = 2,
    resource_cap = 3,
    io = 4,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised when a graph expected to be acyclic contains a directed cycle.
class CycleError : public Error {
public:
    CycleError(std::vector<NodeId> cycle, const std::string& message)
        : Error(ErrorCode::validation, message), cycle_(std::move(cycle)) {}

    // Nodes of one directed cycle, in traversal order.
    const std::vector<NodeId>& cycle() const noexcept { return cycle_; }

private:
    std::vector<NodeId> cycle_;
};

// A computation refused to run because a size limit would be exceeded.
class CapExceeded : public Error {
public:
    CapExceeded(std::size_t observed, std::size_t cap, const std::string& message)
        : Error(ErrorCode::resource_cap, message), observed_(observed), cap_(cap) {}

    std::size_t observed() const noexcept { return observed_; }
    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t observed_;
    std::size_t cap_;
};

}  // namespace meshrel
