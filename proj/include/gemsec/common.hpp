#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gemsec {

using NodeId = std::uint32_t;
using ClusterId = std::uint32_t;

// Bad input supplied by the caller: malformed files, invalid parameters,
// inconsistent shapes. The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace gemsec
