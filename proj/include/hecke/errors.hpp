// errors.hpp
// Shared error type for operations that refuse inputs beyond their
// engineered range (CRT modulus budget, enumeration sizes, ...).
#pragma once

#include <stdexcept>
#include <string>

namespace hecke {

class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hecke
