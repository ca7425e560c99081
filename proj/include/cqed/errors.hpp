// errors.hpp: exception hierarchy shared by all cqed modules

#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

// Invalid physical configuration or violated input contract.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Eigensolver failure or integrator instability.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Reading configs or writing result files failed.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqed
