#pragma once
#include <stdexcept>
#include <string>

namespace qtomo {

// File parsing / serialization failure.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical diagnostic: iteration cap hit, drift beyond tolerance, etc.
// Carries the last computed quantity (last iterate, measured probability, ...).
class numerical_error : public std::runtime_error {
public:
    numerical_error(const std::string& what, double diagnostic)
        : std::runtime_error(what), diagnostic_(diagnostic) {}
    double diagnostic() const { return diagnostic_; }

private:
    double diagnostic_;
};

} // namespace qtomo
