#pragma once

#include <stdexcept>
#include <string>

namespace mimobsp {

/// Thrown when a factorization or a derived quantity loses positive
/// definiteness.  `index` identifies the failing pivot / diagonal entry.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string what, int index)
        : std::runtime_error(std::move(what)), index_(index) {}

    int index() const noexcept { return index_; }

private:
    int index_;
};

/// Thrown when an exhaustive enumeration would exceed its configured cap.
class ScaleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace mimobsp
