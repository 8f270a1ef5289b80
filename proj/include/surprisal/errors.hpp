#pragma once

#include <stdexcept>
#include <string>

namespace surprisal {

// Base class for everything thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user-supplied input: parse failures, schema violations, invariant
// violations in study summaries, invalid CLI combinations. CLI exit code 2.
class input_error : public error {
public:
    using error::error;
};

// Mathematical domain violation: argument outside the function's domain
// (negative chi-square statistic, quantile of 0 or 1, ...). CLI exit code 3.
class domain_error : public error {
public:
    using error::error;
};

// A probability underflowed the smallest positive representable value, so a
// logarithm (or quantile) of it is not meaningful. Carries the clamp boundary
// so callers can report how far the value saturated.
class saturation_error : public domain_error {
public:
    saturation_error(const std::string& what, double clamp_boundary)
        : domain_error(what), clamp_boundary_(clamp_boundary) {}

    double clamp_boundary() const noexcept { return clamp_boundary_; }

private:
    double clamp_boundary_;
};

}  // namespace surprisal
