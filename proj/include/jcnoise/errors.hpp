#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jcnoise {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotHermitian : public Error {
public:
    using Error::Error;
};

class NoConvergence : public Error {
public:
    using Error::Error;
};

class NonFinite : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class MethodDiverged : public Error {
public:
    using Error::Error;
};

class ResonantOnly : public Error {
public:
    using Error::Error;
};

class EmptyWindow : public Error {
public:
    using Error::Error;
};

/// Raised when the probability mass a state places above the Fock cutoff
/// exceeds the accepted tail bound. Carries the offending mass and a cutoff
/// that would satisfy the bound.
class CutoffTooSmall : public Error {
public:
    CutoffTooSmall(const std::string& what, double tail_mass, std::size_t suggested_cutoff)
        : Error(what), tail_mass_(tail_mass), suggested_cutoff_(suggested_cutoff) {}

    double tail_mass() const noexcept { return tail_mass_; }
    std::size_t suggested_cutoff() const noexcept { return suggested_cutoff_; }

private:
    double tail_mass_;
    std::size_t suggested_cutoff_;
};

} // namespace jcnoise
