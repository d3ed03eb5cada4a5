#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace rtrg {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// parameter outside the mathematical domain of an operation
class DomainError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// special function evaluated at a pole
class SingularityError : public Error {
public:
    using Error::Error;
};

// flow integration ran into a nonanalyticity; E is where it gave up
class FlowSingularityError : public Error {
public:
    FlowSingularityError(const std::string& what, std::complex<double> E)
        : Error(what), E_(E) {}
    std::complex<double> E() const { return E_; }

private:
    std::complex<double> E_;
};

class FixedPointError : public Error {
public:
    using Error::Error;
};

// Laplace window too small for the integrand tail
class WindowError : public Error {
public:
    WindowError(const std::string& what, double tail) : Error(what), tail_(tail) {}
    double tail() const { return tail_; }

private:
    double tail_;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

class MapError : public Error {
public:
    using Error::Error;
};

// propagator denominator below the guard
class PoleProximity : public Error {
public:
    PoleProximity(const std::string& what, std::complex<double> E) : Error(what), E_(E) {}
    std::complex<double> E() const { return E_; }

private:
    std::complex<double> E_;
};

// feature finder failed during a transition search
class TransitionError : public Error {
public:
    TransitionError(const std::string& what, double T) : Error(what), T_(T) {}
    double temperature() const { return T_; }

private:
    double T_;
};

} // namespace rtrg
