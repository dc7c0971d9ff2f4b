#pragma once

#include <stdexcept>
#include <string>

namespace rprove {

// Base of every error raised by the prover. Routine signals (a step that
// could not be validated, an ambiguous sign) are reported through status
// values instead; exceptions are reserved for contract violations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInterval : public Error {
public:
    using Error::Error;
};

class DivisionByZeroInterval : public Error {
public:
    DivisionByZeroInterval() : Error("interval division by an interval containing zero") {}
};

class DomainError : public Error {
public:
    using Error::Error;
};

class TStarViolation : public Error {
public:
    using Error::Error;
};

class BetaRangeError : public Error {
public:
    using Error::Error;
};

class SingularTime : public Error {
public:
    SingularTime() : Error("Taylor coefficients requested at a time interval touching t <= 0") {}
};

class MaxStepsExceeded : public Error {
public:
    using Error::Error;
};

class AmbiguousSign : public Error {
public:
    using Error::Error;
};

class PlanningFailure : public Error {
public:
    using Error::Error;
};

class OracleAmbiguous : public Error {
public:
    using Error::Error;
};

class CoverGap : public Error {
public:
    CoverGap(std::size_t position, const std::string& what)
        : Error(what), position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace rprove
