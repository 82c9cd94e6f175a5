#pragma once

#include <stdexcept>
#include <string>

namespace memwave {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class FrameError : public Error {
public:
    using Error::Error;
};

class AmbiguityError : public Error {
public:
    using Error::Error;
};

// Two members of an exponential family (or two zeros of the product) coincide.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, double condition_number, int suggested_N)
        : Error(what), condition_number_(condition_number), suggested_N_(suggested_N) {}
    double condition_number() const noexcept { return condition_number_; }
    int suggested_N() const noexcept { return suggested_N_; }

private:
    double condition_number_;
    int suggested_N_;
};

class UnscalableRowError : public Error {
public:
    UnscalableRowError(const std::string& what, int mode) : Error(what), mode_(mode) {}
    int mode() const noexcept { return mode_; }

private:
    int mode_;
};

}  // namespace memwave
