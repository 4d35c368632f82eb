#pragma once

#include <stdexcept>
#include <string>

namespace rollcones {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments that break an operation's contract (mixed metrics, bad sizes, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// |a(t)| fell below the null tolerance; the rolling picture is undefined there.
class NullAngularVelocity : public Error {
public:
    explicit NullAngularVelocity(double t)
        : Error("angular velocity is null at t = " + std::to_string(t)), time(t) {}
    double time;
};

/// Group reprojection had to correct more than the allowed amount in one step.
class StepTooLarge : public Error {
public:
    StepTooLarge(double t, double correction)
        : Error("reprojection correction " + std::to_string(correction) + " at t = " +
                std::to_string(t) + " exceeds limit; reduce the step"),
          time(t) {}
    double time;
};

class AllCusps : public Error {
public:
    AllCusps() : Error("no node of the curve has a usable tangent") {}
};

class NotTangent : public Error {
public:
    using Error::Error;
};

class CuspInRange : public Error {
public:
    explicit CuspInRange(double t)
        : Error("cusp or null tangent at t = " + std::to_string(t)), time(t) {}
    double time;
};

class BadFrame : public Error {
public:
    using Error::Error;
};

class PotentialVanishes : public Error {
public:
    using Error::Error;
};

class CuspAt : public Error {
public:
    explicit CuspAt(double t) : Error("body curve has a cusp at t = " + std::to_string(t)), time(t) {}
    double time;
};

class NotElliptic : public Error {
public:
    using Error::Error;
};

class FlatPoint : public Error {
public:
    explicit FlatPoint(double t)
        : Error("front track curvature vanishes at t = " + std::to_string(t)), time(t) {}
    double time;
};

class ZeroSpinor : public Error {
public:
    ZeroSpinor() : Error("spinor (u, v) is zero; angle undefined") {}
};

}  // namespace rollcones
