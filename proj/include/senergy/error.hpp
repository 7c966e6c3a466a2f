#pragma once

#include <stdexcept>
#include <string>

namespace senergy {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A parameter lies outside its admissible range (rho, s, epsilon, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Inputs have inconsistent shapes (agent counts, matrix sizes). Distinct from
// a constraint violation: nothing was checked.
class DimensionError : public Error {
public:
    using Error::Error;
};

class PolicyError : public Error {
public:
    using Error::Error;
};

// A donation D_{i,j} went negative or the (B + C) lower bound failed.
class CertificateViolation : public Error {
public:
    using Error::Error;
};

// D_{u,u+1} could not cover the energy released by a twist step.
class PaymentFailure : public Error {
public:
    using Error::Error;
};

// Ledger accounts no longer agree with the configuration they are cleared
// against (trace chaining broken).
class LedgerDesync : public Error {
public:
    using Error::Error;
};

// The requested parameters lie outside the regime where a closed form holds.
class OutOfRegime : public Error {
public:
    using Error::Error;
};

class TraceError : public Error {
public:
    using Error::Error;
};

}  // namespace senergy
