#pragma once

#include <stdexcept>
#include <string>

namespace rfield {

// Base class for every failure this library reports. Subclasses exist so
// callers (and the CLI exit-code mapping) can branch on the failure class
// without parsing messages.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition violations: invalid parameter combinations, dimension
// mismatches, out-of-range inputs.
class domain_error : public error {
public:
    using error::error;
};

// A requested value diverges because a zero-frequency mode carries infinite
// variance (omega = 0 with the chosen kernel and dimension).
class infrared_error : public error {
public:
    using error::error;
};

// crossover_wavenumber has no real solution (hbar*m > 2*kT).
class no_crossover_error : public error {
public:
    using error::error;
};

// A test function's effective support does not fit inside the periodic box.
class support_error : public error {
public:
    using error::error;
};

// Adaptive quadrature failed to reach the requested tolerance within the
// segment budget.
class quadrature_error : public error {
public:
    using error::error;
};

// Moment order above the configured pairing-enumeration cap.
class unsupported_order_error : public error {
public:
    using error::error;
};

// Covariance matrix not (strictly) positive definite where that is required.
class singular_covariance_error : public error {
public:
    using error::error;
};

// Marginal tables are not valid probability tables.
class invalid_tables_error : public error {
public:
    using error::error;
};

// Marginal tables are internally inconsistent: a single-party marginal
// depends on the remote setting. Reported as its own class because the
// feasibility question is then ill-posed rather than merely infeasible.
class no_signalling_error : public error {
public:
    using error::error;
};

// Ensemble accumulator misuse: observable-list mismatch, merging stats with
// different declarations, or reading estimators from an empty ensemble.
class ensemble_error : public error {
public:
    using error::error;
};

// File parsing or serialization failure.
class io_error : public error {
public:
    using error::error;
};

} // namespace rfield
