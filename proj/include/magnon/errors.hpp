#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace magnon {

// configuration / input problems (CLI exit code 2)
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// numerical failures (CLI exit code 3)
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "numerical"; }
};

struct NonConvergenceError : NumericalError {
    Eigen::Vector3d last_r1, last_r2;
    double last_gradient;
    NonConvergenceError(const std::string& what, Eigen::Vector3d r1, Eigen::Vector3d r2, double grad)
        : NumericalError(what), last_r1(std::move(r1)), last_r2(std::move(r2)), last_gradient(grad) {}
    const char* code() const noexcept override { return "nonconvergence"; }
};

struct StructureError : NumericalError {
    double residual;
    StructureError(const std::string& what, double res) : NumericalError(what), residual(res) {}
    const char* code() const noexcept override { return "structure"; }
};

// linearization singular at the spin-flop / alignment point (r_c -> 0)
struct DiscontinuityError : NumericalError {
    using NumericalError::NumericalError;
    const char* code() const noexcept override { return "discontinuity"; }
};

struct AnisotropySignError : NumericalError {
    using NumericalError::NumericalError;
    const char* code() const noexcept override { return "anisotropy_sign"; }
};

struct DomainError : NumericalError {
    using NumericalError::NumericalError;
    const char* code() const noexcept override { return "domain"; }
};

struct SoftModeError : NumericalError {
    double omega_minus_sq;
    SoftModeError(const std::string& what, double w2) : NumericalError(what), omega_minus_sq(w2) {}
    const char* code() const noexcept override { return "superradiant"; }
};

// complex inner square root in the closed-form coupled frequencies
struct OutsideDomainError : NumericalError {
    using NumericalError::NumericalError;
    const char* code() const noexcept override { return "outside_validated_domain"; }
};

struct DegeneracyError : NumericalError {
    Eigen::Vector4cd u_lower, u_upper;
    DegeneracyError(const std::string& what, Eigen::Vector4cd l, Eigen::Vector4cd u)
        : NumericalError(what), u_lower(std::move(l)), u_upper(std::move(u)) {}
    const char* code() const noexcept override { return "degenerate"; }
};

struct NoCrossingError : NumericalError {
    using NumericalError::NumericalError;
    const char* code() const noexcept override { return "no_crossing"; }
};

struct ConvergenceWarning : NumericalError {
    using NumericalError::NumericalError;
    const char* code() const noexcept override { return "cutoff_convergence"; }
};

} // namespace magnon
