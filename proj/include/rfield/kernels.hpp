#pragma once

#include <cmath>
#include <span>
#include <string>

#include "rfield/errors.hpp"

namespace rfield {

// Per-mode spectral variance S(k) of a stationary zero-mean Gaussian field,
// for the three states this library samples. With omega = sqrt(k^2 + m^2):
//   vacuum:           S = hbar / (2 omega)
//   classical_gibbs:  S = kT / omega^2
//   quantum_thermal:  S = (hbar / (2 omega)) * coth(hbar omega / (2 kT))
// The thermal state is stored as a variance (the reciprocal of the Gaussian
// exponent weight), so all three states share one sampling interface.
// Units: c = 1; hbar and kT stay explicit parameters throughout.
enum class kernel_kind { vacuum, classical_gibbs, quantum_thermal };

struct spectral_kernel {
    kernel_kind kind = kernel_kind::vacuum;
    double mass = 1.0;      // inverse length
    double hbar = 1.0;      // action
    double kT = 0.0;        // energy; > 0 required for the thermal kinds
    int dimension = 1;      // spatial dimension for quadrature and sampling

    friend bool operator==(const spectral_kernel&, const spectral_kernel&) = default;
};

inline const char* kind_name(kernel_kind k) {
    switch (k) {
        case kernel_kind::vacuum: return "vacuum";
        case kernel_kind::classical_gibbs: return "classical_gibbs";
        default: return "quantum_thermal";
    }
}

inline void validate(const spectral_kernel& kernel) {
    if (kernel.dimension < 1 || kernel.dimension > 3)
        throw domain_error("spectral_kernel: dimension must be 1, 2 or 3");
    if (!(kernel.mass >= 0.0) || !std::isfinite(kernel.mass))
        throw domain_error("spectral_kernel: mass must be finite and >= 0");
    switch (kernel.kind) {
        case kernel_kind::vacuum:
            if (!(kernel.hbar > 0.0)) throw domain_error("vacuum kernel: hbar must be > 0");
            break;
        case kernel_kind::classical_gibbs:
            if (!(kernel.kT > 0.0))
                throw domain_error("classical_gibbs kernel: kT must be > 0");
            break;
        case kernel_kind::quantum_thermal:
            if (!(kernel.hbar > 0.0))
                throw domain_error("quantum_thermal kernel: hbar must be > 0");
            if (kernel.kT == 0.0)
                throw domain_error(
                    "quantum_thermal kernel with kT = 0 is the vacuum kernel; "
                    "request kind = vacuum instead");
            if (!(kernel.kT > 0.0))
                throw domain_error("quantum_thermal kernel: kT must be > 0");
            break;
    }
}

inline spectral_kernel make_vacuum(double mass, double hbar, int dimension = 1) {
    spectral_kernel k{kernel_kind::vacuum, mass, hbar, 0.0, dimension};
    validate(k);
    return k;
}

inline spectral_kernel make_classical_gibbs(double mass, double kT, int dimension = 1) {
    spectral_kernel k{kernel_kind::classical_gibbs, mass, 1.0, kT, dimension};
    validate(k);
    return k;
}

inline spectral_kernel make_quantum_thermal(double mass, double hbar, double kT,
                                            int dimension = 1) {
    spectral_kernel k{kernel_kind::quantum_thermal, mass, hbar, kT, dimension};
    validate(k);
    return k;
}

namespace detail {

// coth with a guarded series below x = 1e-4: 1/tanh(x) loses relative
// accuracy to cancellation as x -> 0 while coth x = 1/x + x/3 - O(x^3)
// is exact to machine precision there.
inline double coth(double x) {
    if (x < 1e-4) return 1.0 / x + x / 3.0;
    return 1.0 / std::tanh(x);
}

// x * coth(x); -> 1 as x -> 0 with deviation x^2/3.
inline double x_coth_x(double x) {
    if (x < 1e-4) return 1.0 + x * x / 3.0;
    return x / std::tanh(x);
}

} // namespace detail

inline double omega(const spectral_kernel& kernel, double k_mag) {
    return std::hypot(k_mag, kernel.mass);
}

// S(|k|). Pure; throws infrared_error when the requested mode carries
// divergent variance (omega = 0, i.e. massless k = 0 mode).
inline double mode_variance(const spectral_kernel& kernel, double k_mag) {
    validate(kernel);
    if (!std::isfinite(k_mag)) throw domain_error("mode_variance: k must be finite");
    const double w = omega(kernel, k_mag);
    if (w == 0.0) {
        if (kernel.kind == kernel_kind::classical_gibbs)
            throw infrared_error(
                "classical_gibbs mode variance diverges at omega = 0 "
                "(massless zero mode); exclude the zero mode when sampling");
        throw infrared_error(std::string(kind_name(kernel.kind)) +
                             " mode variance diverges at omega = 0");
    }
    switch (kernel.kind) {
        case kernel_kind::vacuum:
            return kernel.hbar / (2.0 * w);
        case kernel_kind::classical_gibbs:
            return kernel.kT / (w * w);
        default: {
            const double x = kernel.hbar * w / (2.0 * kernel.kT);
            return kernel.hbar / (2.0 * w) * detail::coth(x);
        }
    }
}

inline double mode_variance(const spectral_kernel& kernel, std::span<const double> k) {
    double s = 0.0;
    for (double c : k) s += c * c;
    return mode_variance(kernel, std::sqrt(s));
}

namespace detail {

inline double thermal_x(const spectral_kernel& kernel, double k_mag) {
    if (!(kernel.kT > 0.0))
        throw domain_error("variance ratio: kT must be > 0");
    if (!(kernel.hbar > 0.0))
        throw domain_error("variance ratio: hbar must be > 0");
    const double w = omega(kernel, k_mag);
    if (w == 0.0)
        throw infrared_error("variance ratio diverges at omega = 0");
    return kernel.hbar * w / (2.0 * kernel.kT);
}

} // namespace detail

// S_quantum_thermal / S_classical_gibbs = x coth x, x = hbar omega / (2 kT).
// -> 1 at low k (classical regime), -> x at high k.
inline double variance_ratio_to_classical(const spectral_kernel& kernel, double k_mag) {
    return detail::x_coth_x(detail::thermal_x(kernel, k_mag));
}

// S_quantum_thermal / S_vacuum = coth x; monotone decreasing in |k|, -> 1 at
// high k (vacuum regime).
inline double variance_ratio_to_vacuum(const spectral_kernel& kernel, double k_mag) {
    return detail::coth(detail::thermal_x(kernel, k_mag));
}

// The wavenumber where x = hbar omega / (2 kT) crosses 1, i.e. where the
// classical and vacuum variances coincide: k* = sqrt((2kT/hbar)^2 - m^2).
inline double crossover_wavenumber(const spectral_kernel& kernel) {
    if (!(kernel.kT > 0.0)) throw domain_error("crossover_wavenumber: kT must be > 0");
    if (!(kernel.hbar > 0.0)) throw domain_error("crossover_wavenumber: hbar must be > 0");
    const double w_star = 2.0 * kernel.kT / kernel.hbar;
    if (kernel.mass > w_star)
        throw no_crossover_error(
            "no crossover: hbar*m > 2*kT, the whole spectrum is in the x > 1 regime");
    return std::sqrt((w_star - kernel.mass) * (w_star + kernel.mass));
}

} // namespace rfield
