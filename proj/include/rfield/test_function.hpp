#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>

#include "rfield/errors.hpp"

namespace rfield {

// Gaussian wave packet with cosine carrier,
//   f(x) = A exp(-|x - x0|^2 / (2 sigma^2)) cos(k0 . x),
// standing in for an arbitrary Schwartz-class smearing function. The carrier
// phase is referenced to the absolute coordinate, not the envelope center.
// Closed-form transform under f~(k) = int f(x) e^{-i k.x} d^d x:
//   f~(k) = (A/2) [ G(k - k0) + G(k + k0) ],
//   G(q)  = (2 pi)^{d/2} sigma^d exp(-sigma^2 |q|^2 / 2) exp(-i q . x0),
// which satisfies the reality condition f~(-k) = conj(f~(k)).
// `time` labels the equal-time slice the packet lives on; it only enters
// through the on-shell phase of the inner product.
struct test_function {
    int dimension = 1;
    double amplitude = 1.0;
    double sigma = 1.0;
    double time = 0.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::array<double, 3> carrier{0.0, 0.0, 0.0};

    friend bool operator==(const test_function&, const test_function&) = default;
};

inline void validate(const test_function& f) {
    if (f.dimension < 1 || f.dimension > 3)
        throw domain_error("test_function: dimension must be 1, 2 or 3");
    if (!(f.sigma > 0.0) || !std::isfinite(f.sigma))
        throw domain_error("test_function: sigma must be finite and > 0");
    if (!std::isfinite(f.amplitude))
        throw domain_error("test_function: amplitude must be finite");
    for (int i = 0; i < f.dimension; ++i)
        if (!std::isfinite(f.center[i]) || !std::isfinite(f.carrier[i]))
            throw domain_error("test_function: center and carrier must be finite");
}

inline double eval(const test_function& f, std::span<const double> x) {
    double r2 = 0.0;
    double phase = 0.0;
    for (int i = 0; i < f.dimension; ++i) {
        const double dx = x[i] - f.center[i];
        r2 += dx * dx;
        phase += f.carrier[i] * x[i];
    }
    return f.amplitude * std::exp(-r2 / (2.0 * f.sigma * f.sigma)) * std::cos(phase);
}

namespace detail {

inline std::complex<double> gaussian_transform(const test_function& f,
                                               std::span<const double> q) {
    double q2 = 0.0;
    double qx0 = 0.0;
    for (int i = 0; i < f.dimension; ++i) {
        q2 += q[i] * q[i];
        qx0 += q[i] * f.center[i];
    }
    const double root2pi_sigma =
        std::pow(2.0 * std::numbers::pi, 0.5 * f.dimension) *
        std::pow(f.sigma, f.dimension);
    const double mag = root2pi_sigma * std::exp(-0.5 * f.sigma * f.sigma * q2);
    return std::polar(mag, -qx0);
}

} // namespace detail

inline std::complex<double> fourier_transform(const test_function& f,
                                              std::span<const double> k) {
    validate(f);
    std::array<double, 3> qm{}, qp{};
    for (int i = 0; i < f.dimension; ++i) {
        qm[i] = k[i] - f.carrier[i];
        qp[i] = k[i] + f.carrier[i];
    }
    const auto gm = detail::gaussian_transform(f, std::span<const double>(qm.data(), f.dimension));
    const auto gp = detail::gaussian_transform(f, std::span<const double>(qp.data(), f.dimension));
    return 0.5 * f.amplitude * (gm + gp);
}

inline std::complex<double> fourier_transform(const test_function& f, double k) {
    return fourier_transform(f, std::span<const double>(&k, 1));
}

inline double carrier_magnitude(const test_function& f) {
    double s = 0.0;
    for (int i = 0; i < f.dimension; ++i) s += f.carrier[i] * f.carrier[i];
    return std::sqrt(s);
}

// |k| beyond which the transform is negligible (Gaussian tail < 1e-30);
// quadratures over mode space truncate here.
inline double fourier_truncation_radius(const test_function& f) {
    return carrier_magnitude(f) + 12.0 / f.sigma;
}

} // namespace rfield
