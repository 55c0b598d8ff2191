#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "rfield/detail/linalg.hpp"
#include "rfield/errors.hpp"
#include "rfield/kernels.hpp"
#include "rfield/quadrature.hpp"
#include "rfield/test_function.hpp"

namespace rfield {

// Covariance of a set of smeared observables chi_{f_i}; the input to the
// Gaussian moment oracle. Row-major, symmetric.
struct covariance_matrix {
    std::size_t n = 0;
    std::vector<double> entries;

    covariance_matrix() = default;
    explicit covariance_matrix(std::size_t n_) : n(n_), entries(n_ * n_, 0.0) {}

    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return entries[i * n + j]; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) t += at(i, i);
        return t;
    }

    static covariance_matrix identity(std::size_t n_) {
        covariance_matrix c(n_);
        for (std::size_t i = 0; i < n_; ++i) c.at(i, i) = 1.0;
        return c;
    }
};

// Symmetric PSD up to tolerance 1e-10 * trace (covariances of real
// observables can acquire tiny negative eigenvalues through quadrature).
inline bool is_positive_semidefinite(const covariance_matrix& c,
                                     double tol_scale = 1e-10) {
    const auto eig = detail::sym_eigenvalues(c.n, c.entries);
    if (eig.empty()) return true;
    return eig.front() >= -tol_scale * std::max(c.trace(), 0.0) - 1e-300;
}

namespace detail {

// Magnitude scale of |f~|, used to decide whether a transform "vanishes" at
// k = 0 for the infrared checks.
inline double transform_scale(const test_function& f) {
    return std::fabs(f.amplitude) *
           std::pow(2.0 * std::numbers::pi, 0.5 * f.dimension) *
           std::pow(f.sigma, f.dimension);
}

// Degree of the omega -> 0 divergence of the mode-space weight:
// 1/(2 omega) for the inner product and vacuum kernel, 1/omega^2 for the
// thermal kernels. The integral int d^d k |k|^{d-1-degree} near 0 diverges
// iff d <= degree (log-divergent at equality), unless the transforms kill it.
inline void check_infrared(const test_function& a, const test_function& b,
                           double mass, int degree, const char* what) {
    if (mass > 0.0) return;
    if (a.dimension > degree) return;
    std::array<double, 3> zero{0.0, 0.0, 0.0};
    const auto fa = fourier_transform(a, std::span<const double>(zero.data(), a.dimension));
    const auto fb = fourier_transform(b, std::span<const double>(zero.data(), b.dimension));
    const double scale = transform_scale(a) * transform_scale(b);
    if (std::abs(fa) * std::abs(fb) > 1e-12 * scale)
        throw infrared_error(std::string(what) +
                             ": massless infrared divergence at k = 0; the packet "
                             "transforms must vanish there (carrier with "
                             "cos(k0.x0) = 0) in this dimension");
}

// int d^d k / (2 pi)^d conj(a~(k)) b~(k) w(|k|) for a radial weight w,
// evaluated by adaptive radial quadrature after a numeric angular average.
// Truncation at the larger packet truncation radius; the angular rules are
// spectrally convergent (smooth periodic / smooth on [-1,1]).
template <class W>
std::complex<double> mode_integral(const test_function& a, const test_function& b,
                                   W&& weight, const quad_options& opt) {
    using cd = std::complex<double>;
    const int d = a.dimension;
    const double kmax = std::max(fourier_truncation_radius(a), fourier_truncation_radius(b));
    const double norm = std::pow(2.0 * std::numbers::pi, -d);

    quad_options inner = opt;
    inner.abs_tol = opt.abs_tol * 1e-2;
    inner.rel_tol = std::min(opt.rel_tol, 1e-9);

    if (d == 1) {
        auto integrand = [&](double k) -> cd {
            const double kv[1] = {k};
            const std::span<const double> ks(kv, 1);
            return std::conj(fourier_transform(a, ks)) * fourier_transform(b, ks) *
                   weight(std::fabs(k));
        };
        return integrate(integrand, -kmax, kmax, opt) * norm;
    }

    gauss_legendre_cache gl;
    auto angular = [&](double r) -> cd {
        if (d == 2) {
            auto ring = [&](double theta) -> cd {
                const double kv[2] = {r * std::cos(theta), r * std::sin(theta)};
                const std::span<const double> ks(kv, 2);
                return std::conj(fourier_transform(a, ks)) * fourier_transform(b, ks);
            };
            return integrate_periodic(ring, 2.0 * std::numbers::pi, inner);
        }
        auto azimuthal = [&](double phi) -> cd {
            auto polar = [&](double mu) -> cd {
                const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
                const double kv[3] = {r * s * std::cos(phi), r * s * std::sin(phi), r * mu};
                const std::span<const double> ks(kv, 3);
                return std::conj(fourier_transform(a, ks)) * fourier_transform(b, ks);
            };
            return integrate_gl_doubling(polar, gl, inner);
        };
        return integrate_periodic(azimuthal, 2.0 * std::numbers::pi, inner);
    };
    auto radial = [&](double r) -> cd {
        const double jac = d == 2 ? r : r * r;
        return angular(r) * weight(r) * jac;
    };
    return integrate(radial, 0.0, kmax, opt) * norm;
}

} // namespace detail

// Hermitian inner product of two packets on the positive-frequency mass
// shell:
//   (g, f) = hbar int d^d k / (2 pi)^d conj(g~(k)) f~(k)
//            e^{-i omega (t_f - t_g)} / (2 omega),  omega = sqrt(k^2 + m^2).
// Conjugate symmetric, antilinear in g, linear in f; (f, f) >= 0. Equal-time
// real packets give a real value (the integrand pairs k with -k).
inline std::complex<double> inner_product(const test_function& g, const test_function& f,
                                          double mass, double hbar,
                                          const quad_options& opt = {}) {
    validate(g);
    validate(f);
    if (g.dimension != f.dimension)
        throw domain_error("inner_product: packets must share a dimension");
    if (!(mass >= 0.0) || !std::isfinite(mass))
        throw domain_error("inner_product: mass must be finite and >= 0");
    if (!(hbar > 0.0)) throw domain_error("inner_product: hbar must be > 0");
    detail::check_infrared(g, f, mass, 1, "inner_product");

    const double dt = f.time - g.time;
    auto weight = [&](double r) -> std::complex<double> {
        const double w = std::hypot(r, mass);
        return std::polar(hbar / (2.0 * w), -w * dt);
    };
    return detail::mode_integral(g, f, weight, opt);
}

// (g,f) - (f,g) = 2i Im(g,f): what a quantum field's measurement algebra
// retains and the random field discards. Identically zero for identical
// packets, and zero to quadrature tolerance for equal-time real packets.
inline std::complex<double> commutator_defect(const test_function& g, const test_function& f,
                                              double mass, double hbar,
                                              const quad_options& opt = {}) {
    if (g == f) return {0.0, 0.0};
    const auto gf = inner_product(g, f, mass, hbar, opt);
    return {0.0, 2.0 * gf.imag()};
}

// Equal-time covariance of smeared observables under a spectral kernel:
//   C_ij = int d^d k / (2 pi)^d conj(f_i~(k)) S(|k|) f_j~(k).
// For the vacuum kernel this equals Re (f_i, f_j). Symmetric PSD.
inline covariance_matrix covariance_matrix_of(std::span<const test_function> fs,
                                              const spectral_kernel& kernel,
                                              const quad_options& opt = {}) {
    validate(kernel);
    covariance_matrix c(fs.size());
    if (fs.empty()) return c;
    for (const auto& f : fs) {
        validate(f);
        if (f.dimension != kernel.dimension)
            throw domain_error("covariance_matrix_of: packet dimension must match kernel");
        if (f.time != fs[0].time)
            throw domain_error("covariance_matrix_of: equal-time statistics require all "
                               "packets on one time slice");
    }
    const int degree = kernel.kind == kernel_kind::vacuum ? 1 : 2;
    auto weight = [&](double r) -> std::complex<double> {
        return mode_variance(kernel, r);
    };
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i; j < fs.size(); ++j) {
            detail::check_infrared(fs[i], fs[j], kernel.mass, degree, "covariance_matrix_of");
            const auto v = detail::mode_integral(fs[i], fs[j], weight, opt);
            c.at(i, j) = v.real();
            c.at(j, i) = v.real();
        }
    }
    return c;
}

} // namespace rfield
