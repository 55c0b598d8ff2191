#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "rfield/errors.hpp"

namespace rfield::detail {

// Radix-2 Stockham autosort FFT, power-of-two sizes, unnormalized:
//   forward:  X[k] = sum_j x[j] e^{-2 pi i j k / n}
//   inverse:  x[j] = sum_k X[k] e^{+2 pi i j k / n}   (no 1/n factor)
// Twiddles are precomputed once per plan; the transform itself uses only
// +,-,* so repeated runs are bitwise deterministic.
class fft_plan {
public:
    explicit fft_plan(std::size_t n) : n_(n), tw_(n / 2), work_(n) {
        if (n < 2 || (n & (n - 1)) != 0)
            throw domain_error("fft_plan: size must be a power of two >= 2");
        for (std::size_t i = 0; i < n / 2; ++i) {
            const double ang = 2.0 * std::numbers::pi * double(i) / double(n);
            tw_[i] = {std::cos(ang), std::sin(ang)};
        }
    }

    std::size_t size() const { return n_; }

    void forward(std::complex<double>* x) { transform(x, false); }
    void inverse(std::complex<double>* x) { transform(x, true); }

private:
    void transform(std::complex<double>* x, bool inv) {
        using cd = std::complex<double>;
        cd* a = x;
        cd* b = work_.data();
        std::size_t s = 1;
        for (std::size_t len = n_; len > 1; len >>= 1, s <<= 1) {
            const std::size_t half = len >> 1;
            const std::size_t twstride = n_ / len;
            for (std::size_t p = 0; p < half; ++p) {
                cd w = tw_[p * twstride];
                if (!inv) w = std::conj(w);
                const cd* a0 = a + s * p;
                const cd* a1 = a + s * (p + half);
                cd* b0 = b + s * 2 * p;
                cd* b1 = b + s * (2 * p + 1);
                for (std::size_t q = 0; q < s; ++q) {
                    const cd u = a0[q];
                    const cd v = a1[q];
                    b0[q] = u + v;
                    b1[q] = (u - v) * w;
                }
            }
            std::swap(a, b);
        }
        if (a != x)
            for (std::size_t i = 0; i < n_; ++i) x[i] = a[i];
    }

    std::size_t n_;
    std::vector<std::complex<double>> tw_;
    std::vector<std::complex<double>> work_;
};

// d-dimensional transform on a row-major cube with n sites per axis,
// d in {1,2,3}. Reuses one 1-d plan across axes; strided axes are gathered
// into a contiguous scratch line. Built once per lattice and reused across
// ensemble members.
class fft_nd {
public:
    fft_nd(int dim, std::size_t n) : dim_(dim), n_(n), plan_(n), line_(n) {}

    int dim() const { return dim_; }
    std::size_t n() const { return n_; }
    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < dim_; ++i) s *= n_;
        return s;
    }

    void forward(std::complex<double>* data) { transform(data, false); }
    void inverse(std::complex<double>* data) { transform(data, true); }

private:
    void transform(std::complex<double>* data, bool inv) {
        const std::size_t total = size();
        // axis = dim-1 is contiguous (stride 1); axis j has stride n^(dim-1-j)
        for (int axis = dim_ - 1; axis >= 0; --axis) {
            std::size_t stride = 1;
            for (int j = axis + 1; j < dim_; ++j) stride *= n_;
            const std::size_t lines = total / n_;
            for (std::size_t line = 0; line < lines; ++line) {
                // decompose line index into (outer, inner) around this axis
                const std::size_t inner = line % stride;
                const std::size_t outer = line / stride;
                std::complex<double>* base = data + outer * stride * n_ + inner;
                if (stride == 1) {
                    if (inv) plan_.inverse(base);
                    else plan_.forward(base);
                } else {
                    for (std::size_t i = 0; i < n_; ++i) line_[i] = base[i * stride];
                    if (inv) plan_.inverse(line_.data());
                    else plan_.forward(line_.data());
                    for (std::size_t i = 0; i < n_; ++i) base[i * stride] = line_[i];
                }
            }
        }
    }

    int dim_;
    std::size_t n_;
    fft_plan plan_;
    std::vector<std::complex<double>> line_;
};

} // namespace rfield::detail
