#include <catch2/catch_amalgamated.hpp>

#include <rfield/detail/fft.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace {

using cplx = std::complex<double>;

// O(n^2) reference with the same sign conventions as the library: forward
// uses e^{-2 pi i jk/n}, inverse uses e^{+2 pi i jk/n}, both unnormalized.
std::vector<cplx> naive_dft(const std::vector<cplx>& in, int sign) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * 2.0 * std::numbers::pi * double(j * k % n) / double(n);
            acc += in[j] * std::polar(1.0, ang);
        }
        out[k] = acc;
    }
    return out;
}

std::vector<cplx> random_grid(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> d;
    std::vector<cplx> v(n);
    for (auto& x : v) x = {d(gen), d(gen)};
    return v;
}

double max_err(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("1-d transform matches the quadratic-time reference") {
    for (std::size_t n : {4u, 8u, 64u, 256u}) {
        auto v = random_grid(n, unsigned(n));
        const auto fwd_ref = naive_dft(v, -1);
        const auto inv_ref = naive_dft(v, +1);

        rfield::detail::fft_plan plan(n);
        auto fwd = v;
        plan.forward(fwd.data());
        auto inv = v;
        plan.inverse(inv.data());

        CHECK(max_err(fwd, fwd_ref) < 1e-11 * double(n));
        CHECK(max_err(inv, inv_ref) < 1e-11 * double(n));
    }
}

TEST_CASE("inverse(forward(x)) returns n * x") {
    const std::size_t n = 128;
    auto v = random_grid(n, 99);
    auto w = v;
    rfield::detail::fft_plan plan(n);
    plan.forward(w.data());
    plan.inverse(w.data());
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(w[i] - double(n) * v[i]));
    CHECK(m < 1e-12 * double(n));
}

TEST_CASE("multidimensional transform matches axis-separated reference") {
    // forward_nd on a dim-d cube = apply the 1-d reference along each axis.
    for (int dim : {2, 3}) {
        const std::size_t n = dim == 2 ? 16 : 8;
        std::size_t total = 1;
        for (int a = 0; a < dim; ++a) total *= n;
        auto v = random_grid(total, unsigned(dim));

        auto ref = v;
        // transform along axis `ax` of the row-major cube
        for (int ax = dim - 1; ax >= 0; --ax) {
            std::size_t stride = 1;
            for (int a = ax + 1; a < dim; ++a) stride *= n;
            std::vector<cplx> line(n);
            for (std::size_t base = 0; base < total; ++base) {
                // visit each line once: base must have index 0 along ax
                if ((base / stride) % n != 0) continue;
                for (std::size_t j = 0; j < n; ++j) line[j] = ref[base + j * stride];
                const auto out = naive_dft(line, -1);
                for (std::size_t j = 0; j < n; ++j) ref[base + j * stride] = out[j];
            }
        }

        rfield::detail::fft_nd plan(dim, n);
        auto got = v;
        plan.forward(got.data());
        CHECK(max_err(got, ref) < 1e-10 * double(total));
    }
}

TEST_CASE("delta input transforms to a constant") {
    const std::size_t n = 32;
    std::vector<cplx> v(n, 0.0);
    v[0] = 1.0;
    rfield::detail::fft_plan plan(n);
    plan.forward(v.data());
    for (const auto& x : v) {
        CHECK(x.real() == Catch::Approx(1.0).margin(1e-14));
        CHECK(x.imag() == Catch::Approx(0.0).margin(1e-14));
    }
}
