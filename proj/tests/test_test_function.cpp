#include <catch2/catch_amalgamated.hpp>

#include <rfield/errors.hpp>
#include <rfield/quadrature.hpp>
#include <rfield/test_function.hpp>

#include <cmath>
#include <complex>
#include <numbers>

namespace {

rfield::test_function packet1d(double a, double sigma, double x0, double k0) {
    rfield::test_function f;
    f.amplitude = a;
    f.sigma = sigma;
    f.center = {x0, 0.0, 0.0};
    f.carrier = {k0, 0.0, 0.0};
    return f;
}

} // namespace

TEST_CASE("validation rejects malformed packets") {
    rfield::test_function f;
    f.dimension = 0;
    CHECK_THROWS_AS(rfield::validate(f), rfield::domain_error);
    f.dimension = 1;
    f.sigma = 0.0;
    CHECK_THROWS_AS(rfield::validate(f), rfield::domain_error);
    f.sigma = 1.0;
    f.amplitude = std::nan("");
    CHECK_THROWS_AS(rfield::validate(f), rfield::domain_error);
}

TEST_CASE("position-space evaluation: envelope center vs absolute carrier phase") {
    const auto f = packet1d(2.0, 0.5, 3.0, 1.5);
    const double x = 3.0;
    // at the center the envelope is 1 but the carrier phase is k0 * x, not 0
    CHECK_THAT(rfield::eval(f, std::span<const double>(&x, 1)),
               Catch::Matchers::WithinRel(2.0 * std::cos(1.5 * 3.0), 1e-15));
    const double y = 3.7;
    CHECK_THAT(rfield::eval(f, std::span<const double>(&y, 1)),
               Catch::Matchers::WithinRel(
                   2.0 * std::exp(-0.49 / (2.0 * 0.25)) * std::cos(1.5 * 3.7), 1e-14));
}

TEST_CASE("transform matches frozen references") {
    const auto plain = packet1d(1.0, 1.0, 0.0, 0.0);
    CHECK_THAT(rfield::fourier_transform(plain, 0.0).real(),
               Catch::Matchers::WithinRel(2.506628274631000502, 1e-15));
    CHECK(rfield::fourier_transform(plain, 0.0).imag() == 0.0);

    const auto carried = packet1d(1.0, 1.0, 0.0, 0.8);
    const auto v2 = rfield::fourier_transform(carried, 0.8);
    CHECK_THAT(v2.real(), Catch::Matchers::WithinRel(1.601782216674525802, 1e-15));
    CHECK(v2.imag() == 0.0);

    const auto shifted = packet1d(0.9, 1.3, 0.4, -0.3);
    const auto v3 = rfield::fourier_transform(shifted, 0.5);
    CHECK_THAT(v3.real(), Catch::Matchers::WithinRel(2.223608694162590464, 1e-14));
    CHECK_THAT(v3.imag(), Catch::Matchers::WithinRel(-0.3818817197288699521, 1e-14));
}

TEST_CASE("2-d transform matches a frozen reference") {
    rfield::test_function f;
    f.dimension = 2;
    f.sigma = 0.7;
    f.center = {0.2, -0.1, 0.0};
    f.carrier = {1.0, 0.5, 0.0};
    const double k[2] = {0.3, 0.4};
    const auto v = rfield::fourier_transform(f, std::span<const double>(k, 2));
    CHECK_THAT(v.real(), Catch::Matchers::WithinRel(2.172715176083071258, 1e-14));
    CHECK_THAT(v.imag(), Catch::Matchers::WithinRel(0.03539380588270411227, 1e-13));
}

TEST_CASE("transform agrees with direct quadrature of f(x) e^{-ikx}") {
    const auto f = packet1d(1.2, 0.8, -0.5, 1.1);
    for (double k : {0.0, 0.4, -1.3, 2.0}) {
        const auto direct = rfield::integrate(
            [&](double x) {
                return rfield::eval(f, std::span<const double>(&x, 1)) *
                       std::polar(1.0, -k * x);
            },
            -0.5 - 14.0 * 0.8, -0.5 + 14.0 * 0.8);
        const auto closed = rfield::fourier_transform(f, k);
        CHECK_THAT(closed.real(), Catch::Matchers::WithinAbs(direct.real(), 1e-10));
        CHECK_THAT(closed.imag(), Catch::Matchers::WithinAbs(direct.imag(), 1e-10));
    }
}

TEST_CASE("reality condition: f~(-k) = conj(f~(k))") {
    const auto f = packet1d(0.7, 1.4, 2.3, 0.9);
    for (double k : {0.1, 0.77, 1.9, 5.0}) {
        const auto plus = rfield::fourier_transform(f, k);
        const auto minus = rfield::fourier_transform(f, -k);
        CHECK(minus.real() == Catch::Approx(plus.real()).margin(1e-18));
        CHECK(minus.imag() == Catch::Approx(-plus.imag()).margin(1e-18));
    }
}

TEST_CASE("truncation radius bounds the transform by the promised tail") {
    const auto f = packet1d(1.0, 0.6, 0.0, 2.5);
    const double r = rfield::fourier_truncation_radius(f);
    CHECK(r == Catch::Approx(2.5 + 12.0 / 0.6));
    const double peak = std::abs(rfield::fourier_transform(f, 2.5));
    CHECK(std::abs(rfield::fourier_transform(f, r)) < 1e-30 * peak);
    CHECK(std::abs(rfield::fourier_transform(f, -r)) < 1e-30 * peak);
}

TEST_CASE("carrier magnitude is the Euclidean norm over active axes") {
    rfield::test_function f;
    f.dimension = 2;
    f.carrier = {3.0, 4.0, 100.0};  // third component inactive in 2-d
    CHECK(rfield::carrier_magnitude(f) == 5.0);
}
