#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <type_traits>
#include <utility>
#include <vector>

#include "rfield/detail/exact_sum.hpp"
#include "rfield/errors.hpp"

namespace rfield {

struct quad_options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    int max_segments = 4000;
    int initial_segments = 8;
};

namespace detail {

inline double mag(double x) { return std::fabs(x); }
inline double mag(const std::complex<double>& x) { return std::abs(x); }

inline void exact_add(exact_sum& re, exact_sum& im, double v) { re.add(v); (void)im; }
inline void exact_add(exact_sum& re, exact_sum& im, const std::complex<double>& v) {
    re.add(v.real());
    im.add(v.imag());
}
inline void exact_value(const exact_sum& re, const exact_sum& im, double& out) {
    out = re.value();
    (void)im;
}
inline void exact_value(const exact_sum& re, const exact_sum& im, std::complex<double>& out) {
    out = {re.value(), im.value()};
}

// 15-point Kronrod / 7-point Gauss abscissae and weights (QUADPACK dqk15).
inline constexpr double gk15_xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double gk15_wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk15_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

// One GK15 panel over [a,b]: Kronrod value, error estimate (QUADPACK model),
// and the integral of |f| for the rounding floor.
template <class T, class F>
void gk15_panel(F& f, double a, double b, T& result, double& abserr) {
    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::fabs(hlgth);

    T fv1[7], fv2[7];
    const T fc = f(centr);
    T resg = fc * gk15_wg[3];
    T resk = fc * gk15_wgk[7];
    double resabs = mag(fc) * gk15_wgk[7];
    for (int j = 0; j < 7; ++j) {
        const double absc = hlgth * gk15_xgk[j];
        fv1[j] = f(centr - absc);
        fv2[j] = f(centr + absc);
        const T fsum = fv1[j] + fv2[j];
        if (j % 2 == 1) resg = resg + fsum * gk15_wg[j / 2];
        resk = resk + fsum * gk15_wgk[j];
        resabs += gk15_wgk[j] * (mag(fv1[j]) + mag(fv2[j]));
    }
    const T reskh = resk * 0.5;
    double resasc = gk15_wgk[7] * mag(fc - reskh);
    for (int j = 0; j < 7; ++j)
        resasc += gk15_wgk[j] * (mag(fv1[j] - reskh) + mag(fv2[j] - reskh));

    result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    abserr = mag(resk - resg) * dhlgth;
    if (resasc != 0.0 && abserr != 0.0)
        abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
    const double epmach = std::numeric_limits<double>::epsilon();
    const double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * epmach))
        abserr = std::max(epmach * 50.0 * resabs, abserr);
}

} // namespace detail

// Globally adaptive GK15 integration over [a,b]; bisects the segment with
// the largest error estimate until
//   sum(err) <= max(abs_tol, rel_tol * |integral|),
// then returns the correctly rounded sum of segment values. Throws
// quadrature_error when the segment budget runs out. Works for real- and
// complex-valued integrands.
template <class F>
auto integrate(F&& f, double a, double b, const quad_options& opt = {})
    -> std::invoke_result_t<F&, double> {
    using T = std::invoke_result_t<F&, double>;
    struct segment {
        double a, b, err;
        T value;
        bool operator<(const segment& o) const { return err < o.err; }
    };

    std::vector<segment> heap;
    const int n0 = std::max(1, opt.initial_segments);
    double total_err = 0.0;
    T total_val{};
    for (int i = 0; i < n0; ++i) {
        segment s;
        s.a = a + (b - a) * double(i) / n0;
        s.b = a + (b - a) * double(i + 1) / n0;
        detail::gk15_panel(f, s.a, s.b, s.value, s.err);
        total_err += s.err;
        total_val = total_val + s.value;
        heap.push_back(s);
    }
    std::make_heap(heap.begin(), heap.end());

    while (total_err > std::max(opt.abs_tol, opt.rel_tol * detail::mag(total_val))) {
        if (int(heap.size()) >= opt.max_segments)
            throw quadrature_error("integrate: tolerance not reached within segment budget");
        std::pop_heap(heap.begin(), heap.end());
        segment worst = heap.back();
        heap.pop_back();
        total_err -= worst.err;
        total_val = total_val - worst.value;
        const double mid = 0.5 * (worst.a + worst.b);
        for (int half = 0; half < 2; ++half) {
            segment s;
            s.a = half == 0 ? worst.a : mid;
            s.b = half == 0 ? mid : worst.b;
            detail::gk15_panel(f, s.a, s.b, s.value, s.err);
            total_err += s.err;
            total_val = total_val + s.value;
            heap.push_back(s);
            std::push_heap(heap.begin(), heap.end());
        }
    }

    exact_sum re, im;
    for (const segment& s : heap) detail::exact_add(re, im, s.value);
    T out{};
    detail::exact_value(re, im, out);
    return out;
}

// Trapezoid rule with interval doubling for smooth periodic integrands over
// one full period (spectrally convergent). Used for angular averages.
template <class F>
auto integrate_periodic(F&& f, double period, const quad_options& opt = {})
    -> std::invoke_result_t<F&, double> {
    using T = std::invoke_result_t<F&, double>;
    int n = 8;
    T sum{};
    for (int j = 0; j < n; ++j) sum = sum + f(period * double(j) / n);
    T prev = sum * (period / n);
    while (n <= (1 << 15)) {
        for (int j = 0; j < n; ++j) sum = sum + f(period * (double(j) + 0.5) / n);
        n *= 2;
        const T cur = sum * (period / n);
        if (detail::mag(cur - prev) <=
            std::max(opt.abs_tol, opt.rel_tol * detail::mag(cur)))
            return cur;
        prev = cur;
    }
    throw quadrature_error("integrate_periodic: no convergence");
}

// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on the
// Legendre recurrence.
inline std::vector<std::pair<double, double>> gauss_legendre(int order) {
    std::vector<std::pair<double, double>> rule(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (double(i) + 0.75) / (double(order) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule[i] = {x, w};
        rule[order - 1 - i] = {-x, w};
    }
    if (order % 2 == 1) rule[order / 2].first = 0.0;
    return rule;
}

// Cache so repeated angular integrals do not recompute Legendre nodes.
class gauss_legendre_cache {
public:
    const std::vector<std::pair<double, double>>& get(int order) {
        auto it = rules_.find(order);
        if (it == rules_.end()) it = rules_.emplace(order, gauss_legendre(order)).first;
        return it->second;
    }

private:
    std::map<int, std::vector<std::pair<double, double>>> rules_;
};

// Gauss-Legendre with order doubling over [-1,1], for smooth integrands.
template <class F>
auto integrate_gl_doubling(F&& f, gauss_legendre_cache& cache, const quad_options& opt = {})
    -> std::invoke_result_t<F&, double> {
    using T = std::invoke_result_t<F&, double>;
    T prev{};
    bool have_prev = false;
    for (int order = 16; order <= 1024; order *= 2) {
        T cur{};
        for (const auto& [x, w] : cache.get(order)) cur = cur + f(x) * w;
        if (have_prev &&
            detail::mag(cur - prev) <= std::max(opt.abs_tol, opt.rel_tol * detail::mag(cur)))
            return cur;
        prev = cur;
        have_prev = true;
    }
    throw quadrature_error("integrate_gl_doubling: no convergence");
}

} // namespace rfield
