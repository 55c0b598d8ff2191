#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "rfield/detail/linalg.hpp"
#include "rfield/errors.hpp"
#include "rfield/kernels.hpp"
#include "rfield/smearing.hpp"
#include "rfield/test_function.hpp"

namespace rfield {

// Scalar-type policy for the marginal tables and the feasibility LP.
// double runs with the tolerances below; bell_exact.hpp specializes this for
// exact rationals (all tolerances zero, certificates exact).
template <class T>
struct bell_traits;

template <>
struct bell_traits<double> {
    static double table_tol() { return 1e-9; }
    static double pivot_tol() { return 1e-11; }
};

// p(a, b) for one setting pair; outcome index 0 is +1, 1 is -1.
template <class T>
struct basic_outcome_table {
    std::array<T, 4> p{};

    T& at(int a, int b) { return p[a * 2 + b]; }
    const T& at(int a, int b) const { return p[a * 2 + b]; }

    friend bool operator==(const basic_outcome_table&, const basic_outcome_table&) = default;
};

// The four bivariate outcome tables p_ij, setting i for region A and j for
// region B, both in {1, 2}.
template <class T>
struct basic_marginal_set {
    std::array<basic_outcome_table<T>, 4> tables;

    basic_outcome_table<T>& table(int i, int j) { return tables[(i - 1) * 2 + (j - 1)]; }
    const basic_outcome_table<T>& table(int i, int j) const {
        return tables[(i - 1) * 2 + (j - 1)];
    }

    friend bool operator==(const basic_marginal_set&, const basic_marginal_set&) = default;
};

using outcome_table = basic_outcome_table<double>;
using marginal_set = basic_marginal_set<double>;

template <class T>
T correlator(const basic_outcome_table<T>& t) {
    return t.p[0] - t.p[1] - t.p[2] + t.p[3];
}

template <class T>
T marginal_plus_a(const basic_outcome_table<T>& t) {
    return t.p[0] + t.p[1];
}

template <class T>
T marginal_plus_b(const basic_outcome_table<T>& t) {
    return t.p[0] + t.p[2];
}

// Table invariants plus no-signalling consistency. No-signalling failures
// are a distinct error: feasibility is then impossible for a trivial reason
// and the caller should know which remote setting leaked.
template <class T>
void validate(const basic_marginal_set<T>& m) {
    using std::abs;
    const T tol = bell_traits<T>::table_tol();
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const auto& t = m.table(i, j);
            T sum(0);
            for (const auto& p : t.p) {
                if (p < -tol)
                    throw invalid_tables_error("marginal_set: negative probability in table p_" +
                                               std::to_string(i) + std::to_string(j));
                sum += p;
            }
            if (abs(sum - T(1)) > tol)
                throw invalid_tables_error("marginal_set: table p_" + std::to_string(i) +
                                           std::to_string(j) + " does not sum to 1");
        }
    }
    for (int i = 1; i <= 2; ++i)
        if (abs(marginal_plus_a(m.table(i, 1)) - marginal_plus_a(m.table(i, 2))) > tol)
            throw no_signalling_error("marginal_set: A's marginal under setting " +
                                      std::to_string(i) + " depends on B's setting");
    for (int j = 1; j <= 2; ++j)
        if (abs(marginal_plus_b(m.table(1, j)) - marginal_plus_b(m.table(2, j))) > tol)
            throw no_signalling_error("marginal_set: B's marginal under setting " +
                                      std::to_string(j) + " depends on A's setting");
}

// S = E11 + E12 + E21 - E22.
inline double chsh_value(double e11, double e12, double e21, double e22) {
    for (double e : {e11, e12, e21, e22})
        if (!(std::fabs(e) <= 1.0 + 1e-12))
            throw domain_error("chsh_value: correlator outside [-1, 1]");
    return e11 + e12 + e21 - e22;
}

// E[sgn X sgn Y] for zero-mean jointly Gaussian (X, Y) with correlation rho:
// (2/pi) arcsin(rho).
inline double sign_correlator(double rho) {
    if (!(std::fabs(rho) <= 1.0 + 1e-12))
        throw domain_error("sign_correlator: correlation outside [-1, 1]");
    const double r = std::clamp(rho, -1.0, 1.0);
    return 2.0 * std::asin(r) / std::numbers::pi;
}

// CHSH value of the sign-binned observables of a 4x4 Gaussian covariance
// (A settings are observables 0, 1; B settings 2, 3). A joint distribution
// exists by construction, so |S| <= 2 for every nonsingular input.
inline double chsh_from_covariance(const covariance_matrix& c) {
    if (c.n != 4) throw domain_error("chsh_from_covariance: need a 4x4 covariance");
    const auto eig = detail::sym_eigenvalues(c.n, c.entries);
    if (!(eig.back() > 0.0) || eig.front() <= 1e-12 * eig.back())
        throw singular_covariance_error("chsh_from_covariance: covariance is singular; "
                                        "the sign correlators are undefined");
    auto rho = [&](std::size_t i, std::size_t j) {
        return std::clamp(c.at(i, j) / std::sqrt(c.at(i, i) * c.at(j, j)), -1.0, 1.0);
    };
    return chsh_value(sign_correlator(rho(0, 2)), sign_correlator(rho(0, 3)),
                      sign_correlator(rho(1, 2)), sign_correlator(rho(1, 3)));
}

// Sign-binned CHSH of four packets smeared against one random field.
inline double field_chsh(const test_function& fa1, const test_function& fa2,
                         const test_function& fb1, const test_function& fb2,
                         const spectral_kernel& kernel, const quad_options& opt = {}) {
    const std::array<test_function, 4> fs{fa1, fa2, fb1, fb2};
    return chsh_from_covariance(
        covariance_matrix_of(std::span<const test_function>(fs.data(), fs.size()), kernel, opt));
}

enum class feasibility { feasible, infeasible };

// Verdict of the quadrivariate marginal problem. Feasible: witness is a
// 16-entry joint q over (a1, a2, b1, b2), index bit k of ell set meaning
// outcome -1 (bits: a1, a2, b1, b2). Infeasible: the violated CHSH-type
// inequality as signs (s11, s12, s21, s22) and its value (> 2).
template <class T>
struct basic_feasibility_result {
    feasibility verdict = feasibility::feasible;
    std::vector<T> witness;
    std::array<int, 4> certificate_signs{0, 0, 0, 0};
    T certificate_value{};
};

using feasibility_result = basic_feasibility_result<double>;

namespace detail {

// Outcome index (0 for +1, 1 for -1) of party/setting inside joint index ell.
inline int joint_outcome(int ell, int bit) { return (ell >> bit) & 1; }

// Largest of the eight CHSH forms (sign patterns with product -1).
template <class T>
std::pair<std::array<int, 4>, T> max_chsh_pattern(const std::array<T, 4>& e) {
    std::array<int, 4> best_signs{1, 1, 1, -1};
    T best = e[0] + e[1] + e[2] - e[3];
    bool first = true;
    for (int mask = 0; mask < 16; ++mask) {
        std::array<int, 4> s;
        int prod = 1;
        for (int k = 0; k < 4; ++k) {
            s[k] = (mask >> k) & 1 ? -1 : 1;
            prod *= s[k];
        }
        if (prod != -1) continue;
        T val(0);
        for (int k = 0; k < 4; ++k) val += (s[k] > 0 ? e[k] : -e[k]);
        if (first || val > best) {
            best = val;
            best_signs = s;
            first = false;
        }
    }
    return {best_signs, best};
}

// Phase-1 simplex with Bland's rule: minimize the artificial sum for
// A q = b, q >= 0, b >= 0. Returns (residual infeasibility, q). Bland's rule
// guarantees termination on these (highly degenerate) systems; with exact
// scalars and pivot_tol = 0 the result is exact.
template <class T>
std::pair<T, std::vector<T>> phase1_simplex(std::size_t m, std::size_t n,
                                            const std::vector<T>& a, const std::vector<T>& b,
                                            const T& pivot_tol) {
    const std::size_t cols = n + m + 1;
    const std::size_t rhs = cols - 1;
    std::vector<T> tab(m * cols, T(0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) tab[i * cols + j] = a[i * n + j];
        tab[i * cols + n + i] = T(1);
        tab[i * cols + rhs] = b[i];
        basis[i] = n + i;
    }
    // reduced-cost row for minimizing the artificial sum; obj[rhs] is the
    // negated objective value
    std::vector<T> obj(cols, T(0));
    for (std::size_t j = 0; j < n; ++j) {
        T z(0);
        for (std::size_t i = 0; i < m; ++i) z += tab[i * cols + j];
        obj[j] = -z;
    }
    T zb(0);
    for (std::size_t i = 0; i < m; ++i) zb += b[i];
    obj[rhs] = -zb;

    for (;;) {
        // Bland: smallest-index improving column; artificials never re-enter
        std::size_t enter = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (obj[j] < -pivot_tol) {
                enter = j;
                break;
            }
        }
        if (enter == n) break;
        std::size_t leave = m;
        T best_ratio(0);
        for (std::size_t i = 0; i < m; ++i) {
            const T& aij = tab[i * cols + enter];
            if (aij > pivot_tol) {
                T num = tab[i * cols + rhs];
                if (num < T(0)) num = T(0);
                const T ratio = num / aij;
                if (leave == m || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave]))
                {
                    leave = i;
                    best_ratio = ratio;
                }
            }
        }
        if (leave == m)
            throw error("joint_feasible: simplex lost boundedness (numerical breakdown)");
        const T piv = tab[leave * cols + enter];
        for (std::size_t j = 0; j < cols; ++j) tab[leave * cols + j] /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const T f = tab[i * cols + enter];
            if (f == T(0)) continue;
            for (std::size_t j = 0; j < cols; ++j)
                tab[i * cols + j] -= f * tab[leave * cols + j];
        }
        {
            const T f = obj[enter];
            if (f != T(0))
                for (std::size_t j = 0; j < cols; ++j) obj[j] -= f * tab[leave * cols + j];
        }
        basis[leave] = enter;
    }

    std::vector<T> q(n, T(0));
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) q[basis[i]] = tab[i * cols + rhs];
    for (auto& v : q)
        if (v < T(0)) v = T(0);
    T infeas = -obj[rhs];
    if (infeas < T(0)) infeas = T(0);
    return {infeas, q};
}

} // namespace detail

// Does a quadrivariate joint distribution with the four prescribed bivariate
// marginals exist? Decided as a 16-variable linear feasibility problem;
// infeasible verdicts carry the violated CHSH-type inequality as a
// certificate (valid for validated no-signalling tables, where those are the
// only nontrivial facets).
template <class T>
basic_feasibility_result<T> joint_feasible(const basic_marginal_set<T>& m) {
    validate(m);
    constexpr std::size_t nv = 16;
    const std::size_t rows = 17;  // 16 marginal entries + normalization
    std::vector<T> a(rows * nv, T(0));
    std::vector<T> b(rows, T(0));
    std::size_t r = 0;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            for (int oa = 0; oa < 2; ++oa) {
                for (int ob = 0; ob < 2; ++ob) {
                    for (int ell = 0; ell < 16; ++ell) {
                        const int abit = i == 1 ? 0 : 1;
                        const int bbit = j == 1 ? 2 : 3;
                        if (detail::joint_outcome(ell, abit) == oa &&
                            detail::joint_outcome(ell, bbit) == ob)
                            a[r * nv + ell] = T(1);
                    }
                    const T& p = m.table(i, j).at(oa, ob);
                    b[r] = p < T(0) ? T(0) : p;
                    ++r;
                }
            }
        }
    }
    for (int ell = 0; ell < 16; ++ell) a[r * nv + ell] = T(1);
    b[r] = T(1);

    auto [infeas, q] =
        detail::phase1_simplex(rows, nv, a, b, bell_traits<T>::pivot_tol());

    basic_feasibility_result<T> out;
    if (infeas <= bell_traits<T>::table_tol()) {
        out.verdict = feasibility::feasible;
        out.witness = std::move(q);
        return out;
    }
    out.verdict = feasibility::infeasible;
    const std::array<T, 4> e{correlator(m.table(1, 1)), correlator(m.table(1, 2)),
                             correlator(m.table(2, 1)), correlator(m.table(2, 2))};
    auto [signs, value] = detail::max_chsh_pattern(e);
    out.certificate_signs = signs;
    out.certificate_value = value;
    return out;
}

// Independent decision path: for validated no-signalling 2x2x2 tables a
// joint exists iff all eight CHSH forms are <= 2.
template <class T>
bool fine_feasible(const basic_marginal_set<T>& m) {
    validate(m);
    const std::array<T, 4> e{correlator(m.table(1, 1)), correlator(m.table(1, 2)),
                             correlator(m.table(2, 1)), correlator(m.table(2, 2))};
    const auto [signs, value] = detail::max_chsh_pattern(e);
    (void)signs;
    return value <= T(2) + bell_traits<T>::table_tol();
}

// Tables with uniform single-party marginals and prescribed correlators:
// p(a, b) = (1 + ab E)/4.
template <class T>
basic_marginal_set<T> marginals_from_correlators(const std::array<T, 4>& e) {
    basic_marginal_set<T> m;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const T& eij = e[(i - 1) * 2 + (j - 1)];
            auto& t = m.table(i, j);
            for (int oa = 0; oa < 2; ++oa) {
                for (int ob = 0; ob < 2; ++ob) {
                    const int sign = (oa == ob) ? 1 : -1;
                    t.at(oa, ob) = (T(1) + (sign > 0 ? eij : -eij)) / T(4);
                }
            }
        }
    }
    return m;
}

// Product box: p_ij(a, b) = pA_i(a) pB_j(b) given the +1 probabilities.
template <class T>
basic_marginal_set<T> marginals_from_product(const std::array<T, 2>& pa_plus,
                                             const std::array<T, 2>& pb_plus) {
    basic_marginal_set<T> m;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            auto& t = m.table(i, j);
            for (int oa = 0; oa < 2; ++oa) {
                for (int ob = 0; ob < 2; ++ob) {
                    const T pa = oa == 0 ? pa_plus[i - 1] : T(1) - pa_plus[i - 1];
                    const T pb = ob == 0 ? pb_plus[j - 1] : T(1) - pb_plus[j - 1];
                    t.at(oa, ob) = pa * pb;
                }
            }
        }
    }
    return m;
}

} // namespace rfield
