#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "rfield/detail/exact_sum.hpp"
#include "rfield/detail/fft.hpp"
#include "rfield/errors.hpp"
#include "rfield/kernels.hpp"
#include "rfield/lattice.hpp"
#include "rfield/rng.hpp"
#include "rfield/smearing.hpp"
#include "rfield/test_function.hpp"

namespace rfield {

// One draw of the random field: the real field values, row-major over sites,
// plus the kernel and seed that produced them. max_imag_residue is the
// largest imaginary part discarded when the Hermitian mode synthesis was
// reduced to a real field; the reality invariant bounds it by 1e-12 x RMS.
struct field_sample {
    lattice lat;
    spectral_kernel kernel;
    std::uint64_t member_seed = 0;
    std::vector<double> values;
    double max_imag_residue = 0.0;
};

struct sample_options {
    // Massless kernels have no finite k = 0 mode variance; excluding the
    // zero mode (setting it to 0) is the documented regularization.
    bool exclude_zero_mode = false;

    friend bool operator==(const sample_options&, const sample_options&) = default;
};

// S(k_n) per flat mode index. The normalization convention: mode amplitudes
// are drawn with E|xi_n|^2 = S(k_n)/L^d, so lattice sums (1/L^d) sum_n
// approximate continuum integrals int d^d k/(2 pi)^d as a -> 0, N a -> inf.
inline std::vector<double> lattice_spectrum(const spectral_kernel& kernel,
                                            const lattice& lat,
                                            const sample_options& opt = {}) {
    validate(kernel);
    validate(lat);
    if (kernel.dimension != lat.dimension)
        throw domain_error("lattice_spectrum: kernel dimension must match lattice");
    if (kernel.mass == 0.0 && !opt.exclude_zero_mode)
        throw infrared_error("lattice_spectrum: a massless kernel has no finite "
                             "k = 0 mode variance; enable exclude_zero_mode");
    const std::size_t total = site_count(lat);
    std::vector<double> s(total);
    double k[3];
    for (std::size_t flat = 0; flat < total; ++flat) {
        const double kmag = mode_wavenumber(lat, flat, k);
        s[flat] = (flat == 0 && opt.exclude_zero_mode) ? 0.0 : mode_variance(kernel, kmag);
    }
    return s;
}

namespace detail {

// Complex amplitude of one mode for one member: a pure function of
// (member_seed, canonical mode index), so any subset of modes can be drawn
// in any order with identical results. Pair modes share one stream with
// their conjugate partner; self-conjugate modes are real.
inline std::complex<double> mode_amplitude(const lattice& lat, std::uint64_t member_seed,
                                           std::size_t flat, double s_over_v) {
    const std::size_t partner = conjugate_mode(lat, flat);
    if (partner == flat) {
        const auto [n0, n1] = normal_pair(member_seed, flat, 0, stream_tag_mode);
        (void)n1;
        return {n0 * std::sqrt(s_over_v), 0.0};
    }
    const std::size_t canon = std::min(flat, partner);
    const auto [n0, n1] = normal_pair(member_seed, canon, 0, stream_tag_mode);
    const double sig = std::sqrt(0.5 * s_over_v);
    const std::complex<double> xi{n0 * sig, n1 * sig};
    return flat == canon ? xi : std::conj(xi);
}

// Fill grid with mode amplitudes and inverse-transform to the real field.
// Shared by sample_field and the ensemble runner (which reuses the plan).
inline void synthesize_field(const lattice& lat, std::uint64_t member_seed,
                             std::span<const double> spectrum, double volume,
                             fft_nd& plan, std::vector<std::complex<double>>& grid,
                             std::vector<double>& values, double& max_imag) {
    const std::size_t total = spectrum.size();
    grid.resize(total);
    for (std::size_t flat = 0; flat < total; ++flat)
        grid[flat] = mode_amplitude(lat, member_seed, flat, spectrum[flat] / volume);
    plan.inverse(grid.data());
    values.resize(total);
    max_imag = 0.0;
    for (std::size_t i = 0; i < total; ++i) {
        values[i] = grid[i].real();
        max_imag = std::max(max_imag, std::fabs(grid[i].imag()));
    }
}

} // namespace detail

// Real Gaussian field with per-mode variance S(k_n)/L^d and Hermitian mode
// symmetry xi_{-k} = conj(xi_k). Deterministic in (kernel, lattice, seed).
inline field_sample sample_field(const spectral_kernel& kernel, const lattice& lat,
                                 std::uint64_t member_seed,
                                 const sample_options& opt = {}) {
    const auto spectrum = lattice_spectrum(kernel, lat, opt);
    detail::fft_nd plan(lat.dimension, lat.n);
    std::vector<std::complex<double>> grid;
    field_sample out;
    out.lat = lat;
    out.kernel = kernel;
    out.member_seed = member_seed;
    detail::synthesize_field(lat, member_seed, spectrum, box_volume(lat), plan, grid,
                             out.values, out.max_imag_residue);
    return out;
}

// Site weights of a packet on the lattice: the packet evaluated at the
// nearest periodic image of each site. Requires the effective support
// |x - x0| <= 8 sigma to fit inside the box.
inline std::vector<double> lattice_weights(const test_function& f, const lattice& lat) {
    validate(f);
    validate(lat);
    if (f.dimension != lat.dimension)
        throw domain_error("lattice_weights: packet dimension must match lattice");
    const double L = box_length(lat);
    if (16.0 * f.sigma > L)
        throw support_error("lattice_weights: packet support (8 sigma ball) does not "
                            "fit inside the periodic box; enlarge the lattice");
    const std::size_t total = site_count(lat);
    std::vector<double> w(total);
    std::size_t idx[3] = {0, 0, 0};
    std::array<double, 3> x{};
    for (std::size_t flat = 0; flat < total; ++flat) {
        detail::decode_site(lat, flat, idx);
        for (int a = 0; a < lat.dimension; ++a) {
            const double d = lat.spacing * double(idx[a]) - f.center[a];
            x[a] = f.center[a] + std::remainder(d, L);
        }
        w[flat] = eval(f, std::span<const double>(x.data(), f.dimension));
    }
    return w;
}

// chi_f = a^d sum_x w_x Phi_x with an exactly rounded sum.
inline double smear(const field_sample& sample, std::span<const double> weights) {
    if (weights.size() != sample.values.size())
        throw domain_error("smear: weight count must match site count");
    exact_sum s;
    for (std::size_t i = 0; i < weights.size(); ++i)
        if (weights[i] != 0.0) s.add(weights[i] * sample.values[i]);
    return cell_volume(sample.lat) * s.value();
}

inline double smear(const field_sample& sample, const test_function& f) {
    const auto w = lattice_weights(f, sample.lat);
    return smear(sample, std::span<const double>(w.data(), w.size()));
}

// F(k_n) = a^d sum_x w_x e^{-i k_n . x}: the discrete counterpart of the
// packet transform. chi_f = sum_n xi_n conj(F_n), so Var(chi_f) =
// (1/L^d) sum_n S(k_n) |F_n|^2.
inline std::vector<std::complex<double>> weight_transform(const test_function& f,
                                                          const lattice& lat) {
    const auto w = lattice_weights(f, lat);
    std::vector<std::complex<double>> grid(w.begin(), w.end());
    detail::fft_nd plan(lat.dimension, lat.n);
    plan.forward(grid.data());
    const double cell = cell_volume(lat);
    for (auto& g : grid) g *= cell;
    return grid;
}

// (1/L^d) sum_n S(k_n): the exact single-site variance of the synthesized
// field, used as the direct-summation oracle against empirical variances.
inline double lattice_site_variance(const spectral_kernel& kernel, const lattice& lat,
                                    const sample_options& opt = {}) {
    const auto s = lattice_spectrum(kernel, lat, opt);
    exact_sum sum;
    for (double v : s) sum.add(v);
    return sum.value() / box_volume(lat);
}

// Exact lattice variance of chi_f: (1/L^d) sum_n S(k_n) |F(k_n)|^2.
inline double lattice_variance(const spectral_kernel& kernel, const lattice& lat,
                               const test_function& f, const sample_options& opt = {}) {
    const auto s = lattice_spectrum(kernel, lat, opt);
    const auto ft = weight_transform(f, lat);
    exact_sum sum;
    for (std::size_t n = 0; n < s.size(); ++n) sum.add(s[n] * std::norm(ft[n]));
    return sum.value() / box_volume(lat);
}

// Exact lattice covariance of smeared observables; the lattice counterpart
// of covariance_matrix_of, computed by direct mode summation.
inline covariance_matrix lattice_covariance(const spectral_kernel& kernel,
                                            const lattice& lat,
                                            std::span<const test_function> fs,
                                            const sample_options& opt = {}) {
    const auto s = lattice_spectrum(kernel, lat, opt);
    for (const auto& f : fs)
        if (f.time != fs[0].time)
            throw domain_error("lattice_covariance: equal-time statistics require all "
                               "packets on one time slice");
    std::vector<std::vector<std::complex<double>>> ft;
    ft.reserve(fs.size());
    for (const auto& f : fs) ft.push_back(weight_transform(f, lat));
    covariance_matrix c(fs.size());
    const double vol = box_volume(lat);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i; j < fs.size(); ++j) {
            exact_sum sum;
            for (std::size_t n = 0; n < s.size(); ++n)
                sum.add(s[n] * (std::conj(ft[i][n]) * ft[j][n]).real());
            c.at(i, j) = sum.value() / vol;
            c.at(j, i) = c.at(i, j);
        }
    }
    return c;
}

// Declaration of what an ensemble run should estimate. Fixed at stats
// creation; accumulation validates against it.
struct stats_request {
    std::vector<test_function> observables;
    std::vector<double> lambdas;                      // char-function probe grid
    std::vector<std::vector<std::size_t>> monomials;  // index multisets, e.g. {0,0,1,1}
    bool sign_pairs = false;                          // sign-product correlators

    friend bool operator==(const stats_request&, const stats_request&) = default;
};

inline void validate(const stats_request& req) {
    if (req.observables.empty())
        throw ensemble_error("stats_request: at least one observable is required");
    for (const auto& f : req.observables) validate(f);
    for (double l : req.lambdas)
        if (!std::isfinite(l)) throw ensemble_error("stats_request: lambda must be finite");
    for (const auto& m : req.monomials) {
        if (m.empty()) throw ensemble_error("stats_request: empty monomial");
        for (std::size_t i : m)
            if (i >= req.observables.size())
                throw ensemble_error("stats_request: monomial index out of range");
    }
}

namespace detail {

inline std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    // i < j < n, row-compressed upper triangle
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

} // namespace detail

// Streaming moment / characteristic-function / sign-correlation accumulator.
// Every accumulator is an exactly rounded sum (or an integer count), so the
// final estimates are bit-identical under any permutation of samples and any
// partition into merged sub-accumulators. Estimator accessors throw
// ensemble_error while the ensemble is empty.
class ensemble_stats {
public:
    ensemble_stats() = default;

    explicit ensemble_stats(stats_request req) : req_(std::move(req)) {
        validate(req_);
        const std::size_t n = req_.observables.size();
        const std::size_t pairs = n * (n - 1) / 2;
        sv_.resize(n);
        sv2_.resize(n);
        sv3_.resize(n);
        sv4_.resize(n);
        svv_.resize(pairs);
        scos_.resize(n * req_.lambdas.size());
        ssin_.resize(n * req_.lambdas.size());
        scos2_.resize(n * req_.lambdas.size());
        sprod_.resize(req_.monomials.size());
        sprod2_.resize(req_.monomials.size());
        if (req_.sign_pairs) {
            agree_.assign(pairs, 0);
            disagree_.assign(pairs, 0);
        }
    }

    const stats_request& request() const { return req_; }
    std::uint64_t count() const { return count_; }

    // One sample's observable values, in request order.
    void add_values(std::span<const double> v) {
        const std::size_t n = req_.observables.size();
        if (v.size() != n)
            throw ensemble_error("ensemble_stats: value count must match observables");
        ++count_;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = v[i];
            const double x2 = x * x;
            sv_[i].add(x);
            sv2_[i].add(x2);
            sv3_[i].add(x2 * x);
            sv4_[i].add(x2 * x2);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                svv_[detail::pair_index(n, i, j)].add(v[i] * v[j]);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t l = 0; l < req_.lambdas.size(); ++l) {
                const double c = std::cos(req_.lambdas[l] * v[i]);
                const std::size_t at = i * req_.lambdas.size() + l;
                scos_[at].add(c);
                ssin_[at].add(std::sin(req_.lambdas[l] * v[i]));
                scos2_[at].add(c * c);
            }
        }
        for (std::size_t m = 0; m < req_.monomials.size(); ++m) {
            double p = 1.0;
            for (std::size_t idx : req_.monomials[m]) p *= v[idx];
            sprod_[m].add(p);
            sprod2_[m].add(p * p);
        }
        if (req_.sign_pairs) {
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) {
                    const double p = v[i] * v[j];
                    const std::size_t at = detail::pair_index(n, i, j);
                    if (p > 0.0) ++agree_[at];
                    else if (p < 0.0) ++disagree_[at];
                }
            }
        }
    }

    // Associative combine; the exactly rounded accumulators make the merged
    // result independent of the partition.
    void merge(const ensemble_stats& other) {
        if (!(req_ == other.req_))
            throw ensemble_error("ensemble_stats: cannot merge different requests");
        count_ += other.count_;
        auto merge_all = [](auto& dst, const auto& src) {
            for (std::size_t i = 0; i < dst.size(); ++i) dst[i].merge(src[i]);
        };
        merge_all(sv_, other.sv_);
        merge_all(sv2_, other.sv2_);
        merge_all(sv3_, other.sv3_);
        merge_all(sv4_, other.sv4_);
        merge_all(svv_, other.svv_);
        merge_all(scos_, other.scos_);
        merge_all(ssin_, other.ssin_);
        merge_all(scos2_, other.scos2_);
        merge_all(sprod_, other.sprod_);
        merge_all(sprod2_, other.sprod2_);
        for (std::size_t i = 0; i < agree_.size(); ++i) {
            agree_[i] += other.agree_[i];
            disagree_[i] += other.disagree_[i];
        }
    }

    double mean(std::size_t i) const { return sv_.at(i).value() / m(); }
    double second_moment(std::size_t i) const { return sv2_.at(i).value() / m(); }

    double variance(std::size_t i) const {
        const double mu = mean(i);
        return second_moment(i) - mu * mu;
    }

    // Standard error of the empirical variance: sqrt(Var(v^2)/M), adequate
    // for near-zero-mean observables.
    double variance_std_error(std::size_t i) const {
        const double m2 = second_moment(i);
        const double m4 = sv4_.at(i).value() / m();
        return std::sqrt(std::max(0.0, m4 - m2 * m2) / m());
    }

    double covariance(std::size_t i, std::size_t j) const {
        if (i == j) return variance(i);
        const std::size_t n = req_.observables.size();
        const double mij =
            svv_.at(detail::pair_index(n, std::min(i, j), std::max(i, j))).value() / m();
        return mij - mean(i) * mean(j);
    }

    double excess_kurtosis(std::size_t i) const {
        const double mu = mean(i);
        const double r2 = second_moment(i);
        const double r3 = sv3_.at(i).value() / m();
        const double r4 = sv4_.at(i).value() / m();
        const double c2 = r2 - mu * mu;
        const double c4 = r4 - 4.0 * mu * r3 + 6.0 * mu * mu * r2 - 3.0 * mu * mu * mu * mu;
        return c4 / (c2 * c2) - 3.0;
    }

    // Ê(lambda) for observable i: (1/M) sum e^{i lambda chi}.
    std::complex<double> char_estimate(std::size_t i, std::size_t l) const {
        const std::size_t at = i * req_.lambdas.size() + l;
        return {scos_.at(at).value() / m(), ssin_.at(at).value() / m()};
    }

    // Standard error of Re Ê(lambda).
    double char_std_error(std::size_t i, std::size_t l) const {
        const std::size_t at = i * req_.lambdas.size() + l;
        const double ec = scos_.at(at).value() / m();
        const double ec2 = scos2_.at(at).value() / m();
        return std::sqrt(std::max(0.0, ec2 - ec * ec) / m());
    }

    double monomial_mean(std::size_t k) const { return sprod_.at(k).value() / m(); }

    double monomial_std_error(std::size_t k) const {
        const double e = monomial_mean(k);
        const double e2 = sprod2_.at(k).value() / m();
        return std::sqrt(std::max(0.0, e2 - e * e) / m());
    }

    // E[sgn chi_i sgn chi_j] with zeros counted as ties.
    double sign_correlation(std::size_t i, std::size_t j) const {
        if (!req_.sign_pairs)
            throw ensemble_error("ensemble_stats: sign pairs were not requested");
        const std::size_t n = req_.observables.size();
        const std::size_t at = detail::pair_index(n, std::min(i, j), std::max(i, j));
        return double(agree_.at(at) - disagree_.at(at)) / m();
    }

    double sign_correlation_std_error(std::size_t i, std::size_t j) const {
        const double e = sign_correlation(i, j);
        return std::sqrt(std::max(0.0, 1.0 - e * e) / m());
    }

private:
    double m() const {
        if (count_ == 0)
            throw ensemble_error("ensemble_stats: estimators are undefined on an "
                                 "empty ensemble");
        return double(count_);
    }

    stats_request req_;
    std::uint64_t count_ = 0;
    std::vector<exact_sum> sv_, sv2_, sv3_, sv4_;
    std::vector<exact_sum> svv_;
    std::vector<exact_sum> scos_, ssin_, scos2_;
    std::vector<exact_sum> sprod_, sprod2_;
    std::vector<std::int64_t> agree_, disagree_;
};

// Streaming accumulation of one sample. The observable list must be the one
// fixed at stats creation.
inline ensemble_stats& accumulate(ensemble_stats& stats, const field_sample& sample,
                                  std::span<const test_function> observables) {
    const auto& fixed = stats.request().observables;
    if (!std::equal(observables.begin(), observables.end(), fixed.begin(), fixed.end()))
        throw ensemble_error("accumulate: observable list differs from the list fixed "
                             "at stats creation");
    std::vector<double> v(observables.size());
    for (std::size_t i = 0; i < observables.size(); ++i)
        v[i] = smear(sample, observables[i]);
    stats.add_values(v);
    return stats;
}

enum class ensemble_path {
    field,    // full synthesis: mode draw, inverse FFT, site-space smearing
    spectral  // identical chi statistics evaluated directly in mode space
};

struct ensemble_options {
    std::uint64_t master_seed = 0;
    std::uint64_t samples = 0;
    std::uint64_t first_member = 0;  // absolute index of the first member
    ensemble_path path = ensemble_path::spectral;
    bool exclude_zero_mode = false;
    unsigned threads = 1;
    // spectral path: modes with |F| below cutoff x max|F| (per observable,
    // union over observables) contribute below double rounding and are
    // skipped.
    double spectral_cutoff = 1e-16;
};

namespace detail {

// Per-mode data for the spectral path: chi_i = sum_n xi_n conj(F_i(k_n))
// restricted to modes where at least one observable is above cutoff.
struct spectral_modes {
    std::vector<std::size_t> flat;
    std::vector<double> s_over_v;
    std::vector<std::complex<double>> fconj;  // [mode * nobs + i]
};

inline spectral_modes select_modes(const lattice& lat, std::span<const double> spectrum,
                                   const std::vector<std::vector<std::complex<double>>>& ft,
                                   double cutoff) {
    const std::size_t nobs = ft.size();
    std::vector<double> floor(nobs, 0.0);
    for (std::size_t i = 0; i < nobs; ++i) {
        double peak = 0.0;
        for (const auto& z : ft[i]) peak = std::max(peak, std::abs(z));
        floor[i] = cutoff * peak;
    }
    spectral_modes m;
    const double vol = box_volume(lat);
    for (std::size_t n = 0; n < spectrum.size(); ++n) {
        if (spectrum[n] == 0.0) continue;
        bool keep = false;
        for (std::size_t i = 0; i < nobs && !keep; ++i)
            keep = std::abs(ft[i][n]) >= floor[i];
        if (!keep) continue;
        m.flat.push_back(n);
        m.s_over_v.push_back(spectrum[n] / vol);
        for (std::size_t i = 0; i < nobs; ++i) m.fconj.push_back(std::conj(ft[i][n]));
    }
    return m;
}

} // namespace detail

// Ensemble of `samples` members indexed first_member .. first_member+samples-1,
// each drawn from derive_member_seed(master_seed, index). The statistics are
// a pure function of (kernel, lattice, request, seeds): identical across
// thread counts, member orderings, and the two evaluation paths (up to
// rounding in the field path's transform; the mode draws are shared).
inline ensemble_stats run_ensemble(const spectral_kernel& kernel, const lattice& lat,
                                   const stats_request& req,
                                   const ensemble_options& opt) {
    validate(req);
    const sample_options sopt{opt.exclude_zero_mode};
    const auto spectrum = lattice_spectrum(kernel, lat, sopt);
    for (const auto& f : req.observables)
        if (f.dimension != lat.dimension)
            throw domain_error("run_ensemble: observable dimension must match lattice");

    const std::size_t nobs = req.observables.size();
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<std::complex<double>>> ft;
    detail::spectral_modes modes;
    if (opt.path == ensemble_path::field) {
        weights.reserve(nobs);
        for (const auto& f : req.observables) weights.push_back(lattice_weights(f, lat));
    } else {
        ft.reserve(nobs);
        for (const auto& f : req.observables) ft.push_back(weight_transform(f, lat));
        modes = detail::select_modes(lat, spectrum, ft, opt.spectral_cutoff);
        ft.clear();
    }

    const unsigned nthreads = std::max(1u, opt.threads);
    const std::uint64_t total = opt.samples;
    auto worker = [&](std::uint64_t begin, std::uint64_t end, ensemble_stats& out) {
        std::vector<double> v(nobs);
        if (opt.path == ensemble_path::field) {
            detail::fft_nd plan(lat.dimension, lat.n);
            std::vector<std::complex<double>> grid;
            field_sample sample;
            sample.lat = lat;
            sample.kernel = kernel;
            const double cell = cell_volume(lat);
            for (std::uint64_t s = begin; s < end; ++s) {
                sample.member_seed = derive_member_seed(opt.master_seed, opt.first_member + s);
                detail::synthesize_field(lat, sample.member_seed, spectrum, box_volume(lat),
                                         plan, grid, sample.values, sample.max_imag_residue);
                for (std::size_t i = 0; i < nobs; ++i) {
                    exact_sum acc;
                    const auto& w = weights[i];
                    for (std::size_t x = 0; x < w.size(); ++x)
                        if (w[x] != 0.0) acc.add(w[x] * sample.values[x]);
                    v[i] = cell * acc.value();
                }
                out.add_values(v);
            }
        } else {
            const std::size_t nm = modes.flat.size();
            std::vector<std::complex<double>> chi(nobs);
            for (std::uint64_t s = begin; s < end; ++s) {
                const auto seed = derive_member_seed(opt.master_seed, opt.first_member + s);
                std::fill(chi.begin(), chi.end(), std::complex<double>{0.0, 0.0});
                for (std::size_t n = 0; n < nm; ++n) {
                    const auto xi =
                        detail::mode_amplitude(lat, seed, modes.flat[n], modes.s_over_v[n]);
                    for (std::size_t i = 0; i < nobs; ++i)
                        chi[i] += xi * modes.fconj[n * nobs + i];
                }
                for (std::size_t i = 0; i < nobs; ++i) v[i] = chi[i].real();
                out.add_values(v);
            }
        }
    };

    if (nthreads == 1 || total < 2) {
        ensemble_stats stats(req);
        worker(0, total, stats);
        return stats;
    }
    std::vector<ensemble_stats> parts(nthreads, ensemble_stats(req));
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    for (unsigned t = 0; t < nthreads; ++t) {
        const std::uint64_t begin = total * t / nthreads;
        const std::uint64_t end = total * (t + 1) / nthreads;
        pool.emplace_back([&, begin, end, t] {
            try {
                worker(begin, end, parts[t]);
            } catch (...) {
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    ensemble_stats stats(req);
    for (const auto& p : parts) stats.merge(p);
    return stats;
}

} // namespace rfield
