// Command-line front end: spectra tables, Monte Carlo verification of the
// Gaussian characteristic functional, Bell feasibility decisions, crossover
// and Wick moment queries, and field sampling with CSV/binary dumps.
//
// Exit codes: 0 success (and "feasible"), 1 runtime or statistical failure,
// 2 usage error, 3 "infeasible" Bell verdict.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <rfield/bell_exact.hpp>
#include <rfield/rfield.hpp>

namespace {

using nlohmann::ordered_json;

// Usage-level problems discovered after flag parsing (malformed values,
// inconsistent combinations); mapped to exit 2 like parse errors.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stod(cell, &pos));
            if (pos != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw usage_error(std::string(what) + ": '" + cell + "' is not a number");
        }
    }
    if (out.empty()) throw usage_error(std::string(what) + ": empty list");
    return out;
}

std::array<double, 3> parse_components(const std::string& text, int dim, const char* what) {
    const auto vals = parse_double_list(text, what);
    if (vals.size() != std::size_t(dim))
        throw usage_error(std::string(what) + ": expected " + std::to_string(dim) +
                          " comma-separated values");
    std::array<double, 3> out{0.0, 0.0, 0.0};
    std::copy(vals.begin(), vals.end(), out.begin());
    return out;
}

rfield::kernel_kind parse_kind(const std::string& name) {
    if (name == "vacuum") return rfield::kernel_kind::vacuum;
    if (name == "classical" || name == "classical_gibbs")
        return rfield::kernel_kind::classical_gibbs;
    if (name == "quantum" || name == "quantum_thermal")
        return rfield::kernel_kind::quantum_thermal;
    throw usage_error("unknown kernel kind '" + name +
                      "' (expected vacuum, classical, or quantum)");
}

// Empty path: stdout. Otherwise atomic (temp + rename).
void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout.write(content.data(), std::streamsize(content.size()));
        std::cout.flush();
        return;
    }
    rfield::atomic_write(path, content);
}

std::string json_text(const ordered_json& doc) { return doc.dump(2) + "\n"; }

// ---- shared flag groups ----

struct kernel_flags {
    std::string kind = "vacuum";
    double mass = 1.0;
    double hbar = 1.0;
    double kT = 1.0;
    int dim = 1;

    void attach(CLI::App* cmd) {
        cmd->add_option("--kind", kind, "kernel: vacuum | classical | quantum")
            ->capture_default_str();
        cmd->add_option("--mass", mass, "mass m >= 0")->capture_default_str();
        cmd->add_option("--hbar", hbar, "hbar > 0")->capture_default_str();
        cmd->add_option("--kT", kT, "temperature (energy units)")->capture_default_str();
        cmd->add_option("--dim", dim, "spatial dimension 1..3")->capture_default_str();
    }

    rfield::spectral_kernel build() const {
        rfield::spectral_kernel k;
        k.kind = parse_kind(kind);
        k.mass = mass;
        k.hbar = hbar;
        k.kT = k.kind == rfield::kernel_kind::vacuum ? 0.0 : kT;
        k.dimension = dim;
        rfield::validate(k);
        return k;
    }

    ordered_json echo() const {
        return {{"kind", kind}, {"mass", mass}, {"hbar", hbar},
                {"kT", kT},     {"dim", dim}};
    }
};

struct lattice_flags {
    std::size_t n = 4096;
    double spacing = 0.05;

    void attach(CLI::App* cmd) {
        cmd->add_option("--n", n, "lattice sites per axis (power of two >= 4)")
            ->capture_default_str();
        cmd->add_option("--spacing", spacing, "lattice spacing a > 0")->capture_default_str();
    }

    rfield::lattice build(int dim) const {
        rfield::lattice lat{dim, n, spacing};
        rfield::validate(lat);
        return lat;
    }

    ordered_json echo() const { return {{"n", n}, {"spacing", spacing}}; }
};

// ---- spectra ----

struct spectra_cfg {
    double mass = 1.0;
    double hbar = 1.0;
    double kT = 1.0;
    int dim = 1;
    double kmin = 0.01;
    double kmax = 100.0;
    std::size_t steps = 200;
    bool log_spacing = false;
    std::string output;
};

int run_spectra(const spectra_cfg& c) {
    if (!(c.kmin > 0.0) || !(c.kmax >= c.kmin))
        throw usage_error("spectra: need 0 < kmin <= kmax");
    const auto vac = rfield::make_vacuum(c.mass, c.hbar, c.dim);
    const auto cls = rfield::make_classical_gibbs(c.mass, c.kT, c.dim);
    const auto qt = rfield::make_quantum_thermal(c.mass, c.hbar, c.kT, c.dim);

    std::ostringstream os;
    os << "k,omega,S_vacuum,S_classical,S_quantum_thermal,ratio_classical,ratio_vacuum\n";
    for (std::size_t i = 0; i < c.steps; ++i) {
        const double t = c.steps == 1 ? 0.0 : double(i) / double(c.steps - 1);
        const double k = c.log_spacing ? c.kmin * std::pow(c.kmax / c.kmin, t)
                                       : c.kmin + (c.kmax - c.kmin) * t;
        using rfield::format_double;
        os << format_double(k) << ',' << format_double(rfield::omega(vac, k)) << ','
           << format_double(rfield::mode_variance(vac, k)) << ','
           << format_double(rfield::mode_variance(cls, k)) << ','
           << format_double(rfield::mode_variance(qt, k)) << ','
           << format_double(rfield::variance_ratio_to_classical(qt, k)) << ','
           << format_double(rfield::variance_ratio_to_vacuum(qt, k)) << '\n';
    }
    emit(c.output, os.str());
    return 0;
}

// ---- verify ----

struct verify_cfg {
    kernel_flags kernel;
    lattice_flags lat;
    double amplitude = 1.0;
    double sigma = 1.0;
    std::string center = "auto";  // "auto": box center
    std::string carrier = "0.6";
    std::uint64_t samples = 100000;
    std::uint64_t seed = 0;
    std::string lambdas = "0.25,0.5,1,2";
    std::string path = "spectral";
    unsigned threads = 1;
    bool exclude_zero_mode = false;
    std::string output;
};

int run_verify(const verify_cfg& c) {
    const auto kernel = c.kernel.build();
    const auto lat = c.lat.build(c.kernel.dim);

    rfield::test_function f;
    f.dimension = c.kernel.dim;
    f.amplitude = c.amplitude;
    f.sigma = c.sigma;
    if (c.center == "auto")
        f.center.fill(0.5 * rfield::box_length(lat));
    else
        f.center = parse_components(c.center, c.kernel.dim, "--center");
    f.carrier = parse_components(c.carrier, c.kernel.dim, "--carrier");
    rfield::validate(f);

    rfield::ensemble_path path;
    if (c.path == "field") path = rfield::ensemble_path::field;
    else if (c.path == "spectral") path = rfield::ensemble_path::spectral;
    else throw usage_error("verify: --path must be field or spectral");

    const auto lambdas = parse_double_list(c.lambdas, "--lambdas");

    rfield::stats_request req;
    req.observables = {f};
    req.lambdas = lambdas;

    rfield::ensemble_options opt;
    opt.master_seed = c.seed;
    opt.samples = c.samples;
    opt.path = path;
    opt.exclude_zero_mode = c.exclude_zero_mode;
    opt.threads = c.threads;

    const auto stats = rfield::run_ensemble(kernel, lat, req, opt);

    const rfield::sample_options sopt{c.exclude_zero_mode};
    const double var_lattice = rfield::lattice_variance(kernel, lat, f, sopt);
    const std::array<rfield::test_function, 1> fs{f};
    const double var_continuum =
        rfield::covariance_matrix_of(std::span<const rfield::test_function>(fs.data(), 1),
                                     kernel)
            .at(0, 0);

    ordered_json report;
    report["command"] = "verify";
    ordered_json cfg = c.kernel.echo();
    cfg.update(c.lat.echo());
    cfg["amplitude"] = c.amplitude;
    cfg["sigma"] = c.sigma;
    cfg["center"] = std::vector<double>(f.center.begin(), f.center.begin() + c.kernel.dim);
    cfg["carrier"] = std::vector<double>(f.carrier.begin(), f.carrier.begin() + c.kernel.dim);
    cfg["samples"] = c.samples;
    cfg["seed"] = c.seed;
    cfg["lambdas"] = lambdas;
    cfg["path"] = c.path;
    cfg["threads"] = c.threads;
    cfg["exclude_zero_mode"] = c.exclude_zero_mode;
    report["config"] = cfg;

    bool pass = true;
    std::vector<double> failing;

    const double var_emp = stats.variance(0);
    const double var_se = stats.variance_std_error(0);
    const double var_z = (var_emp - var_lattice) / var_se;
    if (!(std::fabs(var_z) < 4.0)) pass = false;
    report["variance"] = {{"lattice", var_lattice},
                          {"continuum_quadrature", var_continuum},
                          {"empirical", var_emp},
                          {"std_error", var_se},
                          {"z", var_z}};

    double max_z = std::fabs(var_z);
    ordered_json rows = ordered_json::array();
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double analytic = std::exp(-0.5 * lambdas[l] * lambdas[l] * var_lattice);
        const auto est = stats.char_estimate(0, l);
        const double se = stats.char_std_error(0, l);
        const double z = (est.real() - analytic) / se;
        max_z = std::max(max_z, std::fabs(z));
        if (!(std::fabs(z) < 4.0)) {
            pass = false;
            failing.push_back(lambdas[l]);
        }
        rows.push_back({{"lambda", lambdas[l]},
                        {"analytic", analytic},
                        {"empirical_re", est.real()},
                        {"empirical_im", est.imag()},
                        {"std_error", se},
                        {"z", z}});
    }
    report["char_function"] = rows;
    report["max_abs_z"] = max_z;
    report["pass"] = pass;
    if (!pass) report["failing_lambdas"] = failing;

    emit(c.output, json_text(report));
    return pass ? 0 : 1;
}

// ---- bell ----

struct bell_chsh_cfg {
    double e11 = 0.0, e12 = 0.0, e21 = 0.0, e22 = 0.0;
};

int run_bell_chsh(const bell_chsh_cfg& c) {
    std::cout << rfield::format_double(rfield::chsh_value(c.e11, c.e12, c.e21, c.e22))
              << "\n";
    return 0;
}

struct bell_feasible_cfg {
    std::string input;
    std::string format = "auto";  // csv | json | auto (by extension)
    bool exact = false;
    std::string output;
};

rfield::marginal_set load_marginals(const bell_feasible_cfg& c) {
    std::ifstream is(c.input);
    if (!is) throw rfield::io_error("cannot open " + c.input);
    std::string fmt = c.format;
    if (fmt == "auto") {
        const auto dot = c.input.rfind('.');
        const std::string ext = dot == std::string::npos ? "" : c.input.substr(dot + 1);
        fmt = ext == "json" ? "json" : "csv";
    }
    if (fmt == "csv") return rfield::read_marginals_csv(is);
    if (fmt == "json") {
        nlohmann::json doc;
        try {
            is >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw rfield::io_error(std::string("marginal JSON: ") + e.what());
        }
        return rfield::read_marginals_json(doc);
    }
    throw usage_error("bell feasible: --format must be csv, json, or auto");
}

int run_bell_feasible(const bell_feasible_cfg& c) {
    ordered_json report;
    report["command"] = "bell feasible";
    report["config"] = {{"input", c.input}, {"format", c.format}, {"exact", c.exact}};

    rfield::marginal_set m;
    try {
        m = load_marginals(c);
        report["tables"] = rfield::marginals_to_json(m)["tables"];
        if (c.exact) {
            // doubles are dyadic rationals, so this conversion is exact
            rfield::exact_marginal_set em;
            for (std::size_t t = 0; t < 4; ++t)
                for (std::size_t e = 0; e < 4; ++e)
                    em.tables[t].p[e] = rfield::exact_rational(m.tables[t].p[e]);
            const auto r = rfield::joint_feasible(em);
            rfield::feasibility_result rd;
            rd.verdict = r.verdict;
            for (const auto& q : r.witness) rd.witness.push_back(q.convert_to<double>());
            rd.certificate_signs = r.certificate_signs;
            rd.certificate_value = r.certificate_value.convert_to<double>();
            auto body = rfield::feasibility_to_json(rd);
            if (r.verdict == rfield::feasibility::infeasible)
                body["certificate"]["value_exact"] = r.certificate_value.str();
            report.update(body);
            emit(c.output, json_text(report));
            return r.verdict == rfield::feasibility::feasible ? 0 : 3;
        }
        const auto r = rfield::joint_feasible(m);
        report.update(rfield::feasibility_to_json(r));
        emit(c.output, json_text(report));
        return r.verdict == rfield::feasibility::feasible ? 0 : 3;
    } catch (const rfield::no_signalling_error& e) {
        report["error_code"] = "no_signalling";
        report["error"] = e.what();
        emit(c.output, json_text(report));
        return 1;
    } catch (const rfield::invalid_tables_error& e) {
        report["error_code"] = "invalid_tables";
        report["error"] = e.what();
        emit(c.output, json_text(report));
        return 1;
    }
}

struct bell_field_cfg {
    kernel_flags kernel;
    double sigma = 1.0;
    double amplitude = 1.0;
    std::string a1_center = "0", a1_carrier = "0.4";
    std::string a2_center = "0", a2_carrier = "1.1";
    std::string b1_center = "1.5", b1_carrier = "0.4";
    std::string b2_center = "1.5", b2_carrier = "1.1";
    std::string output;
};

int run_bell_field(const bell_field_cfg& c) {
    const auto kernel = c.kernel.build();
    auto packet = [&](const std::string& center, const std::string& carrier,
                      const char* what) {
        rfield::test_function f;
        f.dimension = c.kernel.dim;
        f.amplitude = c.amplitude;
        f.sigma = c.sigma;
        f.center = parse_components(center, c.kernel.dim, what);
        f.carrier = parse_components(carrier, c.kernel.dim, what);
        rfield::validate(f);
        return f;
    };
    const std::array<rfield::test_function, 4> fs{
        packet(c.a1_center, c.a1_carrier, "--a1-center/--a1-carrier"),
        packet(c.a2_center, c.a2_carrier, "--a2-center/--a2-carrier"),
        packet(c.b1_center, c.b1_carrier, "--b1-center/--b1-carrier"),
        packet(c.b2_center, c.b2_carrier, "--b2-center/--b2-carrier")};

    const auto cov = rfield::covariance_matrix_of(
        std::span<const rfield::test_function>(fs.data(), fs.size()), kernel);
    const double s = rfield::chsh_from_covariance(cov);

    ordered_json report;
    report["command"] = "bell field";
    ordered_json cfg = c.kernel.echo();
    cfg["sigma"] = c.sigma;
    cfg["amplitude"] = c.amplitude;
    cfg["a1_center"] = c.a1_center;
    cfg["a1_carrier"] = c.a1_carrier;
    cfg["a2_center"] = c.a2_center;
    cfg["a2_carrier"] = c.a2_carrier;
    cfg["b1_center"] = c.b1_center;
    cfg["b1_carrier"] = c.b1_carrier;
    cfg["b2_center"] = c.b2_center;
    cfg["b2_carrier"] = c.b2_carrier;
    report["config"] = cfg;

    ordered_json covj = ordered_json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < 4; ++j) row.push_back(cov.at(i, j));
        covj.push_back(row);
    }
    report["covariance"] = covj;
    auto rho = [&](std::size_t i, std::size_t j) {
        return cov.at(i, j) / std::sqrt(cov.at(i, i) * cov.at(j, j));
    };
    report["correlators"] = {{"e11", rfield::sign_correlator(std::clamp(rho(0, 2), -1.0, 1.0))},
                             {"e12", rfield::sign_correlator(std::clamp(rho(0, 3), -1.0, 1.0))},
                             {"e21", rfield::sign_correlator(std::clamp(rho(1, 2), -1.0, 1.0))},
                             {"e22", rfield::sign_correlator(std::clamp(rho(1, 3), -1.0, 1.0))}};
    report["chsh"] = s;
    report["bound"] = 2.0;
    emit(c.output, json_text(report));
    return 0;
}

// ---- crossover ----

struct crossover_cfg {
    double mass = 1.0;
    double hbar = 1.0;
    double kT = 1.0;
};

int run_crossover(const crossover_cfg& c) {
    const auto k = rfield::make_quantum_thermal(c.mass, c.hbar, c.kT);
    std::cout << rfield::format_double(rfield::crossover_wavenumber(k)) << "\n";
    return 0;
}

// ---- wick ----

struct wick_cfg {
    std::string cov = "identity2";
    std::string indices;
    std::size_t order = 0;  // optional cross-check of indices length
};

rfield::covariance_matrix load_covariance(const std::string& spec) {
    if (spec.rfind("identity", 0) == 0) {
        const std::string num = spec.substr(8);
        try {
            std::size_t pos = 0;
            const unsigned long n = std::stoul(num, &pos);
            if (pos != num.size() || n == 0) throw std::invalid_argument(num);
            return rfield::covariance_matrix::identity(n);
        } catch (const std::exception&) {
            throw usage_error("wick: --cov identityN needs a positive integer N");
        }
    }
    std::ifstream is(spec);
    if (!is) throw rfield::io_error("cannot open covariance file " + spec);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw rfield::io_error("covariance file: bad number '" + cell + "'");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw rfield::io_error("covariance file: empty");
    rfield::covariance_matrix c(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.size())
            throw rfield::io_error("covariance file: matrix must be square");
        for (std::size_t j = 0; j < rows.size(); ++j) c.at(i, j) = rows[i][j];
    }
    return c;
}

int run_wick(const wick_cfg& c) {
    if (c.indices.empty()) throw usage_error("wick: --indices is required");
    const auto vals = parse_double_list(c.indices, "--indices");
    std::vector<std::size_t> idx;
    for (double v : vals) {
        if (v < 0 || v != std::floor(v))
            throw usage_error("wick: indices must be non-negative integers");
        idx.push_back(std::size_t(v));
    }
    if (c.order != 0 && c.order != idx.size())
        throw usage_error("wick: --order disagrees with the number of indices");
    const auto cov = load_covariance(c.cov);
    std::cout << rfield::format_double(
                     rfield::wick_moment(cov, std::span<const std::size_t>(idx.data(),
                                                                           idx.size())))
              << "\n";
    return 0;
}

// ---- sample ----

struct sample_cfg {
    kernel_flags kernel;
    lattice_flags lat;
    std::uint64_t seed = 0;
    bool exclude_zero_mode = false;
    std::string format = "csv";
    std::string output;
};

int run_sample(const sample_cfg& c) {
    const auto kernel = c.kernel.build();
    const auto lat = c.lat.build(c.kernel.dim);
    const rfield::sample_options opt{c.exclude_zero_mode};
    const auto sample = rfield::sample_field(kernel, lat, c.seed, opt);
    std::ostringstream os;
    if (c.format == "csv") {
        rfield::write_field_csv(os, sample);
    } else if (c.format == "bin") {
        rfield::write_field_binary(os, sample);
    } else {
        throw usage_error("sample: --format must be csv or bin");
    }
    emit(c.output, os.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian random-field laboratory: spectral kernels, smeared "
                 "observables, Monte Carlo verification, and Bell-marginal "
                 "feasibility"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI config file, one [section] per subcommand; "
                                   "flags override file values");

    spectra_cfg sc;
    auto* spectra = app.add_subcommand("spectra", "emit S(k) for the three kernels plus "
                                                  "both ratio columns as CSV");
    spectra->add_option("--mass", sc.mass, "mass m >= 0")->capture_default_str();
    spectra->add_option("--hbar", sc.hbar, "hbar > 0")->capture_default_str();
    spectra->add_option("--kT", sc.kT, "temperature (energy units)")->capture_default_str();
    spectra->add_option("--dim", sc.dim, "spatial dimension 1..3")->capture_default_str();
    spectra->add_option("--kmin", sc.kmin, "smallest wavenumber (> 0)")->capture_default_str();
    spectra->add_option("--kmax", sc.kmax, "largest wavenumber")->capture_default_str();
    spectra->add_option("--steps", sc.steps, "number of rows")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    spectra->add_flag("--log", sc.log_spacing, "logarithmic k spacing");
    spectra->add_option("--output", sc.output, "output file (default: stdout)");

    verify_cfg vc;
    auto* verify = app.add_subcommand("verify", "Monte Carlo check of the Gaussian "
                                                "characteristic functional against the "
                                                "analytic form; JSON report");
    vc.kernel.attach(verify);
    vc.lat.attach(verify);
    verify->add_option("--amplitude", vc.amplitude, "packet amplitude")->capture_default_str();
    verify->add_option("--sigma", vc.sigma, "packet width")->capture_default_str();
    verify->add_option("--center", vc.center, "packet center (comma list; 'auto' = box "
                                              "center)")
        ->capture_default_str();
    verify->add_option("--carrier", vc.carrier, "packet carrier wavevector (comma list)")
        ->capture_default_str();
    verify->add_option("--samples", vc.samples, "ensemble size M")->capture_default_str();
    verify->add_option("--seed", vc.seed, "master seed")
        ->envname("RFIELD_SEED")
        ->capture_default_str();
    verify->add_option("--lambdas", vc.lambdas, "characteristic-function probe grid")
        ->capture_default_str();
    verify->add_option("--path", vc.path, "ensemble path: field | spectral")
        ->capture_default_str();
    verify->add_option("--threads", vc.threads, "worker threads (results are "
                                                "thread-count invariant)")
        ->capture_default_str();
    verify->add_flag("--exclude-zero-mode", vc.exclude_zero_mode,
                     "drop the k=0 mode (required for massless kernels)");
    verify->add_option("--output", vc.output, "output file (default: stdout)");

    auto* bell = app.add_subcommand("bell", "CHSH values, field CHSH, and "
                                            "joint-distribution feasibility");
    bell->require_subcommand(1);

    bell_chsh_cfg bcc;
    auto* bchsh = bell->add_subcommand("chsh", "S = E11 + E12 + E21 - E22");
    bchsh->add_option("--e11", bcc.e11, "correlator E11")->required();
    bchsh->add_option("--e12", bcc.e12, "correlator E12")->required();
    bchsh->add_option("--e21", bcc.e21, "correlator E21")->required();
    bchsh->add_option("--e22", bcc.e22, "correlator E22")->required();

    bell_feasible_cfg bfc;
    auto* bfeas = bell->add_subcommand("feasible", "decide whether a quadrivariate joint "
                                                   "with the given bivariate marginals "
                                                   "exists; exit 0 feasible, 3 infeasible");
    bfeas->add_option("--input", bfc.input, "marginal tables (CSV i,j,a,b,p or JSON)")
        ->required();
    bfeas->add_option("--format", bfc.format, "input format: csv | json | auto")
        ->capture_default_str();
    bfeas->add_flag("--exact", bfc.exact, "exact rational arithmetic (tolerance-free "
                                          "verdict)");
    bfeas->add_option("--output", bfc.output, "output file (default: stdout)");

    bell_field_cfg bflc;
    auto* bfield = bell->add_subcommand("field", "CHSH of sign-binned smeared observables "
                                                 "of one random field (never exceeds 2)");
    bflc.kernel.attach(bfield);
    bfield->add_option("--sigma", bflc.sigma, "packet width (shared)")->capture_default_str();
    bfield->add_option("--amplitude", bflc.amplitude, "packet amplitude (shared)")
        ->capture_default_str();
    bfield->add_option("--a1-center", bflc.a1_center, "A setting 1 packet center")
        ->capture_default_str();
    bfield->add_option("--a1-carrier", bflc.a1_carrier, "A setting 1 carrier")
        ->capture_default_str();
    bfield->add_option("--a2-center", bflc.a2_center, "A setting 2 packet center")
        ->capture_default_str();
    bfield->add_option("--a2-carrier", bflc.a2_carrier, "A setting 2 carrier")
        ->capture_default_str();
    bfield->add_option("--b1-center", bflc.b1_center, "B setting 1 packet center")
        ->capture_default_str();
    bfield->add_option("--b1-carrier", bflc.b1_carrier, "B setting 1 carrier")
        ->capture_default_str();
    bfield->add_option("--b2-center", bflc.b2_center, "B setting 2 packet center")
        ->capture_default_str();
    bfield->add_option("--b2-carrier", bflc.b2_carrier, "B setting 2 carrier")
        ->capture_default_str();
    bfield->add_option("--output", bflc.output, "output file (default: stdout)");

    crossover_cfg cc;
    auto* crossover = app.add_subcommand("crossover", "wavenumber where the classical and "
                                                      "vacuum variances coincide");
    crossover->add_option("--mass", cc.mass, "mass m >= 0")->capture_default_str();
    crossover->add_option("--hbar", cc.hbar, "hbar > 0")->capture_default_str();
    crossover->add_option("--kT", cc.kT, "temperature (> 0)")->capture_default_str();

    wick_cfg wc;
    auto* wick = app.add_subcommand("wick", "Gaussian joint moment by exact pairing "
                                            "enumeration");
    wick->add_option("--cov", wc.cov, "covariance: identityN or a CSV file (square, no "
                                      "header)")
        ->capture_default_str();
    wick->add_option("--indices", wc.indices, "comma-separated observable indices, e.g. "
                                              "0,0,1,1")
        ->required();
    wick->add_option("--order", wc.order, "optional cross-check: expected index count");

    sample_cfg smc;
    auto* sample = app.add_subcommand("sample", "draw one field realization and dump it");
    smc.kernel.attach(sample);
    smc.lat.attach(sample);
    sample->add_option("--seed", smc.seed, "member seed")
        ->envname("RFIELD_SEED")
        ->capture_default_str();
    sample->add_flag("--exclude-zero-mode", smc.exclude_zero_mode,
                     "drop the k=0 mode (required for massless kernels)");
    sample->add_option("--format", smc.format, "csv | bin")->capture_default_str();
    sample->add_option("--output", smc.output, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        app.exit(e);
        return 2;
    }

    try {
        if (spectra->parsed()) return run_spectra(sc);
        if (verify->parsed()) return run_verify(vc);
        if (bell->parsed()) {
            if (bchsh->parsed()) return run_bell_chsh(bcc);
            if (bfeas->parsed()) return run_bell_feasible(bfc);
            if (bfield->parsed()) return run_bell_field(bflc);
        }
        if (crossover->parsed()) return run_crossover(cc);
        if (wick->parsed()) return run_wick(wc);
        if (sample->parsed()) return run_sample(smc);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const rfield::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
