#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfield/bell.hpp"
#include "rfield/errors.hpp"
#include "rfield/kernels.hpp"
#include "rfield/sampler.hpp"

namespace rfield {

static_assert(std::endian::native == std::endian::little,
              "binary field dumps are little-endian; big-endian hosts are unsupported");

// 17 significant digits: round-trips to the same double.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// ---- field sample: CSV ----

inline void write_field_csv(std::ostream& os, const field_sample& sample) {
    os << "index";
    for (int a = 0; a < sample.lat.dimension; ++a) os << ",x" << a;
    os << ",value\n";
    std::size_t idx[3] = {0, 0, 0};
    for (std::size_t flat = 0; flat < sample.values.size(); ++flat) {
        detail::decode_site(sample.lat, flat, idx);
        os << flat;
        for (int a = 0; a < sample.lat.dimension; ++a)
            os << ',' << format_double(sample.lat.spacing * double(idx[a]));
        os << ',' << format_double(sample.values[flat]) << '\n';
    }
}

// ---- field sample: binary dump ----
//
// Little-endian layout:
//   bytes 0-7   magic "RFIELD01"
//   u32         dimension
//   u32         sites per axis
//   f64         spacing
//   u64         member seed
//   u32         kernel kind (0 vacuum, 1 classical_gibbs, 2 quantum_thermal)
//   f64 f64 f64 mass, hbar, kT
//   f64 x n^d   field values, row-major over sites

namespace detail {

inline constexpr char field_magic[8] = {'R', 'F', 'I', 'E', 'L', 'D', '0', '1'};

template <class T>
void put_raw(std::ostream& os, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    os.write(buf, sizeof(T));
}

template <class T>
T get_raw(std::istream& is) {
    char buf[sizeof(T)];
    is.read(buf, sizeof(T));
    if (!is) throw io_error("field dump truncated");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

} // namespace detail

inline void write_field_binary(std::ostream& os, const field_sample& sample) {
    os.write(detail::field_magic, sizeof detail::field_magic);
    detail::put_raw<std::uint32_t>(os, std::uint32_t(sample.lat.dimension));
    detail::put_raw<std::uint32_t>(os, std::uint32_t(sample.lat.n));
    detail::put_raw<double>(os, sample.lat.spacing);
    detail::put_raw<std::uint64_t>(os, sample.member_seed);
    detail::put_raw<std::uint32_t>(os, std::uint32_t(sample.kernel.kind));
    detail::put_raw<double>(os, sample.kernel.mass);
    detail::put_raw<double>(os, sample.kernel.hbar);
    detail::put_raw<double>(os, sample.kernel.kT);
    for (double v : sample.values) detail::put_raw<double>(os, v);
    if (!os) throw io_error("field dump write failed");
}

inline field_sample read_field_binary(std::istream& is) {
    char magic[sizeof detail::field_magic];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, detail::field_magic, sizeof magic) != 0)
        throw io_error("not a field dump (bad magic)");
    field_sample sample;
    sample.lat.dimension = int(detail::get_raw<std::uint32_t>(is));
    sample.lat.n = detail::get_raw<std::uint32_t>(is);
    sample.lat.spacing = detail::get_raw<double>(is);
    sample.member_seed = detail::get_raw<std::uint64_t>(is);
    const auto kind = detail::get_raw<std::uint32_t>(is);
    if (kind > 2) throw io_error("field dump: unknown kernel kind");
    sample.kernel.kind = kernel_kind(kind);
    sample.kernel.mass = detail::get_raw<double>(is);
    sample.kernel.hbar = detail::get_raw<double>(is);
    sample.kernel.kT = detail::get_raw<double>(is);
    sample.kernel.dimension = sample.lat.dimension;
    validate(sample.lat);
    sample.values.resize(site_count(sample.lat));
    for (auto& v : sample.values) v = detail::get_raw<double>(is);
    return sample;
}

// ---- marginal sets: CSV (columns i,j,a,b,p) and JSON ----

inline void write_marginals_csv(std::ostream& os, const marginal_set& m) {
    os << "i,j,a,b,p\n";
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob)
                    os << i << ',' << j << ',' << (oa == 0 ? 1 : -1) << ','
                       << (ob == 0 ? 1 : -1) << ','
                       << format_double(m.table(i, j).at(oa, ob)) << '\n';
}

inline marginal_set read_marginals_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw io_error("marginal CSV: empty input");
    marginal_set m;
    bool seen[16] = {false};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        int vals[4];
        for (int c = 0; c < 4; ++c) {
            if (!std::getline(row, cell, ','))
                throw io_error("marginal CSV: expected i,j,a,b,p in: " + line);
            try {
                vals[c] = std::stoi(cell);
            } catch (const std::exception&) {
                throw io_error("marginal CSV: bad integer in: " + line);
            }
        }
        if (!std::getline(row, cell, ','))
            throw io_error("marginal CSV: missing probability in: " + line);
        double p;
        try {
            p = std::stod(cell);
        } catch (const std::exception&) {
            throw io_error("marginal CSV: bad probability in: " + line);
        }
        const int i = vals[0], j = vals[1];
        if (i < 1 || i > 2 || j < 1 || j > 2 || std::abs(vals[2]) != 1 ||
            std::abs(vals[3]) != 1)
            throw io_error("marginal CSV: settings must be 1..2 and outcomes +-1 in: " + line);
        const int oa = vals[2] == 1 ? 0 : 1;
        const int ob = vals[3] == 1 ? 0 : 1;
        const int slot = ((i - 1) * 2 + (j - 1)) * 4 + oa * 2 + ob;
        if (seen[slot]) throw io_error("marginal CSV: duplicate row: " + line);
        seen[slot] = true;
        m.table(i, j).at(oa, ob) = p;
    }
    for (bool s : seen)
        if (!s) throw io_error("marginal CSV: missing entries (need all 16 rows)");
    return m;
}

// {"tables": {"11": [[p(+,+), p(+,-)], [p(-,+), p(-,-)]], "12": ..., ...}}
inline nlohmann::ordered_json marginals_to_json(const marginal_set& m) {
    nlohmann::ordered_json tables;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const auto& t = m.table(i, j);
            tables[std::to_string(i) + std::to_string(j)] = {{t.at(0, 0), t.at(0, 1)},
                                                             {t.at(1, 0), t.at(1, 1)}};
        }
    }
    return nlohmann::ordered_json{{"tables", tables}};
}

inline marginal_set read_marginals_json(const nlohmann::json& doc) {
    if (!doc.contains("tables")) throw io_error("marginal JSON: missing \"tables\"");
    marginal_set m;
    for (int i = 1; i <= 2; ++i) {
        for (int j = 1; j <= 2; ++j) {
            const std::string key = std::to_string(i) + std::to_string(j);
            if (!doc["tables"].contains(key))
                throw io_error("marginal JSON: missing table \"" + key + "\"");
            const auto& t = doc["tables"][key];
            if (!t.is_array() || t.size() != 2 || !t[0].is_array() || t[0].size() != 2 ||
                !t[1].is_array() || t[1].size() != 2)
                throw io_error("marginal JSON: table \"" + key + "\" must be 2x2");
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob)
                    m.table(i, j).at(oa, ob) = t[oa][ob].get<double>();
        }
    }
    return m;
}

inline nlohmann::ordered_json feasibility_to_json(const feasibility_result& r) {
    nlohmann::ordered_json out;
    out["verdict"] = r.verdict == feasibility::feasible ? "feasible" : "infeasible";
    if (r.verdict == feasibility::feasible) {
        out["witness"] = r.witness;
        out["witness_index_order"] = "bit k of the entry index set means outcome -1; "
                                     "bits: a1, a2, b1, b2";
    } else {
        out["certificate"] = {{"signs", r.certificate_signs},
                              {"value", r.certificate_value},
                              {"bound", 2.0}};
    }
    return out;
}

// Temp file in the destination directory, then rename: readers never observe
// a partial file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / (path.filename().string() + ".tmp");
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), std::streamsize(content.size()));
        if (!os) throw io_error("write to " + tmp.string() + " failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw io_error("rename to " + path.string() + " failed: " + ec.message());
}

} // namespace rfield
