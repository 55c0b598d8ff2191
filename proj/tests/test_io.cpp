#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <rfield/io.hpp>

#include <unistd.h>

namespace {

bool same_bits(double a, double b) {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

// std::stod throws out_of_range on subnormals (strtod's ERANGE underflow);
// strtod itself returns them correctly rounded
double parse_double(const std::string& s) {
    return std::strtod(s.c_str(), nullptr);
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

rfield::field_sample make_sample() {
    const rfield::lattice lat{2, 8, 0.3};
    const auto kernel = rfield::make_quantum_thermal(0.5, 1.25, 0.75, 2);
    return rfield::sample_field(kernel, lat, 42);
}

} // namespace

TEST_CASE("format_double round-trips every double bit pattern it is given") {
    const std::vector<double> values = {
        0.0,
        1.0,
        2.0,
        0.1,
        1.0 / 3.0,
        3.14159265358979323846,
        0x1p-53,
        1e300,
        -1e-300,
        4.9406564584124654e-324,   // smallest subnormal
        2.2250738585072014e-308,   // smallest normal
        1.7976931348623157e308,    // largest finite
        123456789.123456789,
        -98765.43210987654321,
    };
    for (double v : values) {
        const std::string s = rfield::format_double(v);
        const double back = parse_double(s);
        INFO("v=" << v << " printed as " << s);
        CHECK(same_bits(back, v));
    }
    // negative zero keeps its sign through the text form
    CHECK(same_bits(parse_double(rfield::format_double(-0.0)), -0.0));
    // integers print without a spurious exponent or trailing digits
    CHECK(rfield::format_double(2.0) == "2");
    CHECK(rfield::format_double(0.5) == "0.5");
}

TEST_CASE("field CSV: header, row count, and coordinate columns") {
    rfield::field_sample s;
    s.lat = rfield::lattice{1, 4, 0.5};
    s.kernel = rfield::make_vacuum(1.0, 1.0, 1);
    s.member_seed = 7;
    s.values = {1.5, -2.25, 0.0, 3.0};

    std::ostringstream os;
    rfield::write_field_csv(os, s);
    const auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "index,x0,value");
    CHECK(lines[1] == "0,0,1.5");
    CHECK(lines[2] == "1,0.5,-2.25");
    CHECK(lines[3] == "2,1,0");
    CHECK(lines[4] == "3,1.5,3");
}

TEST_CASE("field CSV: two dimensions enumerate every site exactly once") {
    const auto s = make_sample();
    std::ostringstream os;
    rfield::write_field_csv(os, s);
    const auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 1 + 64);
    CHECK(lines[0] == "index,x0,x1,value");

    std::set<std::pair<std::string, std::string>> seen;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        std::istringstream row(lines[r]);
        std::string idx, x0, x1, value;
        REQUIRE(std::getline(row, idx, ','));
        REQUIRE(std::getline(row, x0, ','));
        REQUIRE(std::getline(row, x1, ','));
        REQUIRE(std::getline(row, value, ','));
        CHECK(idx == std::to_string(r - 1));
        seen.insert({x0, x1});
    }
    CHECK(seen.size() == 64);
}

TEST_CASE("binary field dump: bitwise round-trip") {
    const auto s = make_sample();
    std::ostringstream os(std::ios::binary);
    rfield::write_field_binary(os, s);
    const std::string buf = os.str();
    // magic + dim + n + spacing + seed + kind + (mass, hbar, kT) + 64 values
    CHECK(buf.size() == 8 + 4 + 4 + 8 + 8 + 4 + 24 + 64 * 8);

    std::istringstream is(buf, std::ios::binary);
    const auto back = rfield::read_field_binary(is);
    CHECK(back.lat.dimension == s.lat.dimension);
    CHECK(back.lat.n == s.lat.n);
    CHECK(same_bits(back.lat.spacing, s.lat.spacing));
    CHECK(back.member_seed == s.member_seed);
    CHECK(back.kernel.kind == s.kernel.kind);
    CHECK(back.kernel.dimension == s.lat.dimension);
    CHECK(same_bits(back.kernel.mass, s.kernel.mass));
    CHECK(same_bits(back.kernel.hbar, s.kernel.hbar));
    CHECK(same_bits(back.kernel.kT, s.kernel.kT));
    REQUIRE(back.values.size() == s.values.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) CHECK(same_bits(back.values[i], s.values[i]));
}

TEST_CASE("binary field dump: corrupt input is rejected") {
    const auto s = make_sample();
    std::ostringstream os(std::ios::binary);
    rfield::write_field_binary(os, s);
    const std::string good = os.str();

    SECTION("bad magic") {
        std::string buf = good;
        buf[0] = 'X';
        std::istringstream is(buf, std::ios::binary);
        CHECK_THROWS_AS(rfield::read_field_binary(is), rfield::io_error);
    }
    SECTION("truncated header") {
        std::istringstream is(good.substr(0, 30), std::ios::binary);
        CHECK_THROWS_AS(rfield::read_field_binary(is), rfield::io_error);
    }
    SECTION("truncated values") {
        std::istringstream is(good.substr(0, 60 + 100), std::ios::binary);
        CHECK_THROWS_AS(rfield::read_field_binary(is), rfield::io_error);
    }
    SECTION("unknown kernel kind") {
        std::string buf = good;
        // kind is the u32 after magic(8) + dim(4) + n(4) + spacing(8) + seed(8)
        buf[32] = 7;
        std::istringstream is(buf, std::ios::binary);
        CHECK_THROWS_AS(rfield::read_field_binary(is), rfield::io_error);
    }
    SECTION("empty stream") {
        std::istringstream is(std::string(), std::ios::binary);
        CHECK_THROWS_AS(rfield::read_field_binary(is), rfield::io_error);
    }
}

TEST_CASE("marginal CSV: 17 lines, bitwise round-trip") {
    const auto m = rfield::marginals_from_correlators<double>({0.3, -0.2, 0.5, 0.1});
    std::ostringstream os;
    rfield::write_marginals_csv(os, m);
    const auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 17);
    CHECK(lines[0] == "i,j,a,b,p");

    std::istringstream is(os.str());
    const auto back = rfield::read_marginals_csv(is);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob)
                    CHECK(same_bits(back.table(i, j).at(oa, ob), m.table(i, j).at(oa, ob)));
}

TEST_CASE("marginal CSV: malformed input is rejected, blank lines are not") {
    const auto m = rfield::marginals_from_correlators<double>({0.0, 0.0, 0.0, 0.0});
    std::ostringstream os;
    rfield::write_marginals_csv(os, m);
    auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 17);

    auto joined = [](const std::vector<std::string>& ls) {
        std::string out;
        for (const auto& l : ls) out += l + "\n";
        return out;
    };
    auto read = [&](const std::string& text) {
        std::istringstream is(text);
        return rfield::read_marginals_csv(is);
    };

    SECTION("duplicate row") {
        auto bad = lines;
        bad.push_back(lines.back());
        CHECK_THROWS_AS(read(joined(bad)), rfield::io_error);
    }
    SECTION("missing row") {
        auto bad = lines;
        bad.pop_back();
        CHECK_THROWS_AS(read(joined(bad)), rfield::io_error);
    }
    SECTION("setting out of range") {
        auto bad = lines;
        bad.back() = "3,2,-1,-1,0.25";
        CHECK_THROWS_AS(read(joined(bad)), rfield::io_error);
    }
    SECTION("outcome not +-1") {
        auto bad = lines;
        bad.back() = "2,2,0,-1,0.25";
        CHECK_THROWS_AS(read(joined(bad)), rfield::io_error);
    }
    SECTION("missing probability column") {
        auto bad = lines;
        bad.back() = "2,2,-1,-1";
        CHECK_THROWS_AS(read(joined(bad)), rfield::io_error);
    }
    SECTION("non-numeric probability") {
        auto bad = lines;
        bad.back() = "2,2,-1,-1,abc";
        CHECK_THROWS_AS(read(joined(bad)), rfield::io_error);
    }
    SECTION("empty input") {
        CHECK_THROWS_AS(read(""), rfield::io_error);
    }
    SECTION("blank lines between rows are tolerated") {
        auto padded = lines;
        padded.insert(padded.begin() + 9, "");
        const auto back = read(joined(padded));
        CHECK(same_bits(back.table(1, 1).at(0, 0), m.table(1, 1).at(0, 0)));
    }
}

TEST_CASE("marginal JSON: round-trip and validation") {
    const auto m = rfield::marginals_from_correlators<double>({0.25, -0.75, 0.125, 0.0625});
    const auto doc = rfield::marginals_to_json(m);
    REQUIRE(doc.contains("tables"));
    for (const char* key : {"11", "12", "21", "22"}) CHECK(doc["tables"].contains(key));

    // through text and back: nlohmann prints shortest-round-trip doubles
    const auto reparsed = nlohmann::json::parse(doc.dump());
    const auto back = rfield::read_marginals_json(reparsed);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int oa = 0; oa < 2; ++oa)
                for (int ob = 0; ob < 2; ++ob)
                    CHECK(same_bits(back.table(i, j).at(oa, ob), m.table(i, j).at(oa, ob)));

    SECTION("missing tables object") {
        CHECK_THROWS_AS(rfield::read_marginals_json(nlohmann::json::object()), rfield::io_error);
    }
    SECTION("missing one table") {
        auto bad = nlohmann::json::parse(doc.dump());
        bad["tables"].erase("21");
        CHECK_THROWS_AS(rfield::read_marginals_json(bad), rfield::io_error);
    }
    SECTION("ragged table") {
        auto bad = nlohmann::json::parse(doc.dump());
        bad["tables"]["11"] = {{0.25, 0.25}, {0.25}};
        CHECK_THROWS_AS(rfield::read_marginals_json(bad), rfield::io_error);
    }
}

TEST_CASE("feasibility reports serialize both verdicts") {
    const auto product = rfield::marginals_from_product<double>({0.7, 0.3}, {0.4, 0.6});
    const auto fr = rfield::joint_feasible(product);
    const auto fj = rfield::feasibility_to_json(fr);
    CHECK(fj["verdict"] == "feasible");
    REQUIRE(fj["witness"].size() == 16);
    double total = 0.0;
    for (const auto& q : fj["witness"]) total += q.get<double>();
    CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-9));

    const auto pr = rfield::marginals_from_correlators<double>({1.0, 1.0, 1.0, -1.0});
    const auto ir = rfield::joint_feasible(pr);
    const auto ij = rfield::feasibility_to_json(ir);
    CHECK(ij["verdict"] == "infeasible");
    REQUIRE(ij["certificate"]["signs"].size() == 4);
    CHECK(ij["certificate"]["value"].get<double>() == 4.0);
    CHECK(ij["certificate"]["bound"].get<double>() == 2.0);
}

TEST_CASE("atomic_write places complete files and replaces existing ones") {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / ("rfield_io_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path target = dir / "out.txt";

    rfield::atomic_write(target, "hello\n");
    {
        std::ifstream is(target, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        CHECK(ss.str() == "hello\n");
    }
    CHECK(!fs::exists(dir / "out.txt.tmp"));

    rfield::atomic_write(target, "second");
    {
        std::ifstream is(target, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        CHECK(ss.str() == "second");
    }

    CHECK_THROWS_AS(rfield::atomic_write(dir / "no_such_subdir" / "x.txt", "y"),
                    rfield::io_error);
    fs::remove_all(dir);
}
