#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "nestex/dataset.hpp"

using nestex::Dataset;
using nestex::Errc;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("nestex_test_" + name);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const nestex::Error& e) {
        return e.code();
    }
    FAIL("expected nestex::Error");
    return Errc::io;
}

Dataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t j, std::size_t k) {
    std::normal_distribution<double> z(0.0, 1e3);
    std::vector<double> xs(n * j), ys(n * k);
    for (double& v : xs) v = z(rng);
    for (double& v : ys) v = z(rng) * 1e-7;
    return Dataset(j, k, xs, ys);
}

}  // namespace

TEST_CASE("read_csv keeps dimensions and row order", "[dataset]") {
    const auto p = temp_file("basic.csv");
    write_text(p, "x1,y1\n1.0,0.5\n2.0,0.25\n");
    const Dataset d = nestex::read_csv(p.string());
    CHECK(d.j_dim() == 1);
    CHECK(d.k_dim() == 1);
    REQUIRE(d.size() == 2);
    CHECK(d.x(0, 0) == 1.0);
    CHECK(d.y(0, 0) == 0.5);
    CHECK(d.x(1, 0) == 2.0);
    CHECK(d.y(1, 0) == 0.25);
}

TEST_CASE("parse_csv accepts a missing trailing newline and CRLF", "[dataset]") {
    CHECK(nestex::parse_csv("x1,y1\n1,2").size() == 1);
    CHECK(nestex::parse_csv("x1,y1\r\n1,2\r\n").size() == 1);
}

TEST_CASE("header with no body rows is rejected", "[dataset]") {
    CHECK(code_of([] { nestex::parse_csv("x1,x2,y1\n"); }) == Errc::format);
}

TEST_CASE("malformed inputs give diagnostics", "[dataset]") {
    CHECK(code_of([] { nestex::parse_csv(""); }) == Errc::format);
    CHECK(code_of([] { nestex::parse_csv("y1,x1\n1,2\n"); }) == Errc::format);
    CHECK(code_of([] { nestex::parse_csv("x1,x3,y1\n1,2,3\n"); }) == Errc::format);
    CHECK(code_of([] { nestex::parse_csv("x1\n1\n"); }) == Errc::format);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\n1,2,3\n"); }) == Errc::format);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\n1,2\n\n3,4\n"); }) == Errc::format);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\n1,abc\n"); }) == Errc::parse);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\n1,\n"); }) == Errc::parse);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\nnan,1\n"); }) == Errc::parse);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\n1,inf\n"); }) == Errc::parse);
    CHECK(code_of([] { nestex::parse_csv("x1,y1\n1, 2\n"); }) == Errc::parse);
    CHECK(code_of([] { nestex::read_csv("/nonexistent/dir/file.csv"); }) == Errc::io);
}

TEST_CASE("parse errors name the row and column", "[dataset]") {
    try {
        nestex::parse_csv("x1,x2,y1\n1,2,3\n4,oops,6\n");
        FAIL("expected parse error");
    } catch (const nestex::Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 2") != std::string::npos);
        CHECK(msg.find("x2") != std::string::npos);
    }
}

TEST_CASE("write_csv emits canonical text", "[dataset]") {
    CHECK(nestex::format_csv(Dataset(1, 1, {1.0}, {2.0})) == "x1,y1\n1,2\n");
    CHECK(nestex::format_csv(Dataset(2, 3, {1, 2}, {3, 4, 5})).starts_with("x1,x2,y1,y2,y3\n"));

    const auto p = temp_file("write.csv");
    nestex::write_csv(Dataset(1, 1, {1.0}, {2.0}), p.string());
    CHECK(read_text(p) == "x1,y1\n1,2\n");
}

TEST_CASE("CSV round trip is exact on random datasets", "[dataset][property]") {
    std::mt19937_64 rng(11);
    const auto p = temp_file("roundtrip.csv");
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 1 + rng() % 40, j = 1 + rng() % 3, k = 1 + rng() % 3;
        const Dataset d = random_dataset(rng, trial == 0 ? 16 : n, j, k);
        nestex::write_csv(d, p.string());
        const Dataset back = nestex::read_csv(p.string());
        CHECK(back == d);
        // Canonical form is a fixed point.
        CHECK(nestex::format_csv(back) == read_text(p));
    }
}

TEST_CASE("arbitrary bytes either parse or raise a nestex::Error", "[dataset][property]") {
    std::mt19937_64 rng(5);
    const std::string alphabet = "xy0123456789.,-e\n";
    int parsed = 0;
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text = trial % 2 ? "x1,y1\n" : "";
        const std::size_t len = rng() % 30;
        for (std::size_t i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
        try {
            const Dataset d = nestex::parse_csv(text);
            CHECK(d.size() >= 1);
            ++parsed;
        } catch (const nestex::Error&) {
        }
    }
    CHECK(parsed > 0);
}

TEST_CASE("check_stratifiable requires N == m^{2K}", "[dataset]") {
    auto sized = [](std::size_t n, std::size_t k) {
        return Dataset(1, k, std::vector<double>(n, 1.0), std::vector<double>(n * k, 0.0));
    };
    CHECK_NOTHROW(nestex::check_stratifiable(sized(16, 2), 2));
    CHECK_NOTHROW(nestex::check_stratifiable(sized(64, 3), 2));
    CHECK(code_of([&] { nestex::check_stratifiable(sized(20, 2), 2); }) == Errc::size_mismatch);
    CHECK(code_of([&] { nestex::check_stratifiable(sized(16, 2), 1); }) == Errc::invalid_argument);
    try {
        nestex::check_stratifiable(sized(20, 2), 2);
    } catch (const nestex::Error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("20") != std::string::npos);
        CHECK(msg.find("16") != std::string::npos);
    }
}

TEST_CASE("Dataset construction validates shape and values", "[dataset]") {
    CHECK(code_of([] { Dataset(0, 1, {}, {}); }) == Errc::format);
    CHECK(code_of([] { Dataset(1, 1, {1, 2}, {1}); }) == Errc::format);
    CHECK(code_of([] { Dataset(1, 1, {NAN}, {1}); }) == Errc::parse);
    const std::vector<nestex::JointSample> bad{{{1.0}, {1.0}}, {{1.0, 2.0}, {1.0}}};
    CHECK(code_of([&] { Dataset::from_samples(bad); }) == Errc::format);
}
