#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "nestex_cli_test";

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Run run(const std::string& args, const std::string& env = "") {
    fs::create_directories(kWork);
    const auto out = kWork / "stdout.txt", err = kWork / "stderr.txt";
    const std::string cmd = env + " " + NESTEX_CLI + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_text(out), read_text(err)};
}

std::string path(const std::string& name) { return (kWork / name).string(); }

}  // namespace

TEST_CASE("sample writes a CSV and is deterministic", "[cli]") {
    REQUIRE(run("sample eig-toy --n 16 --seed 1 --out " + path("d.csv")).code == 0);
    const auto first = read_text(path("d.csv"));
    CHECK(first.starts_with("x1,y1\n"));
    CHECK(std::count(first.begin(), first.end(), '\n') == 17);
    REQUIRE(run("sample eig-toy --n 16 --seed 1 --out " + path("d.csv")).code == 0);
    CHECK(read_text(path("d.csv")) == first);
}

TEST_CASE("sample rejects unknown problems", "[cli]") {
    const auto r = run("sample bogus --n 4 --out " + path("x.csv"));
    CHECK(r.code == 2);
    CHECK(r.err.find("eig-toy") != std::string::npos);
    CHECK(r.err.find("evsi-medical") != std::string::npos);
}

TEST_CASE("estimate from a file", "[cli]") {
    std::ofstream(path("four.csv")) << "x1,y1\n1,0.1\n2,0.2\n3,0.3\n4,0.4\n";
    const auto ok = run("estimate " + path("four.csv") + " --method post-strat --m 2 --f identity");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("estimate: 2.5\n") != std::string::npos);
    CHECK(ok.out.find("n_total: 4") != std::string::npos);

    const auto reg = run("estimate " + path("four.csv") + " --method post-strat-reg --m 2 --f max");
    CHECK(reg.code == 0);
    CHECK(reg.out.find("estimate: 2.5") != std::string::npos);

    const auto bad_m = run("estimate " + path("four.csv") + " --method post-strat --m 3 --f identity");
    CHECK(bad_m.code == 2);
    CHECK(bad_m.err.find("N must equal m^2") != std::string::npos);

    CHECK(run("estimate " + path("four.csv") + " --method nmc --m 2 --f identity").code == 2);
    CHECK(run("estimate " + path("four.csv") + " --method post-strat --m 2.5 --f identity").code == 2);
    CHECK(run("estimate " + path("four.csv") + " --method post-strat --m 2 --f cube").code == 2);
    CHECK(run("estimate " + path("missing.csv") + " --m 2 --f identity").code == 1);

    std::ofstream(path("bad.csv")) << "x1,y1\n1,zz\n";
    CHECK(run("estimate " + path("bad.csv") + " --m 2 --f identity").code == 2);
}

TEST_CASE("estimate reports log domain failures with exit 1", "[cli]") {
    std::ofstream(path("neg.csv")) << "x1,y1\n1,0.1\n2,0.2\n-9,0.3\n1,0.4\n";
    const auto r = run("estimate " + path("neg.csv") + " --m 2 --f log");
    CHECK(r.code == 1);
    CHECK(r.err.find("stratum 1") != std::string::npos);
}

TEST_CASE("sampled files feed straight into estimate", "[cli]") {
    REQUIRE(run("sample evsi-simple --n 729 --seed 3 --out " + path("s.csv")).code == 0);
    const auto r = run("estimate " + path("s.csv") + " --method post-strat --m 3 --f max");
    CHECK(r.code == 0);
    CHECK(r.out.find("strata: 27 x 27") != std::string::npos);
}

TEST_CASE("benchmark writes outputs deterministically", "[cli]") {
    const std::string args = "benchmark --problem evsi-simple --methods post-strat,post-strat-reg --m-grid 2,3,4 "
                             "--reps 20 --seed 7 --out ";
    fs::remove_all(path("b1"));
    const auto r = run(args + path("b1"), "NESTEX_THREADS=1");
    REQUIRE(r.code == 0);
    for (const char* f : {"raw.csv", "summary.csv", "mse.svg"}) CHECK(fs::exists(kWork / "b1" / f));
    CHECK(r.out.find("slope post-strat") != std::string::npos);

    REQUIRE(run(args + path("b2"), "NESTEX_THREADS=8").code == 0);
    for (const char* f : {"raw.csv", "summary.csv", "mse.svg"})
        CHECK(read_text(kWork / "b1" / f) == read_text(kWork / "b2" / f));
}

TEST_CASE("benchmark drops nmc for the medical model with a warning", "[cli]") {
    const auto r = run("benchmark --problem evsi-medical --methods post-strat,nmc --m-grid 2 --reps 2 --out " + path("b3"));
    CHECK(r.code == 0);
    CHECK(r.err.find("dropping nmc") != std::string::npos);
    CHECK(read_text(kWork / "b3" / "raw.csv").find("nmc") == std::string::npos);
}

TEST_CASE("benchmark usage errors exit 2", "[cli]") {
    CHECK(run("benchmark --problem evsi-simple --m-grid 3,2 --reps 2 --out " + path("b4")).code == 2);
    CHECK(run("benchmark --problem evsi-simple --m-grid 2 --reps 1 --out " + path("b4")).code == 2);
    CHECK(run("benchmark --problem nope --m-grid 2 --out " + path("b4")).code == 2);
    CHECK(run("benchmark --problem evsi-simple --methods gam --m-grid 2 --out " + path("b4")).code == 2);
    CHECK(run("benchmark --problem evsi-simple --m-grid 2 --out " + path("b4"), "NESTEX_THREADS=x").code == 2);
    CHECK(run("").code == 2);
}
