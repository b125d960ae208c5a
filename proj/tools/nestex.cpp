// nestex: estimate nested expectations from joint samples.
//
//   nestex sample <problem> --n N --seed S --out data.csv
//   nestex estimate data.csv --method post-strat --m M --f log|max|identity
//   nestex benchmark --problem P --methods post-strat,nmc --m-grid 2,3,4 --reps 100 --seed 0 --out dir/
//
// Exit codes: 0 success, 1 runtime/domain error, 2 usage/format error.
// NESTEX_THREADS caps benchmark worker threads (0 = auto).

#include <CLI11.hpp>

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "nestex/nestex.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string problem_list() {
    std::string s;
    for (auto name : nestex::kProblemNames) s += (s.empty() ? "" : ", ") + std::string(name);
    return s;
}

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << '\n';
    return kExitUsage;
}

int report(const nestex::Error& e) {
    std::cerr << "error: " << nestex::to_string(e.code()) << ": " << e.what() << '\n';
    return e.is_usage() ? kExitUsage : kExitRuntime;
}

bool parent_dir_exists(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    return parent.empty() || std::filesystem::is_directory(parent);
}

std::size_t threads_from_env() {
    const char* env = std::getenv("NESTEX_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    std::size_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        nestex::fail(nestex::Errc::invalid_argument, "NESTEX_THREADS must be a non-negative integer, got '" + s + "'");
    return v;
}

struct SampleArgs {
    std::string problem;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_sample(const SampleArgs& a) {
    const auto problem = nestex::problem_from_name(a.problem);
    if (!problem) return usage_error("unknown problem '" + a.problem + "'; valid problems: " + problem_list());
    if (a.n == 0) return usage_error("--n must be at least 1");
    if (!parent_dir_exists(a.out)) return usage_error("output directory for '" + a.out + "' does not exist");
    nestex::write_csv(nestex::sample_joint(*problem, a.n, a.seed), a.out);
    return 0;
}

struct EstimateArgs {
    std::string input;
    std::string method;
    std::size_t m = 0;
    std::string f;
    std::uint64_t seed = 0;
};

int cmd_estimate(const EstimateArgs& a) {
    const auto method = nestex::method_from_name(a.method);
    if (!method) return usage_error("unknown method '" + a.method + "'; valid methods: post-strat, post-strat-reg");
    if (*method == nestex::Method::nmc)
        return usage_error("nmc needs a conditional sampler, so it only runs on named problems (see `benchmark`)");
    const auto f = nestex::OuterFunction::from_name(a.f);
    if (!f) return usage_error("unknown outer function '" + a.f + "'; valid: log, max, identity");

    const nestex::Dataset d = nestex::read_csv(a.input);
    nestex::check_stratifiable(d, a.m);
    f->check_dimension(d.j_dim());
    const auto r = *method == nestex::Method::post_strat ? nestex::estimate_post_strat(d, *f, a.m)
                                                         : nestex::estimate_post_strat_reg(d, *f, a.m);
    std::cout << "estimate: " << nestex::format_double(r.value) << '\n'
              << "method: " << nestex::method_name(r.method) << '\n'
              << "f: " << f->name() << '\n'
              << "n_total: " << r.n_total << '\n'
              << "m: " << a.m << '\n'
              << "strata: " << r.n_outer << " x " << r.n_inner << '\n';
    if (r.ridge_fallbacks > 0) std::cout << "ridge_fallbacks: " << r.ridge_fallbacks << '\n';
    return 0;
}

struct BenchArgs {
    std::string problem;
    std::vector<std::string> methods{"post-strat"};
    std::vector<std::size_t> m_grid;
    std::size_t reps = 100;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_benchmark(const BenchArgs& a) {
    const auto problem = nestex::problem_from_name(a.problem);
    if (!problem) return usage_error("unknown problem '" + a.problem + "'; valid problems: " + problem_list());
    nestex::BenchConfig config;
    config.problem = problem->kind;
    config.methods.clear();
    for (const auto& name : a.methods) {
        const auto m = nestex::method_from_name(name);
        if (!m) return usage_error("unknown method '" + name + "'");
        config.methods.push_back(*m);
    }
    config.m_grid = a.m_grid;
    config.replications = a.reps;
    config.base_seed = a.seed;
    config.threads = threads_from_env();

    for (const auto& w : nestex::normalize_config(config)) std::cerr << w << '\n';
    std::error_code ec;
    std::filesystem::create_directories(a.out, ec);
    if (ec || !std::filesystem::is_directory(a.out)) return usage_error("cannot create output directory '" + a.out + "'");

    const nestex::MseTable table = nestex::run_benchmark(config);
    nestex::emit_outputs(table, a.out);

    std::printf("problem %s, reference %s, %zu replications\n", std::string(problem->name).c_str(),
                nestex::format_double(table.reference).c_str(), config.replications);
    std::printf("%-16s %10s %14s %14s %6s\n", "method", "N", "mse", "stderr", "count");
    for (const auto& s : table.summary) {
        std::printf("%-16s %10zu %14.6e %14.6e %6zu%s\n", std::string(nestex::method_name(s.method)).c_str(),
                    s.n_total, s.mse, s.stderr_mse, s.count, s.valid ? "" : "  (invalid)");
    }
    for (nestex::Method m : config.methods) {
        try {
            std::printf("slope %-16s %.4f\n", std::string(nestex::method_name(m)).c_str(),
                        nestex::fit_loglog_slope(table, m));
        } catch (const nestex::Error&) {
            std::printf("slope %-16s n/a\n", std::string(nestex::method_name(m)).c_str());
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nested expectation estimation by post-stratification"};
    app.require_subcommand(1);

    SampleArgs sample;
    auto* sub_sample = app.add_subcommand("sample", "Write joint samples of a benchmark problem to CSV");
    sub_sample->add_option("problem", sample.problem, "eig-toy, evsi-simple or evsi-medical")->required();
    sub_sample->add_option("--n", sample.n, "Number of samples")->required();
    sub_sample->add_option("--seed", sample.seed, "RNG seed");
    sub_sample->add_option("--out", sample.out, "Output CSV path")->required();

    EstimateArgs est;
    auto* sub_est = app.add_subcommand("estimate", "Estimate a nested expectation from a joint-sample CSV");
    sub_est->add_option("input", est.input, "Joint-sample CSV (x1..xJ,y1..yK)")->required();
    sub_est->add_option("--method", est.method, "post-strat or post-strat-reg")->default_val("post-strat");
    sub_est->add_option("--m", est.m, "Stratification parameter; N must equal m^(2K)")->required();
    sub_est->add_option("--f", est.f, "Outer function: log, max or identity")->required();
    sub_est->add_option("--seed", est.seed, "Accepted for symmetry; stratified methods are deterministic");

    BenchArgs bench;
    auto* sub_bench = app.add_subcommand("benchmark", "Replicated MSE study over a grid of m");
    sub_bench->add_option("--problem", bench.problem, "Benchmark problem")->required();
    sub_bench->add_option("--methods", bench.methods, "Comma-separated methods")->delimiter(',');
    sub_bench->add_option("--m-grid", bench.m_grid, "Comma-separated ascending m values")->delimiter(',')->required();
    sub_bench->add_option("--reps", bench.reps, "Replications per cell");
    sub_bench->add_option("--seed", bench.seed, "Base seed");
    sub_bench->add_option("--out", bench.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*sub_sample) return cmd_sample(sample);
        if (*sub_est) return cmd_estimate(est);
        return cmd_benchmark(bench);
    } catch (const nestex::Error& e) {
        return report(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}
