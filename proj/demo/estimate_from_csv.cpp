// Library walkthrough: draw joint samples of the EIG toy model, round-trip
// them through CSV, and estimate the nested expectation with both stratified
// estimators. Only the (X, Y) pairs are used; no conditional sampling.

#include <cstdio>
#include <filesystem>

#include "nestex/nestex.hpp"

int main() {
    const auto problem = nestex::make_problem(nestex::ProblemKind::eig_toy);
    const std::size_t m = 32;  // N = m^2 = 1024

    const auto path = std::filesystem::temp_directory_path() / "nestex_demo.csv";
    nestex::write_csv(nestex::sample_joint(problem, m * m, 42), path.string());
    const nestex::Dataset data = nestex::read_csv(path.string());

    const auto plain = nestex::estimate_post_strat(data, nestex::OuterFunction::log(), m);
    const auto reg = nestex::estimate_post_strat_reg(data, nestex::OuterFunction::log(), m);
    std::printf("reference       %.6f\n", nestex::reference_value(problem));
    std::printf("post-strat      %.6f\n", plain.value);
    std::printf("post-strat-reg  %.6f\n", reg.value);
    std::filesystem::remove(path);
}
