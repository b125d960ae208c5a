#pragma once

// EVSI = E_Y max_d E[NB_d | Y] - max_d E[NB_d].
//
// Both terms come from the same draws: the nested term from the chosen
// estimator, the baseline from the grand means of the X columns that
// estimator consumed.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>

#include "nestex/estimators.hpp"
#include "nestex/problems.hpp"

namespace nestex {

// Runs `method` on a fresh draw of total size m^{2K}. NMC uses
// N_p = N_q = m^K so every method consumes the same number of samples.
inline EstimateResult estimate_nested(const NestedProblem& problem, Method method, std::size_t m, std::uint64_t seed) {
    if (m < 2) fail(Errc::invalid_argument, "m must be at least 2");
    const auto side = checked_pow(m, problem.k_dim);
    const auto n = side ? checked_pow(*side, 2) : std::nullopt;
    if (!n) fail(Errc::invalid_argument, "m^{2K} overflows");
    if (method == Method::nmc) return estimate_nmc(problem, *side, *side, seed);
    const Dataset d = sample_joint(problem, *n, seed);
    return method == Method::post_strat ? estimate_post_strat(d, problem.f, m)
                                        : estimate_post_strat_reg(d, problem.f, m);
}

inline double evsi_from(const EstimateResult& r) {
    return r.value - *std::max_element(r.x_mean.begin(), r.x_mean.end());
}

inline double estimate_evsi(const NestedProblem& problem, Method method, std::size_t m, std::uint64_t seed) {
    if (!problem.is_evsi) fail(Errc::invalid_argument, std::string(problem.name) + " is not an EVSI problem");
    return evsi_from(estimate_nested(problem, method, m, seed));
}

// The quantity a benchmark compares against reference_value(problem).
inline double estimate_target(const NestedProblem& problem, Method method, std::size_t m, std::uint64_t seed) {
    const EstimateResult r = estimate_nested(problem, method, m, seed);
    return problem.is_evsi ? evsi_from(r) : r.value;
}

}  // namespace nestex
