#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nestex/dataset.hpp"
#include "nestex/error.hpp"
#include "nestex/numeric.hpp"
#include "nestex/outer_function.hpp"
#include "nestex/problems.hpp"
#include "nestex/regression.hpp"
#include "nestex/stratify.hpp"

namespace nestex {

enum class Method : std::uint8_t { post_strat, post_strat_reg, nmc };

inline constexpr std::string_view method_name(Method m) noexcept {
    switch (m) {
        case Method::post_strat: return "post-strat";
        case Method::post_strat_reg: return "post-strat-reg";
        case Method::nmc: return "nmc";
    }
    return "?";
}

inline std::optional<Method> method_from_name(std::string_view s) {
    for (Method m : {Method::post_strat, Method::post_strat_reg, Method::nmc})
        if (method_name(m) == s) return m;
    return std::nullopt;
}

struct EstimateResult {
    double value = 0.0;
    Method method = Method::post_strat;
    std::size_t n_total = 0;
    std::optional<std::size_t> m;  // absent for NMC
    std::size_t n_outer = 0;
    std::size_t n_inner = 0;
    std::vector<double> x_mean;  // grand mean of every X sample consumed
    std::size_t ridge_fallbacks = 0;
};

namespace detail {

inline double apply_outer(const OuterFunction& f, std::span<const double> v, std::string_view where, std::size_t i) {
    try {
        return f(v);
    } catch (const Error& e) {
        if (e.code() != Errc::domain) throw;
        fail(Errc::domain, std::string(e.what()) + " in " + std::string(where) + " " + std::to_string(i));
    }
}

}  // namespace detail

// f applied to the grand mean of X.
inline double estimate_plain_mc(const Dataset& d, const OuterFunction& f) {
    f.check_dimension(d.j_dim());
    return f(d.x_grand_mean());
}

// Post-stratified estimate: mean over strata of f(stratum mean of X).
inline EstimateResult estimate_post_strat(const Dataset& d, const OuterFunction& f, std::size_t m) {
    f.check_dimension(d.j_dim());
    const StratifiedIndex idx = stratify(d, m);
    const std::size_t strata = idx.stratum_count();
    const std::size_t jd = d.j_dim();

    std::vector<double> values(strata);
    std::vector<double> buf(idx.stratum_size);
    std::vector<double> inner(jd);
    for (std::size_t p = 0; p < strata; ++p) {
        const auto rows = idx.rows(p);
        for (std::size_t j = 0; j < jd; ++j) {
            for (std::size_t q = 0; q < rows.size(); ++q) buf[q] = d.x(rows[q], j);
            inner[j] = mean(buf);
        }
        values[p] = detail::apply_outer(f, inner, "stratum", p);
    }
    return {mean(values), Method::post_strat, d.size(), m, strata, idx.stratum_size, d.x_grand_mean(), 0};
}

// Post-stratified estimate with a per-stratum linear fit of each X_j on Y:
// mean over all samples of f(fitted X at that sample's Y).
inline EstimateResult estimate_post_strat_reg(const Dataset& d, const OuterFunction& f, std::size_t m) {
    f.check_dimension(d.j_dim());
    const StratifiedIndex idx = stratify(d, m);
    const std::size_t strata = idx.stratum_count();
    const std::size_t jd = d.j_dim();
    const std::size_t kd = d.k_dim();

    std::vector<double> values(d.size());
    std::vector<double> response(idx.stratum_size);
    std::vector<double> predicted(idx.stratum_size * jd);
    std::vector<double> point(jd);
    std::size_t fallbacks = 0;
    for (std::size_t p = 0; p < strata; ++p) {
        const auto rows = idx.rows(p);
        auto design = [&](std::size_t q) { return d.y(rows[q]); };
        const NormalEquations eq(rows.size(), kd, design);
        if (eq.ridge_used()) ++fallbacks;
        for (std::size_t j = 0; j < jd; ++j) {
            for (std::size_t q = 0; q < rows.size(); ++q) response[q] = d.x(rows[q], j);
            const RegressionFit fit = eq.solve(response, design);
            for (std::size_t q = 0; q < rows.size(); ++q) predicted[q * jd + j] = fit.predict(d.y(rows[q]));
        }
        for (std::size_t q = 0; q < rows.size(); ++q) {
            for (std::size_t j = 0; j < jd; ++j) point[j] = predicted[q * jd + j];
            values[p * idx.stratum_size + q] = detail::apply_outer(f, point, "stratum", p);
        }
    }
    return {mean(values), Method::post_strat_reg, d.size(), m, strata, idx.stratum_size, d.x_grand_mean(), fallbacks};
}

// Nested Monte Carlo with n_outer draws of Y and n_inner conditional draws
// of X per outer draw.
inline EstimateResult estimate_nmc(const NestedProblem& problem, std::size_t n_outer, std::size_t n_inner,
                                   std::uint64_t seed) {
    if (!problem.has_conditional)
        fail(Errc::capability, std::string(problem.name) +
                                   " cannot be estimated by nested Monte Carlo: no conditional sampler for X | Y");
    if (n_outer == 0 || n_inner == 0) fail(Errc::invalid_argument, "NMC needs n_outer, n_inner >= 1");
    const std::size_t jd = problem.j_dim;
    Rng rng(seed);

    std::vector<double> values(n_outer);
    std::vector<std::vector<double>> column_means(jd, std::vector<double>(n_outer));
    std::vector<double> draws;
    std::vector<double> buf(n_inner);
    std::vector<double> inner(jd);
    for (std::size_t p = 0; p < n_outer; ++p) {
        const auto y = sample_outer(problem, rng);
        draws.clear();
        sample_conditional_into(problem, y, n_inner, rng, draws);
        for (std::size_t j = 0; j < jd; ++j) {
            for (std::size_t q = 0; q < n_inner; ++q) buf[q] = draws[q * jd + j];
            inner[j] = mean(buf);
            column_means[j][p] = inner[j];
        }
        values[p] = detail::apply_outer(problem.f, inner, "outer draw", p);
    }
    std::vector<double> grand(jd);
    for (std::size_t j = 0; j < jd; ++j) grand[j] = mean(column_means[j]);
    return {mean(values), Method::nmc, n_outer * n_inner, std::nullopt, n_outer, n_inner, std::move(grand), 0};
}

}  // namespace nestex
