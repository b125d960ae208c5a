#pragma once

// Benchmark models with known (or externally estimated) nested expectations.
//
//   eig-toy       X = sqrt(2/pi) exp(-2 (Y - theta)^2), Y ~ U(-1,1), theta ~ N(0,1),
//                 f = log. J = K = 1.
//   evsi-simple   (theta, Y1, Y2, Y3) jointly normal, unit variances, all
//                 correlations 1/2; X = (theta, -theta), f = max. J = 2, K = 3.
//   evsi-medical  twelve-parameter treatment model, three treatments, a
//                 100-patient trial informing OR_{E,3}, C_{T,3}, P_{SE,3};
//                 X = (NB_1, NB_2, NB_3), f = max. J = 3, K = 3. No
//                 conditional sampler exists for this model.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nestex/dataset.hpp"
#include "nestex/error.hpp"
#include "nestex/outer_function.hpp"

namespace nestex {

using Rng = std::mt19937_64;

enum class ProblemKind : std::uint8_t { eig_toy, evsi_simple, evsi_medical };

struct NestedProblem {
    ProblemKind kind;
    std::string_view name;
    std::size_t j_dim;
    std::size_t k_dim;
    OuterFunction f;
    bool has_conditional;
    bool is_evsi;
    std::optional<double> reference;
    std::optional<double> baseline_term;  // max_d E NB_d, when known in closed form
};

inline constexpr std::array<std::string_view, 3> kProblemNames{"eig-toy", "evsi-simple", "evsi-medical"};

// E_Y log E_theta[X] = 0.5 ln(2/(5 pi)) - (2/5) E[Y^2], E[Y^2] = 1/3.
inline double eig_toy_reference() { return 0.5 * std::log(2.0 / (5.0 * std::numbers::pi)) - 2.0 / 15.0; }

// E|mu(Y)| with mu(Y) = (Y1+Y2+Y3)/4 ~ N(0, 3/8).
inline double evsi_simple_reference() { return std::sqrt(3.0 / (4.0 * std::numbers::pi)); }

// High-accuracy external estimate; not analytic.
inline constexpr double kEvsiMedicalReference = 1031.0;

inline NestedProblem make_problem(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::eig_toy:
            return {kind, kProblemNames[0], 1, 1, OuterFunction::log(), true, false, eig_toy_reference(), std::nullopt};
        case ProblemKind::evsi_simple:
            return {kind, kProblemNames[1], 2, 3, OuterFunction::max_coordinate(), true, true,
                    evsi_simple_reference(), 0.0};
        case ProblemKind::evsi_medical:
            return {kind, kProblemNames[2], 3, 3, OuterFunction::max_coordinate(), false, true,
                    kEvsiMedicalReference, std::nullopt};
    }
    fail(Errc::invalid_argument, "unknown problem");
}

inline std::optional<NestedProblem> problem_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kProblemNames.size(); ++i)
        if (kProblemNames[i] == name) return make_problem(static_cast<ProblemKind>(i));
    return std::nullopt;
}

inline double reference_value(const NestedProblem& problem) {
    switch (problem.kind) {
        case ProblemKind::eig_toy: return eig_toy_reference();
        case ProblemKind::evsi_simple: return evsi_simple_reference();
        case ProblemKind::evsi_medical: return kEvsiMedicalReference;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Medical decision model

inline constexpr double kWillingnessToPay = 75000.0;  // per QALY
inline constexpr int kTrialPatients = 100;

struct MedicalTheta {
    double lifetime = 0.0;           // L, years
    double qaly_event = 0.0;         // Q_E
    double qaly_side_effect = 0.0;   // Q_SE
    double cost_event = 0.0;         // C_E
    double cost_side_effect = 0.0;   // C_SE
    std::array<double, 3> cost_treatment{};  // C_{T,d}, C_{T,1} = 0
    std::array<double, 3> p_event{};         // P_{E,d}
    std::array<double, 2> odds_ratio{};      // OR_{E,2}, OR_{E,3}
    std::array<double, 3> p_side_effect{};   // P_{SE,d}, P_{SE,1} = 0
    double lambda = kWillingnessToPay;
};

// P_{E,d} from P_{E,1} and the odds ratio relative to treatment 1.
inline double derive_p_event(double p1, double odds_ratio) {
    if (!(p1 > 0.0 && p1 < 1.0)) fail(Errc::domain, "P_E1 must lie in (0,1), got " + format_double(p1));
    if (!(odds_ratio > 0.0)) fail(Errc::domain, "odds ratio must be positive, got " + format_double(odds_ratio));
    const double odds = odds_ratio * p1 / (1.0 - p1);
    return odds / (1.0 + odds);
}

// d is 1-based.
inline double net_benefit(const MedicalTheta& t, int d) {
    if (d < 1 || d > 3) fail(Errc::invalid_argument, "treatment index must be 1..3");
    const std::size_t i = static_cast<std::size_t>(d - 1);
    const double pse = t.p_side_effect[i];
    const double pe = t.p_event[i];
    const double l = t.lifetime;
    const double half_q = (1.0 + t.qaly_event) / 2.0;
    return pse * pe * (t.lambda * (l * half_q - t.qaly_side_effect) - (t.cost_side_effect + t.cost_event)) +
           pse * (1.0 - pe) * (t.lambda * (l - t.qaly_side_effect) - t.cost_side_effect) +
           (1.0 - pse) * pe * (t.lambda * l * half_q - t.cost_event) + (1.0 - pse) * (1.0 - pe) * t.lambda * l -
           t.cost_treatment[i];
}

namespace detail {

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Draw from N(mean, cov) in two dimensions; cov = {var1, cov12, var2}.
inline std::array<double, 2> bivariate_normal(Rng& rng, std::array<double, 2> mean, std::array<double, 3> cov) {
    std::normal_distribution<double> z;
    const double l11 = std::sqrt(cov[0]);
    const double l21 = cov[1] / l11;
    const double l22 = std::sqrt(cov[2] - l21 * l21);
    const double z1 = z(rng);
    const double z2 = z(rng);
    return {mean[0] + l11 * z1, mean[1] + l21 * z1 + l22 * z2};
}

inline double beta(Rng& rng, double a, double b) {
    const double ga = std::gamma_distribution<double>(a, 1.0)(rng);
    const double gb = std::gamma_distribution<double>(b, 1.0)(rng);
    return ga / (ga + gb);
}

}  // namespace detail

// Normal parameters below are (mean, variance); the log-/logit-normal ones
// describe the underlying normal.
inline MedicalTheta sample_theta(Rng& rng) {
    auto normal = [&](double mean, double var) { return std::normal_distribution<double>(mean, std::sqrt(var))(rng); };
    MedicalTheta t;
    t.lifetime = normal(30.0, 25.0);
    t.qaly_event = detail::logistic(normal(0.6, 1.0 / 36.0));
    t.qaly_side_effect = normal(0.7, 0.01);
    t.cost_event = normal(2e5, 1e8);
    t.cost_side_effect = normal(1e5, 1e8);

    const auto ct = detail::bivariate_normal(rng, {1.5e4, 2e4}, {300.0, 100.0, 500.0});
    t.cost_treatment = {0.0, ct[0], ct[1]};

    const double p1 = detail::beta(rng, 15.0, 85.0);
    const auto log_or = detail::bivariate_normal(rng, {-1.5, -1.75}, {0.11, 0.02, 0.06});
    t.odds_ratio = {std::exp(log_or[0]), std::exp(log_or[1])};
    t.p_event = {p1, derive_p_event(p1, t.odds_ratio[0]), derive_p_event(p1, t.odds_ratio[1])};

    const auto logit_pse = detail::bivariate_normal(rng, {-1.4, -1.1}, {0.10, 0.05, 0.25});
    t.p_side_effect = {0.0, detail::logistic(logit_pse[0]), detail::logistic(logit_pse[1])};
    return t;
}

// Trial data informing OR_{E,3}, C_{T,3} and P_{SE,3}.
inline std::array<double, 3> sample_trial(Rng& rng, const MedicalTheta& t) {
    const double n = kTrialPatients;
    const double y1 = std::normal_distribution<double>(std::log(t.odds_ratio[1]), std::sqrt(4.0 / n))(rng);
    const double y2 = std::normal_distribution<double>(t.cost_treatment[2], std::sqrt(1e4 / n))(rng);
    const double y3 = static_cast<double>(std::binomial_distribution<int>(kTrialPatients, t.p_side_effect[2])(rng));
    return {y1, y2, y3};
}

// ---------------------------------------------------------------------------
// Samplers

namespace detail {

inline double eig_toy_likelihood(double y, double theta) {
    return std::sqrt(2.0 / std::numbers::pi) * std::exp(-2.0 * (y - theta) * (y - theta));
}

// (theta, Y1, Y2, Y3) with unit variances and pairwise correlation 1/2:
// each coordinate is sqrt(1/2) * (shared + own) standard normals.
inline std::array<double, 4> evsi_simple_joint(Rng& rng) {
    std::normal_distribution<double> z;
    const double shared = z(rng);
    std::array<double, 4> v{};
    for (double& c : v) c = std::numbers::sqrt2 / 2.0 * (shared + z(rng));
    return v;
}

inline constexpr double kEvsiSimplePosteriorVariance = 5.0 / 8.0;

inline double evsi_simple_posterior_mean(std::span<const double> y) { return (y[0] + y[1] + y[2]) / 4.0; }

}  // namespace detail

inline Dataset sample_joint(const NestedProblem& problem, std::size_t n, std::uint64_t seed) {
    if (n == 0) fail(Errc::invalid_argument, "sample count must be at least 1");
    Rng rng(seed);
    std::vector<double> xs, ys;
    xs.reserve(n * problem.j_dim);
    ys.reserve(n * problem.k_dim);
    for (std::size_t i = 0; i < n; ++i) {
        switch (problem.kind) {
            case ProblemKind::eig_toy: {
                const double y = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
                const double theta = std::normal_distribution<double>()(rng);
                xs.push_back(detail::eig_toy_likelihood(y, theta));
                ys.push_back(y);
                break;
            }
            case ProblemKind::evsi_simple: {
                const auto v = detail::evsi_simple_joint(rng);
                xs.insert(xs.end(), {v[0], -v[0]});
                ys.insert(ys.end(), {v[1], v[2], v[3]});
                break;
            }
            case ProblemKind::evsi_medical: {
                const auto theta = sample_theta(rng);
                const auto y = sample_trial(rng, theta);
                xs.insert(xs.end(), {net_benefit(theta, 1), net_benefit(theta, 2), net_benefit(theta, 3)});
                ys.insert(ys.end(), y.begin(), y.end());
                break;
            }
        }
    }
    return Dataset(problem.j_dim, problem.k_dim, std::move(xs), std::move(ys));
}

// One draw of Y from its marginal.
inline std::vector<double> sample_outer(const NestedProblem& problem, Rng& rng) {
    switch (problem.kind) {
        case ProblemKind::eig_toy: return {std::uniform_real_distribution<double>(-1.0, 1.0)(rng)};
        case ProblemKind::evsi_simple: {
            const auto v = detail::evsi_simple_joint(rng);
            return {v[1], v[2], v[3]};
        }
        case ProblemKind::evsi_medical: break;
    }
    fail(Errc::capability, std::string(problem.name) + " has no marginal sampler for Y without theta");
}

// Appends n draws of X | Y = y to `out` (row-major, J per draw).
inline void sample_conditional_into(const NestedProblem& problem, std::span<const double> y, std::size_t n, Rng& rng,
                                    std::vector<double>& out) {
    if (!problem.has_conditional)
        fail(Errc::capability, std::string(problem.name) + " has no conditional sampler for X | Y");
    if (y.size() != problem.k_dim) fail(Errc::invalid_argument, "y has the wrong dimension");
    std::normal_distribution<double> z;
    for (std::size_t i = 0; i < n; ++i) {
        if (problem.kind == ProblemKind::eig_toy) {
            out.push_back(detail::eig_toy_likelihood(y[0], z(rng)));
        } else {
            const double theta = detail::evsi_simple_posterior_mean(y) +
                                 std::sqrt(detail::kEvsiSimplePosteriorVariance) * z(rng);
            out.push_back(theta);
            out.push_back(-theta);
        }
    }
}

inline std::vector<std::vector<double>> sample_conditional(const NestedProblem& problem, std::span<const double> y,
                                                           std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> flat;
    sample_conditional_into(problem, y, n, rng, flat);
    std::vector<std::vector<double>> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i].assign(flat.begin() + static_cast<std::ptrdiff_t>(i * problem.j_dim),
                      flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * problem.j_dim));
    return out;
}

}  // namespace nestex
