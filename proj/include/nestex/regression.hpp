#pragma once

// Per-stratum least squares x ~ c0 + c1*y1 + ... + cK*yK via the normal
// equations (M^T M) c = M^T v, M having rows (1, y1, ..., yK).
//
// The Gram matrix is factored as L D L^T without pivoting. A pivot at or
// below 1e-10 * max(diag) marks the system as numerically singular; the
// solve is then retried on M^T M + lambda*I with
// lambda = 1e-8 * trace(M^T M) / (K+1).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nestex/error.hpp"

namespace nestex {

inline constexpr double kPivotTolerance = 1e-10;
inline constexpr double kRidgeScale = 1e-8;

struct RegressionFit {
    std::vector<double> coeffs;  // c0, c1..cK
    bool ridge_used = false;

    [[nodiscard]] double predict(std::span<const double> y) const noexcept {
        double v = coeffs[0];
        for (std::size_t k = 0; k < y.size(); ++k) v += coeffs[k + 1] * y[k];
        return v;
    }
};

struct RegressionRow {
    std::vector<double> y;
    double x = 0.0;
};

// Gram matrix of one design, factored once and reused for every response
// column j that shares it.
class NormalEquations {
public:
    // `design(q)` must return the K outer coordinates of row q.
    template <class DesignRow>
    NormalEquations(std::size_t rows, std::size_t k_dim, DesignRow&& design)
        : p_(k_dim + 1), rows_(rows), gram_(p_ * p_, 0.0) {
        if (rows == 0) fail(Errc::invalid_argument, "regression needs at least one row");
        std::vector<double> r(p_);
        for (std::size_t q = 0; q < rows; ++q) {
            std::span<const double> y = design(q);
            r[0] = 1.0;
            for (std::size_t k = 0; k < k_dim; ++k) {
                if (!std::isfinite(y[k])) fail(Errc::parse, "non-finite regressor in row " + std::to_string(q));
                r[k + 1] = y[k];
            }
            for (std::size_t a = 0; a < p_; ++a)
                for (std::size_t b = 0; b <= a; ++b) gram_[a * p_ + b] += r[a] * r[b];
        }
        for (std::size_t a = 0; a < p_; ++a)
            for (std::size_t b = 0; b < a; ++b) gram_[b * p_ + a] = gram_[a * p_ + b];

        double max_diag = 0.0, trace = 0.0;
        for (std::size_t a = 0; a < p_; ++a) {
            max_diag = std::max(max_diag, gram_[a * p_ + a]);
            trace += gram_[a * p_ + a];
        }
        if (max_diag == 0.0) {
            zero_ = true;
            return;
        }
        if (!factor(gram_, kPivotTolerance * max_diag)) {
            ridge_used_ = true;
            auto ridged = gram_;
            const double lambda = kRidgeScale * trace / static_cast<double>(p_);
            for (std::size_t a = 0; a < p_; ++a) ridged[a * p_ + a] += lambda;
            if (!factor(ridged, kPivotTolerance * (max_diag + lambda)))
                fail(Errc::numerical, "normal equations singular even after ridge regularization");
        }
    }

    [[nodiscard]] bool ridge_used() const noexcept { return ridge_used_; }
    [[nodiscard]] std::size_t size() const noexcept { return p_; }
    [[nodiscard]] std::span<const double> gram() const noexcept { return gram_; }

    // Solves for the coefficients given the right-hand side M^T v.
    template <class DesignRow>
    [[nodiscard]] RegressionFit solve(std::span<const double> response, DesignRow&& design) const {
        std::vector<double> rhs(p_, 0.0);
        for (std::size_t q = 0; q < rows_; ++q) {
            const double v = response[q];
            if (!std::isfinite(v)) fail(Errc::parse, "non-finite response in row " + std::to_string(q));
            std::span<const double> y = design(q);
            rhs[0] += v;
            for (std::size_t k = 0; k + 1 < p_; ++k) rhs[k + 1] += y[k] * v;
        }
        RegressionFit fit{std::vector<double>(p_, 0.0), ridge_used_};
        if (zero_) return fit;

        auto& c = fit.coeffs;
        for (std::size_t a = 0; a < p_; ++a) {
            double s = rhs[a];
            for (std::size_t b = 0; b < a; ++b) s -= lower_[a * p_ + b] * c[b];
            c[a] = s;
        }
        for (std::size_t a = 0; a < p_; ++a) c[a] /= diag_[a];
        for (std::size_t a = p_; a-- > 0;) {
            double s = c[a];
            for (std::size_t b = a + 1; b < p_; ++b) s -= lower_[b * p_ + a] * c[b];
            c[a] = s;
        }
        return fit;
    }

private:
    bool factor(const std::vector<double>& a, double tol) {
        lower_.assign(p_ * p_, 0.0);
        diag_.assign(p_, 0.0);
        for (std::size_t i = 0; i < p_; ++i) {
            double d = a[i * p_ + i];
            for (std::size_t k = 0; k < i; ++k) d -= lower_[i * p_ + k] * lower_[i * p_ + k] * diag_[k];
            if (!(d > tol)) return false;
            diag_[i] = d;
            lower_[i * p_ + i] = 1.0;
            for (std::size_t r = i + 1; r < p_; ++r) {
                double s = a[r * p_ + i];
                for (std::size_t k = 0; k < i; ++k) s -= lower_[r * p_ + k] * lower_[i * p_ + k] * diag_[k];
                lower_[r * p_ + i] = s / d;
            }
        }
        return true;
    }

    std::size_t p_;
    std::size_t rows_;
    std::vector<double> gram_;
    std::vector<double> lower_;
    std::vector<double> diag_;
    bool ridge_used_ = false;
    bool zero_ = false;
};

inline RegressionFit fit_stratum_regression(std::span<const RegressionRow> rows) {
    if (rows.empty()) fail(Errc::invalid_argument, "regression needs at least one row");
    const std::size_t k_dim = rows.front().y.size();
    for (const auto& r : rows)
        if (r.y.size() != k_dim) fail(Errc::invalid_argument, "regression rows have inconsistent K");
    auto design = [&](std::size_t q) { return std::span<const double>(rows[q].y); };
    NormalEquations eq(rows.size(), k_dim, design);
    std::vector<double> v(rows.size());
    for (std::size_t q = 0; q < rows.size(); ++q) v[q] = rows[q].x;
    return eq.solve(v, design);
}

}  // namespace nestex
