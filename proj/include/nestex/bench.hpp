#pragma once

// Replicated MSE convergence studies over a grid of m.
//
// Every (method, m, replication) cell draws from its own RNG stream derived
// from (base_seed, problem, method, m, replication), and results are stored
// by cell index, so the table does not depend on the number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nestex/error.hpp"
#include "nestex/evsi.hpp"
#include "nestex/numeric.hpp"
#include "nestex/problems.hpp"

namespace nestex {

// Cells with more than this fraction of failed replications are invalid.
inline constexpr double kMaxFailureFraction = 0.10;

struct BenchConfig {
    ProblemKind problem = ProblemKind::eig_toy;
    std::vector<Method> methods{Method::post_strat};
    std::vector<std::size_t> m_grid;
    std::size_t replications = 100;
    std::uint64_t base_seed = 0;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct BenchRow {
    Method method;
    std::size_t m;
    std::size_t n_total;
    std::size_t replication;
    std::optional<double> estimate;
    std::optional<double> squared_error;
    std::string status;  // "ok" or the failure category
};

struct SummaryRow {
    Method method;
    std::size_t m;
    std::size_t n_total;
    double mse;
    double stderr_mse;
    std::size_t count;     // successful replications
    std::size_t failures;
    bool valid;
};

struct MseTable {
    NestedProblem problem;
    double reference;
    std::vector<BenchRow> rows;
    std::vector<SummaryRow> summary;
};

// Validates the config and drops methods the problem cannot run.
// Returns one warning line per dropped method.
inline std::vector<std::string> normalize_config(BenchConfig& config) {
    if (config.m_grid.empty()) fail(Errc::invalid_argument, "m grid is empty");
    for (std::size_t i = 0; i < config.m_grid.size(); ++i) {
        if (config.m_grid[i] < 2) fail(Errc::invalid_argument, "every m must be at least 2");
        if (i > 0 && config.m_grid[i] <= config.m_grid[i - 1])
            fail(Errc::invalid_argument, "m grid must be strictly ascending");
    }
    if (config.replications < 2) fail(Errc::invalid_argument, "need at least 2 replications");
    if (config.methods.empty()) fail(Errc::invalid_argument, "no methods selected");

    const NestedProblem problem = make_problem(config.problem);
    std::vector<std::string> warnings;
    std::vector<Method> kept;
    for (Method m : config.methods) {
        if (std::find(kept.begin(), kept.end(), m) != kept.end()) continue;
        if (m == Method::nmc && !problem.has_conditional) {
            warnings.push_back("warning: dropping nmc for " + std::string(problem.name) +
                               " (no conditional sampler)");
            continue;
        }
        kept.push_back(m);
    }
    if (kept.empty()) fail(Errc::invalid_argument, "no runnable methods left for " + std::string(problem.name));
    config.methods = std::move(kept);
    for (std::size_t m : config.m_grid)
        if (!checked_pow(m, 2 * problem.k_dim)) fail(Errc::invalid_argument, "m^{2K} overflows");
    return warnings;
}

inline std::uint64_t replication_seed(const BenchConfig& c, Method method, std::size_t m, std::size_t rep) {
    return derive_seed({c.base_seed, static_cast<std::uint64_t>(c.problem), static_cast<std::uint64_t>(method), m,
                        rep});
}

namespace detail {

inline std::vector<SummaryRow> summarize(const BenchConfig& c, const std::vector<BenchRow>& rows) {
    std::vector<SummaryRow> out;
    const std::size_t reps = c.replications;
    for (std::size_t cell = 0; cell * reps < rows.size(); ++cell) {
        const BenchRow& head = rows[cell * reps];
        std::vector<double> errs;
        for (std::size_t r = 0; r < reps; ++r)
            if (const auto& e = rows[cell * reps + r].squared_error) errs.push_back(*e);
        SummaryRow s{head.method, head.m, head.n_total, NAN, NAN, errs.size(), reps - errs.size(), false};
        if (!errs.empty()) {
            s.mse = mean(errs);
            double ss = 0.0;
            for (double e : errs) ss += (e - s.mse) * (e - s.mse);
            s.stderr_mse = errs.size() > 1 ? std::sqrt(ss / static_cast<double>(errs.size() - 1) /
                                                       static_cast<double>(errs.size()))
                                           : NAN;
        }
        s.valid = !errs.empty() &&
                  static_cast<double>(s.failures) <= kMaxFailureFraction * static_cast<double>(reps);
        out.push_back(s);
    }
    return out;
}

}  // namespace detail

inline MseTable run_benchmark(BenchConfig config) {
    normalize_config(config);
    const NestedProblem problem = make_problem(config.problem);
    const double reference = reference_value(problem);
    const std::size_t reps = config.replications;

    std::vector<BenchRow> rows;
    for (Method method : config.methods)
        for (std::size_t m : config.m_grid)
            for (std::size_t r = 0; r < reps; ++r)
                rows.push_back({method, m, *checked_pow(m, 2 * problem.k_dim), r, std::nullopt, std::nullopt, ""});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) {
            BenchRow& row = rows[i];
            try {
                const double est =
                    estimate_target(problem, row.method, row.m, replication_seed(config, row.method, row.m, row.replication));
                if (!std::isfinite(est)) fail(Errc::numerical, "non-finite estimate");
                row.estimate = est;
                row.squared_error = (est - reference) * (est - reference);
                row.status = "ok";
            } catch (const Error& e) {
                row.status = e.code() == Errc::domain ? "domain_error" : "numerical_error";
            }
        }
    };

    std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = std::min(threads, rows.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    MseTable table{problem, reference, std::move(rows), {}};
    table.summary = detail::summarize(config, table.rows);
    return table;
}

// OLS slope of log(mse) on log(N) over the valid cells of one method.
inline double fit_loglog_slope(const MseTable& table, Method method) {
    std::vector<double> lx, ly;
    for (const auto& s : table.summary) {
        if (s.method != method || !s.valid || !(s.mse > 0.0)) continue;
        lx.push_back(std::log(static_cast<double>(s.n_total)));
        ly.push_back(std::log(s.mse));
    }
    if (lx.size() < 3)
        fail(Errc::invalid_argument, "slope fit for " + std::string(method_name(method)) + " needs at least 3 valid points, have " +
                                         std::to_string(lx.size()));
    const double mx = mean(lx), my = mean(ly);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------------------
// Output

inline std::string format_raw_csv(const MseTable& t) {
    std::string out = "method,m,n_total,replication,estimate,squared_error,status\n";
    for (const auto& r : t.rows) {
        out += std::string(method_name(r.method)) + ',' + std::to_string(r.m) + ',' + std::to_string(r.n_total) + ',' +
               std::to_string(r.replication) + ',' + (r.estimate ? format_double(*r.estimate) : "") + ',' +
               (r.squared_error ? format_double(*r.squared_error) : "") + ',' + r.status + '\n';
    }
    return out;
}

// Invalid cells report nan for mse and stderr.
inline std::string format_summary_csv(const MseTable& t) {
    std::string out = "method,n_total,mse,stderr,count\n";
    for (const auto& s : t.summary) {
        out += std::string(method_name(s.method)) + ',' + std::to_string(s.n_total) + ',' +
               (s.valid ? format_double(s.mse) : "nan") + ',' +
               (s.valid && std::isfinite(s.stderr_mse) ? format_double(s.stderr_mse) : "nan") + ',' +
               std::to_string(s.count) + '\n';
    }
    return out;
}

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace detail

// Log-log MSE against N, one polyline per method.
inline std::string render_svg(const MseTable& t) {
    constexpr double width = 640, height = 440, left = 70, right = 170, top = 30, bottom = 50;
    constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    std::vector<Method> methods;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : t.summary) {
        if (std::find(methods.begin(), methods.end(), s.method) == methods.end()) methods.push_back(s.method);
        if (!s.valid || !(s.mse > 0.0)) continue;
        const double lx = std::log10(static_cast<double>(s.n_total)), ly = std::log10(s.mse);
        x0 = std::min(x0, lx), x1 = std::max(x1, lx), y0 = std::min(y0, ly), y1 = std::max(y1, ly);
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = -1, y1 = 0;
    x0 = std::floor(x0), x1 = std::max(std::ceil(x1), x0 + 1);
    y0 = std::floor(y0), y1 = std::max(std::ceil(y1), y0 + 1);

    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double lx) { return left + (lx - x0) / (x1 - x0) * pw; };
    auto py = [&](double ly) { return top + (y1 - ly) / (y1 - y0) * ph; };
    using detail::fixed;

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(width, 0) + "\" height=\"" + fixed(height, 0) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"18\" text-anchor=\"middle\">MSE vs total samples: " +
         std::string(t.problem.name) + "</text>\n";
    s += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(pw) + "\" height=\"" + fixed(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double d = x0; d <= x1 + 1e-9; d += 1.0) {
        s += "<line x1=\"" + fixed(px(d)) + "\" y1=\"" + fixed(top) + "\" x2=\"" + fixed(px(d)) + "\" y2=\"" +
             fixed(top + ph) + "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + fixed(px(d)) + "\" y=\"" + fixed(top + ph + 18) + "\" text-anchor=\"middle\">1e" +
             fixed(d, 0) + "</text>\n";
    }
    for (double d = y0; d <= y1 + 1e-9; d += 1.0) {
        s += "<line x1=\"" + fixed(left) + "\" y1=\"" + fixed(py(d)) + "\" x2=\"" + fixed(left + pw) + "\" y2=\"" +
             fixed(py(d)) + "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + fixed(left - 6) + "\" y=\"" + fixed(py(d) + 4) + "\" text-anchor=\"end\">1e" + fixed(d, 0) +
             "</text>\n";
    }
    s += "<text x=\"" + fixed(left + pw / 2) + "\" y=\"" + fixed(height - 10) +
         "\" text-anchor=\"middle\">total samples N</text>\n";
    s += "<text x=\"16\" y=\"" + fixed(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fixed(top + ph / 2) + ")\">MSE</text>\n";

    for (std::size_t i = 0; i < methods.size(); ++i) {
        const char* color = palette[i % std::size(palette)];
        std::string points, markers;
        for (const auto& r : t.summary) {
            if (r.method != methods[i] || !r.valid || !(r.mse > 0.0)) continue;
            const double x = px(std::log10(static_cast<double>(r.n_total))), y = py(std::log10(r.mse));
            points += (points.empty() ? "" : " ") + fixed(x) + "," + fixed(y);
            markers += "<circle cx=\"" + fixed(x) + "\" cy=\"" + fixed(y) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + points +
             "\"/>\n" + markers;
        const double ly = top + 10 + 20.0 * static_cast<double>(i);
        s += "<line x1=\"" + fixed(left + pw + 15) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(left + pw + 40) +
             "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fixed(left + pw + 46) + "\" y=\"" + fixed(ly + 4) + "\">" +
             std::string(method_name(methods[i])) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

inline void emit_outputs(const MseTable& t, const std::string& dir) {
    if (t.rows.empty()) fail(Errc::invalid_argument, "nothing to emit: table is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(Errc::io, "cannot create '" + dir + "': " + ec.message());
    auto put = [&](const char* name, const std::string& text) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        out.flush();
        if (!out) fail(Errc::io, "failed writing '" + path.string() + "'");
    };
    put("raw.csv", format_raw_csv(t));
    put("summary.csv", format_summary_csv(t));
    put("mse.svg", render_svg(t));
}

}  // namespace nestex
