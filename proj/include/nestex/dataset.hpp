#pragma once

// Joint samples of (X, Y) and the CSV format used to exchange them.
//
// CSV layout: a header `x1,...,xJ,y1,...,yK` followed by one row per sample.
// Comma separated, no quoting, LF line endings (a trailing newline is
// optional). Row order is significant: stratification breaks ties by
// position, so reordering rows can change estimates when Y has ties.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nestex/error.hpp"
#include "nestex/numeric.hpp"

namespace nestex {

struct JointSample {
    std::vector<double> x;  // inner variable, length J
    std::vector<double> y;  // outer variable, length K

    friend bool operator==(const JointSample&, const JointSample&) = default;
};

// N paired samples stored row-major. Immutable once built.
class Dataset {
public:
    Dataset(std::size_t j_dim, std::size_t k_dim, std::vector<double> xs, std::vector<double> ys)
        : j_dim_(j_dim), k_dim_(k_dim), xs_(std::move(xs)), ys_(std::move(ys)) {
        if (j_dim_ == 0 || k_dim_ == 0) fail(Errc::format, "dataset needs J >= 1 and K >= 1");
        if (xs_.size() % j_dim_ != 0 || ys_.size() % k_dim_ != 0 ||
            xs_.size() / j_dim_ != ys_.size() / k_dim_)
            fail(Errc::format, "x and y storage disagree on the sample count");
        if (xs_.empty()) fail(Errc::format, "dataset must contain at least one sample");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(xs_.begin(), xs_.end(), finite) || !std::all_of(ys_.begin(), ys_.end(), finite))
            fail(Errc::parse, "dataset contains a non-finite value");
    }

    static Dataset from_samples(std::span<const JointSample> samples) {
        if (samples.empty()) fail(Errc::format, "dataset must contain at least one sample");
        const std::size_t j = samples.front().x.size();
        const std::size_t k = samples.front().y.size();
        std::vector<double> xs, ys;
        xs.reserve(samples.size() * j);
        ys.reserve(samples.size() * k);
        for (const auto& s : samples) {
            if (s.x.size() != j || s.y.size() != k) fail(Errc::format, "samples have inconsistent dimensions");
            xs.insert(xs.end(), s.x.begin(), s.x.end());
            ys.insert(ys.end(), s.y.begin(), s.y.end());
        }
        return Dataset(j, k, std::move(xs), std::move(ys));
    }

    [[nodiscard]] std::size_t size() const noexcept { return xs_.size() / j_dim_; }
    [[nodiscard]] std::size_t j_dim() const noexcept { return j_dim_; }
    [[nodiscard]] std::size_t k_dim() const noexcept { return k_dim_; }

    [[nodiscard]] std::span<const double> x(std::size_t n) const noexcept {
        return std::span<const double>(xs_).subspan(n * j_dim_, j_dim_);
    }
    [[nodiscard]] std::span<const double> y(std::size_t n) const noexcept {
        return std::span<const double>(ys_).subspan(n * k_dim_, k_dim_);
    }
    [[nodiscard]] double x(std::size_t n, std::size_t j) const noexcept { return xs_[n * j_dim_ + j]; }
    [[nodiscard]] double y(std::size_t n, std::size_t k) const noexcept { return ys_[n * k_dim_ + k]; }

    [[nodiscard]] JointSample sample(std::size_t n) const {
        auto xv = x(n);
        auto yv = y(n);
        return {{xv.begin(), xv.end()}, {yv.begin(), yv.end()}};
    }

    // Column j of X, in row order.
    [[nodiscard]] std::vector<double> x_column(std::size_t j) const {
        std::vector<double> col(size());
        for (std::size_t n = 0; n < col.size(); ++n) col[n] = x(n, j);
        return col;
    }

    [[nodiscard]] std::vector<double> x_grand_mean() const {
        std::vector<double> out(j_dim_);
        for (std::size_t j = 0; j < j_dim_; ++j) out[j] = mean(x_column(j));
        return out;
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::size_t j_dim_;
    std::size_t k_dim_;
    std::vector<double> xs_;
    std::vector<double> ys_;
};

// Requires N == m^{2K}.
inline void check_stratifiable(const Dataset& d, std::size_t m) {
    if (m < 2) fail(Errc::invalid_argument, "m must be at least 2, got " + std::to_string(m));
    const auto required = checked_pow(m, 2 * d.k_dim());
    if (!required || *required != d.size()) {
        fail(Errc::size_mismatch,
             "N must equal m^" + std::to_string(2 * d.k_dim()) + ": N = " + std::to_string(d.size()) +
                 ", m^" + std::to_string(2 * d.k_dim()) + " = " +
                 (required ? std::to_string(*required) : std::string("overflow")));
    }
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

// Parses a column label like "x12" into 12; returns 0 on mismatch.
inline std::size_t label_index(std::string_view cell, char prefix) {
    if (cell.size() < 2 || cell[0] != prefix) return 0;
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(cell.data() + 1, cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell[1] == '0') return 0;
    return v;
}

}  // namespace detail

inline Dataset parse_csv(std::string_view text) {
    std::vector<std::string_view> lines = detail::split(text, '\n');
    if (!lines.empty() && lines.back().empty()) lines.pop_back();  // trailing newline
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (lines.empty()) fail(Errc::format, "missing header row");

    const auto header = detail::split(lines.front(), ',');
    std::size_t j_dim = 0;
    while (j_dim < header.size() && detail::label_index(header[j_dim], 'x') == j_dim + 1) ++j_dim;
    std::size_t k_dim = 0;
    while (j_dim + k_dim < header.size() && detail::label_index(header[j_dim + k_dim], 'y') == k_dim + 1) ++k_dim;
    if (j_dim == 0 || k_dim == 0 || j_dim + k_dim != header.size())
        fail(Errc::format, "header must be x1..xJ,y1..yK with J, K >= 1, got '" + std::string(lines.front()) + "'");

    const std::size_t width = j_dim + k_dim;
    std::vector<double> xs, ys;
    xs.reserve((lines.size() - 1) * j_dim);
    ys.reserve((lines.size() - 1) * k_dim);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split(lines[r], ',');
        if (cells.size() != width)
            fail(Errc::format, "row " + std::to_string(r) + " has " + std::to_string(cells.size()) +
                                   " cells, expected " + std::to_string(width));
        for (std::size_t c = 0; c < width; ++c) {
            const auto cell = cells[c];
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v))
                fail(Errc::parse, "row " + std::to_string(r) + ", column " + std::string(header[c]) +
                                      ": cannot parse '" + std::string(cell) + "' as a finite real");
            (c < j_dim ? xs : ys).push_back(v);
        }
    }
    if (xs.empty()) fail(Errc::format, "file has a header but no samples");
    return Dataset(j_dim, k_dim, std::move(xs), std::move(ys));
}

inline std::string format_csv(const Dataset& d) {
    std::string out;
    for (std::size_t j = 1; j <= d.j_dim(); ++j) out += (j > 1 ? ",x" : "x") + std::to_string(j);
    for (std::size_t k = 1; k <= d.k_dim(); ++k) out += ",y" + std::to_string(k);
    out += '\n';
    for (std::size_t n = 0; n < d.size(); ++n) {
        bool first = true;
        auto put = [&](double v) {
            if (!first) out += ',';
            first = false;
            out += format_double(v);
        };
        for (double v : d.x(n)) put(v);
        for (double v : d.y(n)) put(v);
        out += '\n';
    }
    return out;
}

inline Dataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Errc::io, "cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

inline void write_csv(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot open '" + path + "' for writing");
    const std::string text = format_csv(d);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) fail(Errc::io, "failed writing '" + path + "'");
}

}  // namespace nestex
