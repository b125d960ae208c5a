#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nestex/error.hpp"
#include "nestex/numeric.hpp"

namespace nestex {

// The function f applied to an inner (conditional) mean.
class OuterFunction {
public:
    enum class Kind { log, max_coordinate, identity, linear };

    static OuterFunction log() { return OuterFunction(Kind::log, {}); }
    static OuterFunction max_coordinate() { return OuterFunction(Kind::max_coordinate, {}); }
    static OuterFunction identity() { return OuterFunction(Kind::identity, {}); }
    static OuterFunction linear(std::vector<double> weights) {
        if (weights.empty()) fail(Errc::invalid_argument, "linear outer function needs at least one weight");
        return OuterFunction(Kind::linear, std::move(weights));
    }

    // CLI names: log, max, identity.
    static std::optional<OuterFunction> from_name(std::string_view name) {
        if (name == "log") return log();
        if (name == "max") return max_coordinate();
        if (name == "identity") return identity();
        return std::nullopt;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

    [[nodiscard]] std::string_view name() const noexcept {
        switch (kind_) {
            case Kind::log: return "log";
            case Kind::max_coordinate: return "max";
            case Kind::identity: return "identity";
            case Kind::linear: return "linear";
        }
        return "?";
    }

    [[nodiscard]] bool is_linear() const noexcept { return kind_ == Kind::identity || kind_ == Kind::linear; }

    // Throws invalid_argument when f cannot take a J-vector.
    void check_dimension(std::size_t j_dim) const {
        const bool ok = (kind_ == Kind::log || kind_ == Kind::identity) ? j_dim == 1
                        : kind_ == Kind::linear                         ? weights_.size() == j_dim
                                                                        : j_dim >= 1;
        if (!ok)
            fail(Errc::invalid_argument,
                 "outer function '" + std::string(name()) + "' is not defined for J = " + std::to_string(j_dim));
    }

    // Throws domain for log of a nonpositive argument.
    [[nodiscard]] double operator()(std::span<const double> v) const {
        switch (kind_) {
            case Kind::log:
                if (!(v[0] > 0.0)) fail(Errc::domain, "log of nonpositive value " + format_double(v[0]));
                return std::log(v[0]);
            case Kind::max_coordinate: return *std::max_element(v.begin(), v.end());
            case Kind::identity: return v[0];
            case Kind::linear: {
                double s = 0.0;
                for (std::size_t j = 0; j < v.size(); ++j) s += weights_[j] * v[j];
                return s;
            }
        }
        return 0.0;
    }

private:
    OuterFunction(Kind kind, std::vector<double> weights) : kind_(kind), weights_(std::move(weights)) {}

    Kind kind_;
    std::vector<double> weights_;
};

}  // namespace nestex
