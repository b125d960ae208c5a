#pragma once

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <system_error>

namespace nestex {

// Pairwise summation. Fixed recursion shape, so the result depends only on
// the order of the input, never on how work was scheduled.
inline double pairwise_sum(std::span<const double> v) noexcept {
    constexpr std::size_t kBlock = 32;
    if (v.size() <= kBlock) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double mean(std::span<const double> v) noexcept {
    return v.empty() ? 0.0 : pairwise_sum(v) / static_cast<double>(v.size());
}

// base^exp, or nullopt on size_t overflow.
inline std::optional<std::size_t> checked_pow(std::size_t base, std::size_t exp) noexcept {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > std::numeric_limits<std::size_t>::max() / base) return std::nullopt;
        r *= base;
    }
    return r;
}

// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a tuple of identifiers.
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> parts) noexcept {
    std::uint64_t h = 0x6a09e667f3bcc908ULL;
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p));
    return h;
}

}  // namespace nestex
