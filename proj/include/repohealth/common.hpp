#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace repohealth {

// All windowing is calendar-agnostic: a week is 7 days, a month 30 days,
// a year 365 days, a day 86400 seconds.
inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;
inline constexpr std::int64_t kSecondsPerMonth = 30 * kSecondsPerDay;
inline constexpr std::int64_t kSecondsPerYear = 365 * kSecondsPerDay;

struct RepoHealthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tally of records that were present in an input but could not be loaded.
// Loaders guarantee: records_seen - records_loaded == count.
struct WarningTally {
    std::size_t count = 0;
    std::vector<std::string> messages;

    void add(std::string msg) {
        ++count;
        messages.push_back(std::move(msg));
    }
    void merge(const WarningTally& other) {
        count += other.count;
        messages.insert(messages.end(), other.messages.begin(), other.messages.end());
    }
};

inline std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        auto next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            parts.emplace_back(s.substr(pos));
            break;
        }
        parts.emplace_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return parts;
}

// Shortest round-trip decimal form. Integral values render without a
// fractional part ("33", not "33.0"), which keeps count-valued fields exact.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline bool parse_i64(std::string_view s, std::int64_t& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

}  // namespace detail

// SplitMix64; used to derive independent sub-seeds from (seed, label) pairs
// so that worker scheduling can never influence any sampled value.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = mix64(seed);
    for (char c : label) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return h;
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t v) {
    return mix64(mix64(seed) ^ v);
}

}  // namespace repohealth
