#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace geoprox {

// Default absolute tolerance used throughout; overridable per call.
inline constexpr double kTol = 1e-9;
// Grid used to deduplicate hull samples.
inline constexpr double kDedupGrid = 1e-9;
// Two points closer than this are considered duplicates in a FiniteSet.
inline constexpr double kDupTol = 1e-12;
// Hull iteration refuses to produce more samples than this by default.
inline constexpr std::size_t kDefaultPointCap = 20000;

// Raised when a caller violates an operation's contract (mismatched spaces,
// empty sets, infeasible triangles, ...). The CLI maps it to exit code 2.
class usage_error : public std::runtime_error {
public:
    explicit usage_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a scenario file does not match the schema. Exit code 1.
class schema_error : public std::runtime_error {
public:
    explicit schema_error(const std::string& what) : std::runtime_error(what) {}
};

// Raised when rejection sampling starves or a sampled set comes out empty.
class sampling_error : public std::runtime_error {
public:
    explicit sampling_error(const std::string& what) : std::runtime_error(what) {}
};

// Counter of arccosh/arccos argument clamps that exceeded 1e-12.
inline std::atomic<std::uint64_t>& clamp_event_count() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

inline double clamp_at_least(double value, double floor_value) {
    if (value < floor_value) {
        if (floor_value - value > 1e-12) ++clamp_event_count();
        return floor_value;
    }
    return value;
}

inline double clamp_unit_interval(double value) {
    if (value > 1.0) {
        if (value - 1.0 > 1e-12) ++clamp_event_count();
        return 1.0;
    }
    if (value < -1.0) {
        if (-1.0 - value > 1e-12) ++clamp_event_count();
        return -1.0;
    }
    return value;
}

// acosh(1 + e) evaluated without cancellation for small e >= 0.
inline double acosh1p(double e) {
    if (e <= 0.0) return 0.0;
    return std::log1p(e + std::sqrt(e * (e + 2.0)));
}

}  // namespace geoprox
