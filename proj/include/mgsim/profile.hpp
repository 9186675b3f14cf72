#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mgsim {

enum class SegmentKind { Step, Ramp, Hold };

/// A segment applies from t_start until the next segment starts. Step and
/// hold sit at `level`; a ramp moves linearly from the value in force at
/// t_start to `level`, reached at the next segment's start.
struct Segment {
    double t_start = 0.0;
    SegmentKind kind = SegmentKind::Step;
    double level = 0.0;  // W

    friend bool operator==(const Segment&, const Segment&) = default;
};

struct LoadProfile {
    std::vector<Segment> segments;

    friend bool operator==(const LoadProfile&, const LoadProfile&) = default;
};

/// Demand at t. Zero before the first segment; left-closed at every boundary.
[[nodiscard]] double profile_eval(const LoadProfile& profile, double t) noexcept;

/// Empty string when valid: times strictly increasing and non-negative,
/// levels non-negative, no trailing ramp.
[[nodiscard]] std::string check_profile(const LoadProfile& profile);

[[nodiscard]] std::string_view to_string(SegmentKind kind) noexcept;

}  // namespace mgsim
