#include "mgsim/profile.hpp"

#include "mgsim/text.hpp"

#include <cmath>

namespace mgsim {

std::string_view to_string(SegmentKind kind) noexcept {
    switch (kind) {
        case SegmentKind::Step: return "step";
        case SegmentKind::Ramp: return "ramp";
        case SegmentKind::Hold: return "hold";
    }
    return "?";
}

double profile_eval(const LoadProfile& profile, double t) noexcept {
    const auto& segs = profile.segments;
    double value = 0.0;  // value in force before segment k
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const auto& seg = segs[k];
        if (t < seg.t_start) {
            return value;
        }
        const bool last = k + 1 == segs.size();
        if (seg.kind == SegmentKind::Ramp && !last) {
            const double t_end = segs[k + 1].t_start;
            if (t < t_end) {
                return value + (seg.level - value) * (t - seg.t_start) / (t_end - seg.t_start);
            }
        }
        value = seg.level;
    }
    return value;
}

std::string check_profile(const LoadProfile& profile) {
    const auto& segs = profile.segments;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        const auto& seg = segs[k];
        if (!std::isfinite(seg.t_start) || seg.t_start < 0.0) {
            return "segment start times must be non-negative";
        }
        if (!(seg.level >= 0.0)) {
            return "load levels must be non-negative (got " + text::format_double(seg.level) + ")";
        }
        if (k > 0 && !(seg.t_start > segs[k - 1].t_start)) {
            return "segments must be strictly time-ordered";
        }
    }
    if (!segs.empty() && segs.back().kind == SegmentKind::Ramp) {
        return "a ramp needs a following segment to mark its end";
    }
    return {};
}

}  // namespace mgsim
