#pragma once

#include <string>
#include <vector>

#include "leray/errors.hpp"
#include "leray/field.hpp"

namespace leray {

/// Time-ordered sequence of snapshots from one flow, all on one grid.
/// `steps` counts integrator steps taken to produce it (0 for analytic or
/// assembled timelines); validators use it to budget round-off slack.
struct Timeline {
    std::vector<Snapshot> snapshots;
    FlowParams params;
    long steps = 0;

    const Grid& grid() const {
        if (snapshots.empty()) throw ValidationError("timeline has no snapshots");
        return snapshots.front().grid();
    }
};

/// Strictly increasing times, one shared grid.
inline void validate_timeline(const Timeline& tl) {
    if (tl.snapshots.empty()) throw ValidationError("timeline has no snapshots");
    const Grid& g = tl.snapshots.front().grid();
    for (size_t k = 0; k < tl.snapshots.size(); ++k) {
        if (tl.snapshots[k].grid() != g)
            throw ShapeError("timeline snapshot " + std::to_string(k) +
                             " lives on a different grid");
        if (k > 0 && !(tl.snapshots[k].time > tl.snapshots[k - 1].time))
            throw ValidationError("timeline times are not strictly increasing at index " +
                                  std::to_string(k));
    }
}

} // namespace leray
