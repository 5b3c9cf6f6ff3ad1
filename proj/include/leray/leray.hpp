#pragma once

// Umbrella header for the full toolkit.

#include "leray/csv.hpp"         // IWYU pragma: export
#include "leray/diagnostics.hpp" // IWYU pragma: export
#include "leray/errors.hpp"      // IWYU pragma: export
#include "leray/fft.hpp"         // IWYU pragma: export
#include "leray/field.hpp"       // IWYU pragma: export
#include "leray/grid.hpp"        // IWYU pragma: export
#include "leray/initial.hpp"     // IWYU pragma: export
#include "leray/manifest.hpp"    // IWYU pragma: export
#include "leray/rng.hpp"         // IWYU pragma: export
#include "leray/scaling.hpp"     // IWYU pragma: export
#include "leray/snapshot_io.hpp" // IWYU pragma: export
#include "leray/solver.hpp"      // IWYU pragma: export
#include "leray/spectral.hpp"    // IWYU pragma: export
#include "leray/svg.hpp"         // IWYU pragma: export
#include "leray/timeline.hpp"    // IWYU pragma: export
#include "leray/version.hpp"     // IWYU pragma: export
