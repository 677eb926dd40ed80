#pragma once

#include <stdexcept>

namespace twinqft {

// Boosted mode energy inside the degeneracy band: no rest frame exists for
// the label, so neither branch of the reinterpretation applies.
struct DegenerateBoost : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operation would push a state past the configured particle-number cap.
struct TruncationOverflow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mode label does not fit the periodic box it is being summed over.
struct IncommensurateMode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Quadrature or extrapolation failed to meet the requested tolerance.
struct NonConvergent : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation requested on the contact singularity.
struct SingularPoint : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Process leg four-momentum fails its mass-shell test.
struct OffShellLeg : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace twinqft
