#pragma once

// High-accuracy reference trajectories: an embedded Dormand-Prince 5(4)
// integrator with PI step-size control for the first-order system
// xdot = v, vdot = v x B(x) + E(x). This is the accuracy oracle the
// convergence harness measures against; it is not a conservative method.

#include <vector>

#include "cpd/errors.hpp"
#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"

namespace cpd {

struct AdaptiveConfig {
    double rtol = 1e-12;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    long max_steps = 10'000'000;
};

struct ReferenceSolution {
    ParticleState final_state;
    /// States interpolated at the requested sample times via the method's
    /// continuous extension, same order as the request.
    std::vector<ParticleState> samples;
    long accepted_steps = 0;
    long rejected_steps = 0;
};

/// Integrates from t = 0 to t_end with local error per step bounded by
/// atol + rtol * |state|. Throws StepSizeUnderflow when the controller
/// drives h below cfg.h_min, MaxStepsExceeded past cfg.max_steps, and
/// propagates DomainError from the field.
ReferenceSolution reference_solve(const FieldModel& model, const ParticleState& init,
                                  double t_end, const AdaptiveConfig& cfg = {},
                                  const std::vector<double>& sample_times = {});

}  // namespace cpd
