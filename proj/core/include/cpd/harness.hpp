#pragma once

// Experiment drivers: energy-error time series, convergence-order study
// against the adaptive reference, and wall-clock comparison between
// schemes. Each produces a structured record for the serializers.

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"
#include "cpd/reference.hpp"

namespace cpd {

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct TrajectoryRecord {
    SchemeId scheme{};
    double h = 0.0;
    double T_actual = 0.0;
    std::vector<double> times;
    std::vector<ParticleState> states;
    /// ln r for the exponential schemes, s for the baseline.
    std::vector<double> aux;
    /// Physical energy H(x_n, v_n). Recorded for inspection only; the
    /// schemes conserve their modified energy, not H at the numerical
    /// solution, so nothing here may assert conservation of this column.
    std::vector<double> physical_energy;
    /// The scheme's native conserved functional.
    std::vector<double> modified_energy;
    /// |modified - H(x0,v0)| / |H(x0,v0)|.
    std::vector<double> relative_energy_error;
    std::uint64_t negative_r_half = 0;
    /// Non-empty when the run aborted; the record holds the steps
    /// completed before the failure.
    std::string error;
    Metadata metadata;
};

struct ConvergenceReport {
    SchemeId scheme{};
    double t_end = 0.0;
    std::vector<int> k_values;
    std::vector<double> stepsizes;  // h = 2^-k, descending
    std::vector<double> errors;     // relative x error + relative v error
    /// Least-squares slope of log2(error) vs log2(h) over the points more
    /// than 100x above the reference tolerance. NaN when exact_regime.
    double fitted_order = 0.0;
    /// Set when fewer than two points clear the reference-accuracy floor
    /// (the scheme is exact on this problem); no slope is fitted.
    bool exact_regime = false;
    double ref_rtol = 0.0;
    double ref_atol = 0.0;
    Metadata metadata;
};

struct TimingCell {
    SchemeId scheme{};
    double eps = 0.0;
    double h = 0.0;
    std::vector<double> wall_seconds;  // one entry per repetition, warm-up excluded
    double median_seconds = 0.0;
    /// Final states bit-identical across all repetitions.
    bool deterministic = false;
};

struct TimingReport {
    std::array<SchemeId, 2> schemes{};
    std::vector<double> eps_values;
    std::vector<double> stepsizes;
    int repetitions = 0;
    double T = 0.0;
    std::vector<TimingCell> cells;
    Metadata metadata;
};

/// Steps from 0 to T (n = round(T/h) steps, warning on stderr if T/h was
/// not an integer) recording state, auxiliary scalar, physical energy,
/// the scheme's modified energy, and its relative error against
/// H(x0, v0). Stepper errors abort the run; the partial record is
/// returned with the error tag set.
TrajectoryRecord run_energy_experiment(SchemeId id, const FieldModel& model,
                                       const ParticleState& init, double h, double T,
                                       std::optional<double> c0 = std::nullopt);

/// For each h = 2^-k over k_range runs the scheme to t_end and measures
///   |x_n - x(t_end)| / |x(t_end)| + |v_n - v(t_end)| / |v(t_end)|
/// against reference_solve, then fits the order slope.
ConvergenceReport run_convergence_study(SchemeId id, const FieldModel& model,
                                        const ParticleState& init, double t_end,
                                        int k_min, int k_max,
                                        const AdaptiveConfig& ref_cfg = {},
                                        std::optional<double> c0 = std::nullopt);

/// Median wall-clock seconds per (scheme, eps, h) cell over `repetitions`
/// runs of T/h steps, one warm-up run excluded, trajectories re-verified
/// bit-identical across repetitions. model_for_eps builds the field for
/// each swept eps. Cells run sequentially so wall times stay meaningful.
TimingReport run_timing_study(std::array<SchemeId, 2> ids,
                              const std::function<std::unique_ptr<FieldModel>(double)>& model_for_eps,
                              const ParticleState& init, double T,
                              const std::vector<double>& h_values,
                              const std::vector<double>& eps_values, int repetitions,
                              std::optional<double> c0 = std::nullopt);

/// Least-squares slope of log2(err) vs log2(h). Exposed for tests.
double fit_order_slope(const std::vector<double>& stepsizes,
                       const std::vector<double>& errors, double error_floor,
                       bool* exact_regime = nullptr);

}  // namespace cpd
