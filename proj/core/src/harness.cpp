#include "cpd/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cpd {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Metadata base_metadata(SchemeId id, const FieldModel& model, const ParticleState& init,
                       std::optional<double> c0) {
    Metadata md;
    md.emplace_back("scheme", scheme_name(id));
    md.emplace_back("field", model.name());
    for (const auto& [key, value] : model.params()) {
        md.emplace_back(key, format_double(value));
    }
    md.emplace_back("x0", format_double(init.x.x) + "," + format_double(init.x.y) + "," +
                              format_double(init.x.z));
    md.emplace_back("v0", format_double(init.v.x) + "," + format_double(init.v.y) + "," +
                              format_double(init.v.z));
    if (c0.has_value()) {
        md.emplace_back("c0", format_double(*c0));
    }
    return md;
}

long rounded_step_count(double T, double h) {
    if (!(h > 0.0) || !(T > 0.0) || !std::isfinite(T / h)) {
        throw UsageError("requires finite T > 0 and h > 0 with T/h finite");
    }
    const double ratio = T / h;
    const long n = std::lround(ratio);
    if (std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
        std::fprintf(stderr, "warning: T/h = %.17g is not an integer; using %ld steps\n",
                     ratio, n);
    }
    return std::max(n, 1L);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TrajectoryRecord run_energy_experiment(SchemeId id, const FieldModel& model,
                                       const ParticleState& init, double h, double T,
                                       std::optional<double> c0) {
    TrajectoryRecord rec;
    rec.scheme = id;
    rec.h = h;
    const long n_steps = rounded_step_count(T, h);
    rec.T_actual = static_cast<double>(n_steps) * h;
    rec.metadata = base_metadata(id, model, init, c0);
    rec.metadata.emplace_back("h", format_double(h));
    rec.metadata.emplace_back("T", format_double(rec.T_actual));
    rec.metadata.emplace_back("n_steps", std::to_string(n_steps));

    const double h0 = energy_H(init, model);
    const double denom = std::abs(h0) > 0.0 ? std::abs(h0) : 1.0;

    try {
        Stepper stepper(id, model, init, c0);
        rec.metadata.emplace_back("aux_constant", format_double(stepper.aux_constant()));
        auto record_row = [&](long i) {
            rec.times.push_back(static_cast<double>(i) * h);
            rec.states.push_back(stepper.particle());
            rec.aux.push_back(stepper.aux());
            rec.physical_energy.push_back(energy_H(stepper.particle(), model));
            const double mod = stepper.modified_energy();
            rec.modified_energy.push_back(mod);
            rec.relative_energy_error.push_back(std::abs(mod - h0) / denom);
        };
        record_row(0);
        for (long i = 1; i <= n_steps; ++i) {
            stepper.advance(h);
            record_row(i);
        }
        rec.negative_r_half = stepper.negative_r_half_count();
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

double fit_order_slope(const std::vector<double>& stepsizes,
                       const std::vector<double>& errors, double error_floor,
                       bool* exact_regime) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < stepsizes.size(); ++i) {
        if (errors[i] > error_floor && std::isfinite(errors[i])) {
            xs.push_back(std::log2(stepsizes[i]));
            ys.push_back(std::log2(errors[i]));
        }
    }
    if (xs.size() < 2) {
        if (exact_regime != nullptr) *exact_regime = true;
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (exact_regime != nullptr) *exact_regime = false;
    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport run_convergence_study(SchemeId id, const FieldModel& model,
                                        const ParticleState& init, double t_end,
                                        int k_min, int k_max,
                                        const AdaptiveConfig& ref_cfg,
                                        std::optional<double> c0) {
    if (k_min > k_max) {
        throw UsageError("convergence study requires k_min <= k_max");
    }
    ConvergenceReport rep;
    rep.scheme = id;
    rep.t_end = t_end;
    rep.ref_rtol = ref_cfg.rtol;
    rep.ref_atol = ref_cfg.atol;
    rep.metadata = base_metadata(id, model, init, c0);
    rep.metadata.emplace_back("t_end", format_double(t_end));
    rep.metadata.emplace_back("ref_rtol", format_double(ref_cfg.rtol));
    rep.metadata.emplace_back("ref_atol", format_double(ref_cfg.atol));

    const ParticleState ref = reference_solve(model, init, t_end, ref_cfg).final_state;
    const double xr = norm(ref.x);
    const double vr = norm(ref.v);

    for (int k = k_min; k <= k_max; ++k) {
        const double h = std::ldexp(1.0, -k);
        const long n_steps = rounded_step_count(t_end, h);
        Stepper stepper(id, model, init, c0);
        for (long i = 0; i < n_steps; ++i) {
            stepper.advance(h);
        }
        const ParticleState end = stepper.particle();
        const double err = norm(end.x - ref.x) / (xr > 0.0 ? xr : 1.0) +
                           norm(end.v - ref.v) / (vr > 0.0 ? vr : 1.0);
        rep.k_values.push_back(k);
        rep.stepsizes.push_back(h);
        rep.errors.push_back(err);
    }

    // Points within 100x of the oracle's own accuracy would flatten the fit.
    const double floor = 100.0 * std::max(ref_cfg.rtol, ref_cfg.atol);
    rep.fitted_order = fit_order_slope(rep.stepsizes, rep.errors, floor, &rep.exact_regime);
    return rep;
}

TimingReport run_timing_study(std::array<SchemeId, 2> ids,
                              const std::function<std::unique_ptr<FieldModel>(double)>& model_for_eps,
                              const ParticleState& init, double T,
                              const std::vector<double>& h_values,
                              const std::vector<double>& eps_values, int repetitions,
                              std::optional<double> c0) {
    if (repetitions < 3) {
        throw UsageError("timing study requires at least 3 repetitions");
    }
    if (h_values.empty() || eps_values.empty()) {
        throw UsageError("timing study requires at least one h and one eps value");
    }
    TimingReport rep;
    rep.schemes = ids;
    rep.eps_values = eps_values;
    rep.stepsizes = h_values;
    rep.repetitions = repetitions;
    rep.T = T;
    rep.metadata.emplace_back("schemes", scheme_name(ids[0]) + "," + scheme_name(ids[1]));
    rep.metadata.emplace_back("field", model_for_eps(eps_values.empty() ? 1.0 : eps_values[0])->name());
    rep.metadata.emplace_back("x0", format_double(init.x.x) + "," + format_double(init.x.y) +
                                        "," + format_double(init.x.z));
    rep.metadata.emplace_back("v0", format_double(init.v.x) + "," + format_double(init.v.y) +
                                        "," + format_double(init.v.z));
    if (c0.has_value()) {
        rep.metadata.emplace_back("c0", format_double(*c0));
    }
    rep.metadata.emplace_back("T", format_double(T));
    rep.metadata.emplace_back("repetitions", std::to_string(repetitions));

    using clock = std::chrono::steady_clock;
    for (const double eps : eps_values) {
        const std::unique_ptr<FieldModel> model = model_for_eps(eps);
        for (const double h : h_values) {
            const long n_steps = rounded_step_count(T, h);
            std::array<TimingCell, 2> pair_cells;
            std::array<ParticleState, 2> warm_final{};
            std::array<double, 2> warm_aux{};
            auto run_once = [&](int slot) {
                Stepper stepper(ids[slot], *model, init, c0);
                const auto t0 = clock::now();
                for (long i = 0; i < n_steps; ++i) {
                    stepper.advance(h);
                }
                const auto t1 = clock::now();
                pair_cells[slot].wall_seconds.push_back(
                    std::chrono::duration<double>(t1 - t0).count());
                if (!(stepper.particle() == warm_final[slot]) ||
                    stepper.aux() != warm_aux[slot]) {
                    pair_cells[slot].deterministic = false;
                }
            };
            for (int slot = 0; slot < 2; ++slot) {
                pair_cells[slot].scheme = ids[slot];
                pair_cells[slot].eps = eps;
                pair_cells[slot].h = h;
                pair_cells[slot].deterministic = true;
                // Warm-up run, excluded from the samples.
                Stepper stepper(ids[slot], *model, init, c0);
                for (long i = 0; i < n_steps; ++i) {
                    stepper.advance(h);
                }
                warm_final[slot] = stepper.particle();
                warm_aux[slot] = stepper.aux();
            }
            // Repetitions interleave the two schemes, alternating which
            // goes first, so load drift and any periodic interference hit
            // both samples alike.
            for (int rep_i = 0; rep_i < repetitions; ++rep_i) {
                run_once(rep_i % 2);
                run_once(1 - rep_i % 2);
            }
            for (int slot = 0; slot < 2; ++slot) {
                pair_cells[slot].median_seconds = median(pair_cells[slot].wall_seconds);
                rep.cells.push_back(std::move(pair_cells[slot]));
            }
        }
    }
    return rep;
}

}  // namespace cpd
