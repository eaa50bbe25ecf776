#include "cpd/reference.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace cpd {

namespace {

using State = std::array<double, 6>;  // (x, v) flattened

State pack(const ParticleState& ps) {
    return {ps.x.x, ps.x.y, ps.x.z, ps.v.x, ps.v.y, ps.v.z};
}

ParticleState unpack(const State& y) {
    return {{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
}

State rhs(const FieldModel& model, const State& y) {
    const ParticleState ps = unpack(y);
    const Vec3 acc = cross(ps.v, model.magnetic(ps.x)) + model.electric(ps.x);
    return {ps.v.x, ps.v.y, ps.v.z, acc.x, acc.y, acc.z};
}

// Dormand-Prince 5(4), 7 stages, FSAL.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// Dense-output weights (the method's standard continuous extension).
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

// PI controller (safety 0.9, step-ratio clamp [0.2, 5.0]).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kMaxGrowth = 5.0;
constexpr double kMinShrink = 0.2;

/// Interpolation coefficients for one accepted step; evaluation error is
/// of the same order as the step itself.
struct DenseStep {
    State r1, r2, r3, r4, r5;

    static DenseStep build(const State& y0, const State& y1, double h, const State& k1,
                           const State& k3, const State& k4, const State& k5,
                           const State& k6, const State& k7) {
        DenseStep d;
        for (int i = 0; i < 6; ++i) {
            const double dy = y1[i] - y0[i];
            const double bspl = h * k1[i] - dy;
            d.r1[i] = y0[i];
            d.r2[i] = dy;
            d.r3[i] = bspl;
            d.r4[i] = dy - h * k7[i] - bspl;
            d.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                           d6 * k6[i] + d7 * k7[i]);
        }
        return d;
    }

    State eval(double sigma) const {
        const double s1 = 1.0 - sigma;
        State out;
        for (int i = 0; i < 6; ++i) {
            out[i] = r1[i] + sigma * (r2[i] + s1 * (r3[i] + sigma * (r4[i] + s1 * r5[i])));
        }
        return out;
    }
};

}  // namespace

ReferenceSolution reference_solve(const FieldModel& model, const ParticleState& init,
                                  double t_end, const AdaptiveConfig& cfg,
                                  const std::vector<double>& sample_times) {
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0)) {
        throw InitError("reference solve requires rtol, atol > 0");
    }
    if (!(cfg.h_min < cfg.h_init)) {
        throw InitError("reference solve requires h_min < h_init");
    }
    if (!(t_end > 0.0)) {
        throw InitError("reference solve requires t_end > 0");
    }

    ReferenceSolution sol;
    sol.samples.resize(sample_times.size());
    // Sample indices sorted by time so each accepted step flushes in order.
    std::vector<std::size_t> order(sample_times.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return sample_times[a] < sample_times[b]; });
    std::size_t next_sample = 0;
    auto flush_samples = [&](double t0, double h, const DenseStep& dense) {
        while (next_sample < order.size() && sample_times[order[next_sample]] <= t0 + h) {
            const double ts = sample_times[order[next_sample]];
            const double sigma = std::clamp((ts - t0) / h, 0.0, 1.0);
            sol.samples[order[next_sample]] = unpack(dense.eval(sigma));
            ++next_sample;
        }
    };

    State y = pack(init);
    State k1 = rhs(model, y);
    while (next_sample < order.size() && sample_times[order[next_sample]] <= 0.0) {
        sol.samples[order[next_sample]] = unpack(y);
        ++next_sample;
    }

    double t = 0.0;
    double h = std::min(cfg.h_init, t_end);
    double err_old = 1e-4;
    long steps = 0;

    while (t < t_end) {
        if (++steps > cfg.max_steps) {
            throw MaxStepsExceeded("reference solve exceeded " +
                                   std::to_string(cfg.max_steps) + " steps");
        }
        const bool clamped = t + h >= t_end;
        if (clamped) h = t_end - t;

        State yt, k2, k3, k4, k5, k6, k7, y_new;
        for (int i = 0; i < 6; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(model, yt);
        for (int i = 0; i < 6; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(model, yt);
        for (int i = 0; i < 6; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(model, yt);
        for (int i = 0; i < 6; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(model, yt);
        for (int i = 0; i < 6; ++i)
            yt[i] = y[i] +
                    h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(model, yt);
        for (int i = 0; i < 6; ++i)
            y_new[i] = y[i] +
                       h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(model, y_new);  // FSAL

        double err_sq = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double est = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double sk = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err_sq += (est / sk) * (est / sk);
        }
        const double err = std::sqrt(err_sq / 6.0);

        if (!std::isfinite(err)) {
            // Overflowed error estimate: treat as a hard rejection.
            ++sol.rejected_steps;
            h *= kMinShrink;
        } else if (err <= 1.0) {
            if (next_sample < order.size()) {
                flush_samples(t, h, DenseStep::build(y, y_new, h, k1, k3, k4, k5, k6, k7));
            }
            t = clamped ? t_end : t + h;
            y = y_new;
            k1 = k7;
            ++sol.accepted_steps;
            const double fac =
                kSafety * std::pow(err_old, kBeta) / std::pow(std::max(err, 1e-16), kExpo);
            h *= std::clamp(fac, kMinShrink, kMaxGrowth);
            err_old = std::max(err, 1e-4);
        } else {
            ++sol.rejected_steps;
            const double fac = kSafety / std::pow(err, 0.2);
            h *= std::clamp(fac, kMinShrink, 1.0);
        }
        if (h < cfg.h_min && t < t_end) {
            throw StepSizeUnderflow("reference step fell below h_min = " +
                                    std::to_string(cfg.h_min));
        }
    }

    // t_end is an upper bound for every requested time <= t_end; anything
    // later is clamped to the final state.
    while (next_sample < order.size()) {
        sol.samples[order[next_sample]] = unpack(y);
        ++next_sample;
    }
    sol.final_state = unpack(y);
    return sol;
}

}  // namespace cpd
