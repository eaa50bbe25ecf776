#include "cpd/checks.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"

namespace cpd {

namespace {

std::string describe(double worst, double bound) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "worst %.3e (bound %.3e)", worst, bound);
    return buf;
}

CheckResult bounded(const std::string& name, double worst, double bound) {
    return {name, worst <= bound, describe(worst, bound)};
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    return v / norm(v);
}

// Off-axis sample point with cylindrical radius in [0.5, 2].
Vec3 random_off_axis(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> radius(0.5, 2.0);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    std::uniform_real_distribution<double> height(-1.0, 1.0);
    const double rho = radius(rng);
    const double phi = angle(rng);
    return {rho * std::cos(phi), rho * std::sin(phi), height(rng)};
}

CheckResult check_gradients() {
    std::mt19937_64 rng(12345);
    double worst = 0.0;

    std::vector<Vec3> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(random_off_axis(rng));
    worst = std::max(worst,
                     check_gradient_consistency(ExperimentField(1.0), pts, 1e-5).max_rel_deviation);

    pts.clear();
    for (int i = 0; i < 20; ++i) pts.push_back(random_unit(rng));
    worst = std::max(worst,
                     check_gradient_consistency(HarmonicField(), pts, 1e-5).max_rel_deviation);
    worst = std::max(worst,
                     check_gradient_consistency(ZeroField(), pts, 1e-5).max_rel_deviation);

    return bounded("gradient-consistency", worst, 1e-6);
}

CheckResult check_rotation() {
    std::mt19937_64 rng(2468);
    std::uniform_real_distribution<double> tdist(-10.0, 10.0);
    std::uniform_real_distribution<double> mag(0.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Vec3 b = mag(rng) * random_unit(rng);
        const Vec3 v = mag(rng) * random_unit(rng);
        const double t = tdist(rng);
        const double n0 = norm(v);
        const double n1 = norm(rot_exp_apply(b, t, v));
        worst = std::max(worst, std::abs(n1 - n0) / std::max(1.0, n0));
    }
    return bounded("rotation-orthogonality", worst, 1e-14);
}

EsavState random_esav(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> vel(-1.0, 1.0);
    std::uniform_real_distribution<double> lr(-1.0, 1.0);
    return {{random_off_axis(rng), {vel(rng), vel(rng), vel(rng)}}, lr(rng)};
}

CheckResult check_energy_identity() {
    std::mt19937_64 rng(97531);
    std::uniform_real_distribution<double> hdist(1e-4, 0.1);
    std::uniform_real_distribution<double> sdist(0.5, 1.5);
    const ExperimentField field(1.0);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const EsavState es = random_esav(rng);
        const double h = hdist(rng);

        const double h1 = energy_hat(es);
        worst = std::max(worst, std::abs(energy_hat(step_s1_esav(es, field, h)) - h1) /
                                    std::max(1.0, std::abs(h1)));
        worst = std::max(worst, std::abs(energy_hat(step_s2_esav(es, field, h)) - h1) /
                                    std::max(1.0, std::abs(h1)));

        const MesavConstant c{sdist(rng)};
        const double hc = energy_hat_C(es, c);
        worst = std::max(worst,
                         std::abs(energy_hat_C(step_mesav(es, field, h, c, 1), c) - hc) /
                             std::max(1.0, std::abs(hc)));

        const SavState ss{es.state, sdist(rng), 1.0};
        const double ht = energy_tilde(ss);
        worst = std::max(worst, std::abs(energy_tilde(step_s1_sav(ss, field, h)) - ht) /
                                    std::max(1.0, std::abs(ht)));
    }
    return bounded("per-step-modified-energy", worst, 1e-13);
}

// Fixed-point iteration of the coupled baseline update, for comparison
// with the closed-form elimination.
double sav_fixed_point(const SavState& ss, const FieldModel& model, double h, int iters) {
    const Vec3 w = rot_exp_apply(model.magnetic(ss.state.x), h, ss.state.v);
    const Vec3 x_mid = ss.state.x + (0.5 * h) * w;
    const Vec3 a = model.electric(x_mid) / (2.0 * std::sqrt(model.potential(x_mid) + ss.c0));
    double s_new = ss.s;
    for (int i = 0; i < iters; ++i) {
        const double s_mid = 0.5 * (s_new + ss.s);
        const Vec3 dx = h * w + (h * h * s_mid) * a;
        s_new = ss.s - dot(dx, a);
    }
    return s_new;
}

CheckResult check_sav_closed_form() {
    std::mt19937_64 rng(86420);
    std::uniform_real_distribution<double> vel(-1.0, 1.0);
    std::uniform_real_distribution<double> sdist(0.5, 1.5);
    std::uniform_real_distribution<double> hdist(1e-4, 0.1);
    const ExperimentField field(1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const SavState ss{{random_off_axis(rng), {vel(rng), vel(rng), vel(rng)}},
                          sdist(rng),
                          1.0};
        const double h = hdist(rng);
        const double closed = step_s1_sav(ss, field, h).s;
        const double iterated = sav_fixed_point(ss, field, h, 50);
        worst = std::max(worst, std::abs(closed - iterated) / std::max(1.0, std::abs(closed)));
    }
    return bounded("sav-closed-form-vs-fixed-point", worst, 1e-14);
}

}  // namespace

std::vector<CheckResult> run_self_checks() {
    return {check_gradients(), check_rotation(), check_energy_identity(),
            check_sav_closed_form()};
}

bool print_self_checks(const std::vector<CheckResult>& results) {
    bool all = true;
    for (const CheckResult& r : results) {
        std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
        all = all && r.passed;
    }
    return all;
}

}  // namespace cpd
