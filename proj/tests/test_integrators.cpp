#include <doctest.h>

#include <cmath>
#include <random>

#include "cpd/fields.hpp"
#include "cpd/integrators.hpp"
#include "oracles.hpp"

using cpd::EsavState;
using cpd::MesavConstant;
using cpd::ParticleState;
using cpd::SavState;
using cpd::SchemeId;
using cpd::Vec3;

namespace {

ParticleState section3_init() {
    return {{0.0, 1.0, 0.1}, {0.09, 0.05, 0.2}};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(a)); }

}  // namespace

// --- Energy functionals ---------------------------------------------------

TEST_CASE("energy_H on the benchmark initial data") {
    const cpd::ExperimentField field(1.0);
    const double h0 = cpd::energy_H(section3_init(), field);
    CHECK(h0 == doctest::Approx(0.0353).epsilon(1e-15));
}

TEST_CASE("energy_H trivial cases") {
    const cpd::ZeroField zero;
    CHECK(cpd::energy_H({{5.0, 5.0, 5.0}, {0.0, 0.0, 0.0}}, zero) == 0.0);
    CHECK(cpd::energy_H({{1.0, 2.0, 3.0}, {2.0, 0.0, 0.0}}, zero) == 2.0);
}

TEST_CASE("energy_hat") {
    CHECK(cpd::energy_hat({{{}, {0.0, 0.0, 0.0}}, 0.5}) == 0.5);
    CHECK(cpd::energy_hat({{{}, {1.0, 1.0, 1.0}}, -1.0}) == 0.5);

    // At t = 0, ln r = U(x0) makes the modified energy equal H exactly.
    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const EsavState es{init, field.potential(init.x)};
    CHECK(cpd::energy_hat(es) == cpd::energy_H(init, field));
}

TEST_CASE("energy_hat_C") {
    CHECK(cpd::energy_hat_C({{{}, {0.0, 0.0, 0.0}}, 1.0}, MesavConstant{2.0}) == 2.0);
    CHECK(cpd::energy_hat_C({{{}, {0.0, 0.0, 2.0}}, 0.0}, MesavConstant{7.0}) == 2.0);

    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const MesavConstant c = cpd::mesav_constant(field, init);
    const EsavState es{init, field.potential(init.x) / c.value};
    CHECK(cpd::energy_hat_C(es, c) == doctest::Approx(0.0353).epsilon(1e-14));
}

TEST_CASE("energy_tilde") {
    CHECK(cpd::energy_tilde({{{}, {0.0, 0.0, 0.0}}, 1.0, 1.0}) == 0.0);
    CHECK(cpd::energy_tilde({{{}, {1.0, 0.0, 0.0}}, 0.0, 0.0}) == 0.5);

    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const SavState ss{init, std::sqrt(field.potential(init.x) + 1.0), 1.0};
    CHECK(cpd::energy_tilde(ss) == doctest::Approx(0.0353).epsilon(1e-13));
}

// --- phi_l ------------------------------------------------------------------

TEST_CASE("phi_l with zero magnetic field is the identity") {
    const cpd::ZeroField zero;
    const EsavState es{{{1.0, 2.0, 3.0}, {0.2, -0.4, 0.6}}, 0.7};
    const EsavState out = cpd::phi_l(es, zero, 0.3);
    CHECK(out.state == es.state);
    CHECK(out.log_r == es.log_r);
}

TEST_CASE("phi_l quarter turn matches the series oracle") {
    const oracle::UniformBField field(1.0);
    const EsavState es{{{0.5, 0.5, 0.5}, {1.0, 0.0, 0.0}}, 0.25};
    const EsavState out = cpd::phi_l(es, field, M_PI / 2.0);
    CHECK(out.state.x == es.state.x);
    CHECK(out.log_r == es.log_r);
    const Vec3 want = oracle::series_exp_apply({0.0, 0.0, 1.0}, M_PI / 2.0, es.state.v);
    CHECK(norm(out.state.v - want) <= 1e-12);
    CHECK(out.state.v.y == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("phi_l preserves speed and the auxiliary scalar") {
    std::mt19937_64 rng(100);
    const cpd::ExperimentField field(0.25);
    std::uniform_real_distribution<double> tdist(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const EsavState out = cpd::phi_l(es, field, tdist(rng));
        CHECK(std::abs(norm(out.state.v) - norm(es.state.v)) <= 1e-14);
        CHECK(out.log_r == es.log_r);
        CHECK(out.state.x == es.state.x);
    }
}

// --- phi_nl -----------------------------------------------------------------

TEST_CASE("phi_nl with zero potential is free flight") {
    const cpd::ZeroField zero;
    const EsavState es{{{1.0, 2.0, 3.0}, {0.5, -0.5, 0.25}}, 0.0};
    const EsavState out = cpd::phi_nl(es, zero, 0.2);
    CHECK(out.state.x == es.state.x + 0.2 * es.state.v);
    CHECK(out.state.v == es.state.v);
    CHECK(out.log_r == es.log_r);
}

TEST_CASE("phi_nl harmonic hand example is exact") {
    const cpd::HarmonicField field;
    const EsavState es{{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 0.5};
    const EsavState out = cpd::phi_nl(es, field, 0.1);
    CHECK(out.state.x == Vec3{0.995, 0.0, 0.0});
    CHECK(out.state.v == Vec3{-0.1, 0.0, 0.0});
    CHECK(out.log_r == 0.495);
    CHECK(cpd::energy_hat(out) == 0.5);
    CHECK(cpd::energy_hat(out) == cpd::energy_hat(es));
}

TEST_CASE("phi_nl conserves the modified energy per step") {
    std::mt19937_64 rng(101);
    const cpd::ExperimentField field(1.0);
    std::uniform_real_distribution<double> hdist(1e-5, 0.1);
    for (int i = 0; i < 1000; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const EsavState out = cpd::phi_nl(es, field, hdist(rng));
        CHECK(rel_diff(cpd::energy_hat(out), cpd::energy_hat(es)) <= 1e-14);
    }
}

TEST_CASE("phi_nl overflow contract") {
    const cpd::HarmonicField field;
    // exp(ln r) overflows
    CHECK_THROWS_AS(cpd::phi_nl({{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 800.0}, field, 0.1),
                    cpd::OverflowError);
    // exp(U) overflows
    const oracle::ConstPotentialField big(800.0);
    CHECK_THROWS_AS(cpd::phi_nl({{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 0.0}, big, 0.1),
                    cpd::OverflowError);
}

TEST_CASE("phi_nl propagates domain errors from the midpoint") {
    const cpd::ExperimentField field(1.0);
    // Midpoint x + (h/2) v lands inside the guard radius.
    const EsavState es{{{1.0, 0.0, 0.0}, {-2.0 + 1e-13, 0.0, 0.0}}, 0.0};
    CHECK_THROWS_AS(cpd::phi_nl(es, field, 1.0), cpd::DomainError);
}

TEST_CASE("phi_nl records negative midpoint auxiliary values") {
    const cpd::HarmonicField field;
    // Large velocity against a strong gradient drives the midpoint value
    // negative; the step itself must still complete with finite ln r.
    const EsavState es{{{-10.0, 0.0, 0.0}, {10.0, 0.0, 0.0}}, -5.0};
    cpd::StepDiagnostics diag;
    const EsavState out = cpd::phi_nl(es, field, 0.1, 1.0, &diag);
    CHECK(diag.negative_r_half == 1);
    CHECK(std::isfinite(out.log_r));
    CHECK(rel_diff(cpd::energy_hat(out), cpd::energy_hat(es)) <= 1e-13);
}

TEST_CASE("phi_nl continuous limit") {
    const cpd::HarmonicField field;
    const EsavState es{{{1.0, 0.2, -0.3}, {0.4, -0.1, 0.5}}, 0.3};
    const double u = field.potential(es.state.x);
    const Vec3 f0 = std::exp(es.log_r - u) * field.electric(es.state.x);

    double prev_x = 0.0, prev_v = 0.0;
    for (const double h : {1e-3, 1e-4, 1e-5}) {
        const EsavState out = cpd::phi_nl(es, field, h);
        const double dev_x = norm((out.state.x - es.state.x) / h - es.state.v);
        const double dev_v = norm((out.state.v - es.state.v) / h - f0);
        if (prev_x > 0.0) {
            // First order in h: deviations shrink ~10x per decade.
            CHECK(dev_x / prev_x > 0.02);
            CHECK(dev_x / prev_x < 0.5);
            CHECK(dev_v / prev_v > 0.02);
            CHECK(dev_v / prev_v < 0.5);
        }
        prev_x = dev_x;
        prev_v = dev_v;
    }
}

// --- Composed schemes -------------------------------------------------------

TEST_CASE("step_s1_esav with zero magnetic field equals phi_nl") {
    const cpd::HarmonicField field_b0(0.0);
    std::mt19937_64 rng(102);
    for (int i = 0; i < 100; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const EsavState s1 = cpd::step_s1_esav(es, field_b0, 0.05);
        const EsavState nl = cpd::phi_nl(es, field_b0, 0.05);
        CHECK(s1.state == nl.state);
        CHECK(s1.log_r == nl.log_r);
    }
}

TEST_CASE("step_s1_esav with no electric force drifts a rotated velocity") {
    const oracle::UniformBField field(2.0);
    const EsavState es{{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, 0.125};
    const double h = 0.3;
    const EsavState out = cpd::step_s1_esav(es, field, h);
    const Vec3 w = cpd::rot_exp_apply({0.0, 0.0, 2.0}, h, es.state.v);
    CHECK(out.state.v == w);
    CHECK(out.state.x == es.state.x + h * w);
    CHECK(out.log_r == es.log_r);
    CHECK(std::abs(norm(out.state.v) - 1.0) <= 1e-15);
}

TEST_CASE("step_s1_esav matches the literal transcription") {
    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const EsavState es{init, field.potential(init.x)};
    const EsavState got = cpd::step_s1_esav(es, field, 1e-3);
    const EsavState want = oracle::s1_esav_literal(es, field, 1e-3);
    CHECK(norm(got.state.x - want.state.x) <= 1e-15 * norm(want.state.x));
    CHECK(norm(got.state.v - want.state.v) <= 1e-15 * std::max(1.0, norm(want.state.v)));
    CHECK(std::abs(got.log_r - want.log_r) <= 1e-15 * std::max(1.0, std::abs(want.log_r)));

    // And on a batch of random states with a larger step.
    std::mt19937_64 rng(103);
    for (int i = 0; i < 200; ++i) {
        const EsavState s = oracle::random_esav(rng);
        const EsavState a = cpd::step_s1_esav(s, field, 0.05);
        const EsavState b = oracle::s1_esav_literal(s, field, 0.05);
        CHECK(norm(a.state.x - b.state.x) <= 1e-14 * std::max(1.0, norm(b.state.x)));
        CHECK(norm(a.state.v - b.state.v) <= 1e-14 * std::max(1.0, norm(b.state.v)));
        CHECK(std::abs(a.log_r - b.log_r) <= 1e-14 * std::max(1.0, std::abs(b.log_r)));
    }
}

TEST_CASE("step_s2_esav with zero magnetic field reduces to phi_nl") {
    const cpd::HarmonicField field_b0(0.0);
    const EsavState es{{{1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}, 0.5};
    const EsavState s2 = cpd::step_s2_esav(es, field_b0, 0.1);
    CHECK(s2.state.x == Vec3{0.995, 0.0, 0.0});
    CHECK(s2.state.v == Vec3{-0.1, 0.0, 0.0});
    CHECK(s2.log_r == 0.495);
}

TEST_CASE("step_s2_esav with no electric force") {
    const oracle::UniformBField field(1.5);
    const EsavState es{{{0.2, -0.2, 0.0}, {0.0, 1.0, 0.5}}, -0.25};
    const EsavState out = cpd::step_s2_esav(es, field, 0.2);
    CHECK(out.log_r == es.log_r);
    CHECK(std::abs(norm(out.state.v) - norm(es.state.v)) <= 1e-15);
    // x update uses the half-rotated velocity.
    const Vec3 w = cpd::rot_exp_apply({0.0, 0.0, 1.5}, 0.1, es.state.v);
    CHECK(out.state.x == es.state.x + 0.2 * w);
}

TEST_CASE("step_s2_esav matches the literal transcription") {
    const cpd::ExperimentField field(1.0);
    std::mt19937_64 rng(104);
    for (int i = 0; i < 200; ++i) {
        const EsavState s = oracle::random_esav(rng);
        const EsavState a = cpd::step_s2_esav(s, field, 0.05);
        const EsavState b = oracle::s2_esav_literal(s, field, 0.05);
        CHECK(norm(a.state.x - b.state.x) <= 1e-14 * std::max(1.0, norm(b.state.x)));
        CHECK(norm(a.state.v - b.state.v) <= 1e-14 * std::max(1.0, norm(b.state.v)));
        CHECK(std::abs(a.log_r - b.log_r) <= 1e-14 * std::max(1.0, std::abs(b.log_r)));
    }
}

TEST_CASE("composition consistency") {
    const cpd::ExperimentField field(0.25);
    std::mt19937_64 rng(105);
    for (int i = 0; i < 100; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const double h = 0.02;
        const EsavState s1 = cpd::step_s1_esav(es, field, h);
        const EsavState c1 = cpd::phi_nl(cpd::phi_l(es, field, h), field, h);
        CHECK(s1.state == c1.state);
        CHECK(s1.log_r == c1.log_r);

        const EsavState s2 = cpd::step_s2_esav(es, field, h);
        const EsavState c2 = cpd::phi_l(
            cpd::phi_nl(cpd::phi_l(es, field, h / 2.0), field, h), field, h / 2.0);
        CHECK(s2.state == c2.state);
        CHECK(s2.log_r == c2.log_r);
    }
}

// --- Scaled variants ---------------------------------------------------------

TEST_CASE("step_mesav with C = 1 is bitwise identical to the unscaled step") {
    const cpd::ExperimentField field(1.0);
    std::mt19937_64 rng(106);
    for (int i = 0; i < 100; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const EsavState m1 = cpd::step_mesav(es, field, 0.03, MesavConstant{1.0}, 1);
        const EsavState e1 = cpd::step_s1_esav(es, field, 0.03);
        CHECK(m1.state == e1.state);
        CHECK(m1.log_r == e1.log_r);
        const EsavState m2 = cpd::step_mesav(es, field, 0.03, MesavConstant{1.0}, 2);
        const EsavState e2 = cpd::step_s2_esav(es, field, 0.03);
        CHECK(m2.state == e2.state);
        CHECK(m2.log_r == e2.log_r);
    }
}

TEST_CASE("step_mesav conserves the scaled modified energy") {
    const cpd::ExperimentField field(1.0);
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> cdist(0.01, 3.0);
    std::uniform_real_distribution<double> hdist(1e-4, 0.1);
    for (int i = 0; i < 500; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const MesavConstant c{cdist(rng)};
        for (int order : {1, 2}) {
            const EsavState out = cpd::step_mesav(es, field, hdist(rng), c, order);
            CHECK(rel_diff(cpd::energy_hat_C(out, c), cpd::energy_hat_C(es, c)) <= 1e-13);
        }
    }
}

TEST_CASE("step_mesav matches the literal transcription") {
    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const MesavConstant c = cpd::mesav_constant(field, init);
    CHECK(c.value == doctest::Approx(0.0353).epsilon(1e-15));
    const EsavState es{init, field.potential(init.x) / c.value};
    const EsavState got = cpd::step_mesav(es, field, 1e-3, c, 1);
    const EsavState want = oracle::s1_esav_literal(es, field, 1e-3, c.value);
    CHECK(norm(got.state.x - want.state.x) <= 1e-15 * norm(want.state.x));
    CHECK(norm(got.state.v - want.state.v) <= 1e-15 * std::max(1.0, norm(want.state.v)));
    CHECK(std::abs(got.log_r - want.log_r) <= 1e-14 * std::max(1.0, std::abs(want.log_r)));

    const EsavState got2 = cpd::step_mesav(es, field, 1e-3, c, 2);
    const EsavState want2 = oracle::s2_esav_literal(es, field, 1e-3, c.value);
    CHECK(norm(got2.state.x - want2.state.x) <= 1e-15 * norm(want2.state.x));
    CHECK(std::abs(got2.log_r - want2.log_r) <= 1e-14 * std::max(1.0, std::abs(want2.log_r)));
}

TEST_CASE("step_mesav rejects bad orders") {
    const cpd::ExperimentField field(1.0);
    const EsavState es{section3_init(), 0.01};
    CHECK_THROWS_AS(cpd::step_mesav(es, field, 0.01, MesavConstant{1.0}, 3),
                    cpd::InitError);
}

TEST_CASE("mesav_constant rejects H = 0") {
    const cpd::ZeroField zero;
    CHECK_THROWS_AS(cpd::mesav_constant(zero, {{1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}}),
                    cpd::InitError);
}

// --- Baseline ----------------------------------------------------------------

TEST_CASE("step_s1_sav with no electric force keeps s and rotates") {
    const oracle::UniformBField field(1.0);
    const SavState ss{{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, 1.25, 1.0};
    const double h = 0.4;
    const SavState out = cpd::step_s1_sav(ss, field, h);
    CHECK(out.s == ss.s);
    const Vec3 w = cpd::rot_exp_apply({0.0, 0.0, 1.0}, h, ss.state.v);
    CHECK(out.state.v == w);
    CHECK(out.state.x == ss.state.x + h * w);
}

TEST_CASE("step_s1_sav closed form equals the fixed-point iteration") {
    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const SavState ss{init, std::sqrt(field.potential(init.x) + 1.0), 1.0};
    const SavState closed = cpd::step_s1_sav(ss, field, 1e-3);
    const SavState iterated = oracle::s1_sav_fixed_point(ss, field, 1e-3, 50);
    CHECK(std::abs(closed.s - iterated.s) <= 1e-14);
    CHECK(norm(closed.state.x - iterated.state.x) <= 1e-14);
    CHECK(norm(closed.state.v - iterated.state.v) <= 1e-14);
}

TEST_CASE("step_s1_sav conserves the shifted modified energy") {
    const cpd::ExperimentField field(1.0);
    std::mt19937_64 rng(108);
    std::uniform_real_distribution<double> sdist(0.5, 1.5);
    std::uniform_real_distribution<double> hdist(1e-4, 0.1);
    for (int i = 0; i < 500; ++i) {
        const SavState ss{{oracle::random_off_axis(rng), oracle::random_box(rng, 1.0)},
                          sdist(rng),
                          1.0};
        const SavState out = cpd::step_s1_sav(ss, field, hdist(rng));
        CHECK(rel_diff(cpd::energy_tilde(out), cpd::energy_tilde(ss)) <= 1e-13);
    }
}

TEST_CASE("step_s1_sav rejects non-positive shifted potential") {
    const cpd::ZeroField zero;
    const SavState ss{{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}}, 1.0, -1.0};
    CHECK_THROWS_AS(cpd::step_s1_sav(ss, zero, 0.1), cpd::DomainError);
}

// --- Per-step conservation identities over the composed schemes --------------

TEST_CASE("one step changes the modified energy only at round-off") {
    const cpd::ExperimentField field(1.0);
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> hdist(1e-4, 0.1);
    for (int i = 0; i < 1000; ++i) {
        const EsavState es = oracle::random_esav(rng);
        const double h = hdist(rng);
        CHECK(rel_diff(cpd::energy_hat(cpd::step_s1_esav(es, field, h)),
                       cpd::energy_hat(es)) <= 1e-14);
        CHECK(rel_diff(cpd::energy_hat(cpd::step_s2_esav(es, field, h)),
                       cpd::energy_hat(es)) <= 1e-14);
    }
}

TEST_CASE("modified energy stays on H(x0,v0) over ten thousand steps") {
    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();
    const double h0 = cpd::energy_H(init, field);
    for (const SchemeId id :
         {SchemeId::S1_ESAV, SchemeId::S2_ESAV, SchemeId::S1_MESAV, SchemeId::S2_MESAV}) {
        cpd::Stepper stepper(id, field, init);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            stepper.advance(1e-2);
            worst = std::max(worst, std::abs(stepper.modified_energy() - h0));
            REQUIRE(std::isfinite(stepper.aux()));
        }
        CHECK(worst / std::abs(h0) <= 1e-10);
    }
    cpd::Stepper sav(SchemeId::S1_SAV, field, init, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
        sav.advance(1e-2);
        worst = std::max(worst, std::abs(sav.modified_energy() - h0));
    }
    CHECK(worst / std::abs(h0) <= 1e-10);
}

// --- Stepper construction ------------------------------------------------------

TEST_CASE("Stepper initializes the auxiliary variable per scheme") {
    const cpd::ExperimentField field(1.0);
    const ParticleState init = section3_init();

    const cpd::Stepper esav(SchemeId::S1_ESAV, field, init);
    CHECK(esav.aux() == 0.01);  // ln r(0) = U(x0)
    CHECK(esav.aux_constant() == 1.0);

    const cpd::Stepper sav(SchemeId::S1_SAV, field, init, 1.0);
    CHECK(sav.aux() == std::sqrt(1.01));

    const cpd::Stepper mesav(SchemeId::S1_MESAV, field, init);
    CHECK(mesav.aux_constant() == doctest::Approx(0.0353).epsilon(1e-15));
    CHECK(mesav.aux() == 0.01 / mesav.aux_constant());
}

TEST_CASE("Stepper rejects invalid initial data") {
    const cpd::ExperimentField field(1.0);
    const cpd::ZeroField zero;
    const ParticleState init = section3_init();
    // Baseline without a shift constant.
    CHECK_THROWS_AS(cpd::Stepper(SchemeId::S1_SAV, field, init), cpd::InitError);
    // Shift violating U + C0 > 0.
    CHECK_THROWS_AS(cpd::Stepper(SchemeId::S1_SAV, field, init, -2.0), cpd::InitError);
    // Scaled scheme with H(x0,v0) = 0.
    CHECK_THROWS_AS(cpd::Stepper(SchemeId::S1_MESAV, zero, {{1.0, 1.0, 1.0}, {}}),
                    cpd::InitError);
}

TEST_CASE("scheme names round-trip") {
    for (const SchemeId id : {SchemeId::S1_ESAV, SchemeId::S2_ESAV, SchemeId::S1_MESAV,
                              SchemeId::S2_MESAV, SchemeId::S1_SAV}) {
        CHECK(cpd::parse_scheme(cpd::scheme_name(id)) == id);
    }
    CHECK_THROWS_AS(cpd::parse_scheme("boris"), cpd::UsageError);
}
