#include "cpd/integrators.hpp"

#include <cmath>
#include <limits>

namespace cpd {

std::string scheme_name(SchemeId id) {
    switch (id) {
        case SchemeId::S1_ESAV: return "s1-esav";
        case SchemeId::S2_ESAV: return "s2-esav";
        case SchemeId::S1_MESAV: return "s1-mesav";
        case SchemeId::S2_MESAV: return "s2-mesav";
        case SchemeId::S1_SAV: return "s1-sav";
    }
    return "unknown";
}

SchemeId parse_scheme(const std::string& name) {
    if (name == "s1-esav") return SchemeId::S1_ESAV;
    if (name == "s2-esav") return SchemeId::S2_ESAV;
    if (name == "s1-mesav") return SchemeId::S1_MESAV;
    if (name == "s2-mesav") return SchemeId::S2_MESAV;
    if (name == "s1-sav") return SchemeId::S1_SAV;
    throw UsageError("unknown scheme '" + name +
                     "' (valid: s1-esav, s2-esav, s1-mesav, s2-mesav, s1-sav)");
}

MesavConstant mesav_constant(const FieldModel& model, const ParticleState& init) {
    const double h0 = energy_H(init, model);
    if (h0 == 0.0 || !std::isfinite(h0)) {
        throw InitError("scaled exponential schemes require H(x0, v0) != 0");
    }
    const MesavConstant c{std::abs(h0)};
    if (!std::isfinite(model.potential(init.x) / c.value)) {
        throw InitError("U(x0)/C is not finite");
    }
    return c;
}

double energy_H(const ParticleState& state, const FieldModel& model) {
    return 0.5 * dot(state.v, state.v) + model.potential(state.x);
}

double energy_hat(const EsavState& es) {
    return 0.5 * dot(es.state.v, es.state.v) + es.log_r;
}

double energy_hat_C(const EsavState& es, const MesavConstant& c) {
    return 0.5 * dot(es.state.v, es.state.v) + c.value * es.log_r;
}

double energy_tilde(const SavState& ss) {
    return 0.5 * dot(ss.state.v, ss.state.v) + ss.s * ss.s - ss.c0;
}

EsavState phi_l(const EsavState& es, const FieldModel& model, double t) {
    const Vec3 b = model.magnetic(es.state.x);
    return {{es.state.x, rot_exp_apply(b, t, es.state.v)}, es.log_r};
}

EsavState phi_nl(const EsavState& es, const FieldModel& model, double h,
                 double aux_scale, StepDiagnostics* diag) {
    const Vec3& x = es.state.x;
    const Vec3& v = es.state.v;
    const double inv_c = 1.0 / aux_scale;

    const Vec3 x_mid = x + (0.5 * h) * v;
    const double u = model.potential(x_mid) * inv_c;
    const Vec3 e = model.electric(x_mid);

    // The state carries ln r; r and exp(U/C) are materialized only here.
    const double r_n = std::exp(es.log_r);
    if (!std::isfinite(r_n)) {
        throw OverflowError("exp(ln r) overflowed (ln r = " + std::to_string(es.log_r) +
                            ")");
    }
    const double exp_u = std::exp(u);
    if (!std::isfinite(exp_u)) {
        throw OverflowError("exp(U/C) overflowed (U/C = " + std::to_string(u) + ")");
    }
    const double r_half = r_n - (0.5 * h) * exp_u * dot(v, e) * inv_c;
    // r_half may dip below zero mid-step; only the end-of-step value is
    // positive by construction. Recorded, not an error.
    if (r_half < 0.0 && diag != nullptr) {
        ++diag->negative_r_half;
    }

    const Vec3 f = (r_half / exp_u) * e;
    const Vec3 x_new = x + h * v + (0.5 * h * h) * f;
    const Vec3 v_new = v + h * f;
    const double log_r_new = es.log_r - dot(x_new - x, f) * inv_c;
    return {{x_new, v_new}, log_r_new};
}

EsavState step_s1_esav(const EsavState& es, const FieldModel& model, double h,
                       StepDiagnostics* diag) {
    return phi_nl(phi_l(es, model, h), model, h, 1.0, diag);
}

EsavState step_s2_esav(const EsavState& es, const FieldModel& model, double h,
                       StepDiagnostics* diag) {
    return phi_l(phi_nl(phi_l(es, model, 0.5 * h), model, h, 1.0, diag), model, 0.5 * h);
}

EsavState step_mesav(const EsavState& es, const FieldModel& model, double h,
                     const MesavConstant& c, int order, StepDiagnostics* diag) {
    if (order == 1) {
        return phi_nl(phi_l(es, model, h), model, h, c.value, diag);
    }
    if (order == 2) {
        return phi_l(phi_nl(phi_l(es, model, 0.5 * h), model, h, c.value, diag), model,
                     0.5 * h);
    }
    throw InitError("scaled scheme order must be 1 or 2");
}

SavState step_s1_sav(const SavState& ss, const FieldModel& model, double h) {
    const Vec3 b = model.magnetic(ss.state.x);
    const Vec3 w = rot_exp_apply(b, h, ss.state.v);
    const Vec3 x_mid = ss.state.x + (0.5 * h) * w;

    const double shifted = model.potential(x_mid) + ss.c0;
    if (!(shifted > 0.0)) {
        throw DomainError("U(x_mid) + C0 must be positive (got " + std::to_string(shifted) +
                          ")");
    }
    const Vec3 a = model.electric(x_mid) / (2.0 * std::sqrt(shifted));

    // Exact elimination of the midpoint coupling; the denominator is >= 1.
    const double beta = 0.5 * h * h * dot(a, a);
    const double s_new = (ss.s * (1.0 - beta) - h * dot(w, a)) / (1.0 + beta);
    const double s_mid = 0.5 * (s_new + ss.s);

    const Vec3 x_new = ss.state.x + h * w + (h * h * s_mid) * a;
    const Vec3 v_new = w + (2.0 * h * s_mid) * a;
    return {{x_new, v_new}, s_new, ss.c0};
}

Stepper::Stepper(SchemeId id, const FieldModel& model, const ParticleState& init,
                 std::optional<double> c0)
    : id_(id), model_(&model), particle_(init) {
    switch (id_) {
        case SchemeId::S1_ESAV:
        case SchemeId::S2_ESAV:
            aux_ = model.potential(init.x);  // ln r(0) = U(x0)
            break;
        case SchemeId::S1_MESAV:
        case SchemeId::S2_MESAV:
            c_ = mesav_constant(model, init).value;
            aux_ = model.potential(init.x) / c_;  // ln r(0) = U(x0)/C
            break;
        case SchemeId::S1_SAV: {
            if (!c0.has_value()) {
                throw InitError("s1-sav requires the shift constant C0");
            }
            c0_ = *c0;
            const double shifted = model.potential(init.x) + c0_;
            if (!(shifted > 0.0)) {
                throw InitError("s1-sav requires U(x0) + C0 > 0");
            }
            aux_ = std::sqrt(shifted);  // s(0)
            break;
        }
    }
    if (!std::isfinite(aux_)) {
        throw InitError("initial auxiliary scalar is not finite");
    }
}

void Stepper::advance(double h) {
    switch (id_) {
        case SchemeId::S1_ESAV: {
            const EsavState next = step_s1_esav({particle_, aux_}, *model_, h, &diag_);
            particle_ = next.state;
            aux_ = next.log_r;
            break;
        }
        case SchemeId::S2_ESAV: {
            const EsavState next = step_s2_esav({particle_, aux_}, *model_, h, &diag_);
            particle_ = next.state;
            aux_ = next.log_r;
            break;
        }
        case SchemeId::S1_MESAV:
        case SchemeId::S2_MESAV: {
            const int order = (id_ == SchemeId::S1_MESAV) ? 1 : 2;
            const EsavState next =
                step_mesav({particle_, aux_}, *model_, h, MesavConstant{c_}, order, &diag_);
            particle_ = next.state;
            aux_ = next.log_r;
            break;
        }
        case SchemeId::S1_SAV: {
            const SavState next = step_s1_sav({particle_, aux_, c0_}, *model_, h);
            particle_ = next.state;
            aux_ = next.s;
            break;
        }
    }
    // ln r finite encodes r > 0; s must stay finite likewise.
    if (!std::isfinite(aux_) || !is_finite(particle_.x) || !is_finite(particle_.v)) {
        throw OverflowError("state became non-finite after a " + scheme_name(id_) + " step");
    }
}

double Stepper::modified_energy() const {
    switch (id_) {
        case SchemeId::S1_ESAV:
        case SchemeId::S2_ESAV:
            return energy_hat({particle_, aux_});
        case SchemeId::S1_MESAV:
        case SchemeId::S2_MESAV:
            return energy_hat_C({particle_, aux_}, MesavConstant{c_});
        case SchemeId::S1_SAV:
            return energy_tilde({particle_, aux_, c0_});
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace cpd
