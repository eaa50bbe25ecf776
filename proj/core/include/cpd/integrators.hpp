#pragma once

// One-step maps for the charged-particle system xddot = v x B(x) + E(x):
// the exact magnetic rotation flow, the explicit auxiliary-variable
// propagator for the electric subflow, their first-order and Strang
// compositions, the overflow-mitigated variants, and the linearly
// implicit scalar-auxiliary baseline solved in closed form. Every scheme
// here conserves its modified energy exactly at the discrete level; the
// steppers are pure functions of (state, h).

#include <cstdint>
#include <optional>
#include <string>

#include "cpd/errors.hpp"
#include "cpd/fields.hpp"
#include "cpd/linalg3.hpp"

namespace cpd {

struct ParticleState {
    Vec3 x;
    Vec3 v;

    friend constexpr bool operator==(const ParticleState&, const ParticleState&) = default;
};

/// State of the exponential-auxiliary schemes. Stores ln r, never r:
/// the propagator update is additive in ln r, and r itself can overflow
/// long before ln r does. r = exp(U(x)) at initialization, or
/// exp(U(x)/C) for the scaled variants.
struct EsavState {
    ParticleState state;
    double log_r = 0.0;
};

/// State of the square-root-auxiliary baseline: s = sqrt(U(x) + C0) at
/// initialization, with the shift constant C0 carried along.
struct SavState {
    ParticleState state;
    double s = 0.0;
    double c0 = 0.0;
};

enum class SchemeId {
    S1_ESAV,
    S2_ESAV,
    S1_MESAV,
    S2_MESAV,
    S1_SAV,
};

std::string scheme_name(SchemeId id);
/// Parses "s1-esav", "s2-esav", "s1-mesav", "s2-mesav", "s1-sav".
/// Throws UsageError listing the valid names.
SchemeId parse_scheme(const std::string& name);

/// The exponential rescaling constant C = |H(x0, v0)|. Positive by
/// construction; initial data with H = 0 is rejected.
struct MesavConstant {
    double value = 1.0;
};

/// Builds C from the initial data. Throws InitError when H(x0,v0) = 0 or
/// when U(x0)/C is not finite.
MesavConstant mesav_constant(const FieldModel& model, const ParticleState& init);

/// Optional per-run counters a stepper can feed. The half-step auxiliary
/// value may go negative mid-run even though the end-of-step value cannot;
/// that is recorded, not treated as an error.
struct StepDiagnostics {
    std::uint64_t negative_r_half = 0;
};

// --- Energy functionals -------------------------------------------------

/// Physical energy H(x, v) = |v|^2/2 + U(x).
double energy_H(const ParticleState& state, const FieldModel& model);

/// Discrete invariant of the exponential schemes: |v|^2/2 + ln r.
double energy_hat(const EsavState& es);

/// Scaled variant: |v|^2/2 + C ln r.
double energy_hat_C(const EsavState& es, const MesavConstant& c);

/// Invariant of the baseline: |v|^2/2 + s^2 - C0.
double energy_tilde(const SavState& ss);

// --- One-step maps ------------------------------------------------------

/// Exact flow of the magnetic subflow over time t: x and ln r unchanged,
/// v rotated by exp(t*skew(B(x))).
EsavState phi_l(const EsavState& es, const FieldModel& model, double t);

/// Explicit propagator for the electric/auxiliary subflow over step h.
/// With midpoint xm = x + (h/2) v and um = U(xm)/C:
///
///   rm    = r - (h/2) exp(um) (v . E(xm)) / C        (r = exp(ln r))
///   F     = E(xm) rm / exp(um)
///   x'    = x + h v + (h^2/2) F
///   v'    = v + h F
///   ln r' = ln r - ((x' - x) . F) / C
///
/// aux_scale is C; 1 recovers the unscaled scheme. Throws OverflowError
/// when exp(ln r) or exp(um) is non-finite, DomainError from the field.
EsavState phi_nl(const EsavState& es, const FieldModel& model, double h,
                 double aux_scale = 1.0, StepDiagnostics* diag = nullptr);

/// First-order splitting: phi_nl(h) after phi_l(h), so the rotation uses
/// B(x_n) and the midpoint uses the rotated velocity.
EsavState step_s1_esav(const EsavState& es, const FieldModel& model, double h,
                       StepDiagnostics* diag = nullptr);

/// Strang splitting: phi_l(h/2), phi_nl(h), phi_l(h/2). The trailing
/// half-rotation evaluates B at the updated position.
EsavState step_s2_esav(const EsavState& es, const FieldModel& model, double h,
                       StepDiagnostics* diag = nullptr);

/// Scaled variants: same compositions with aux_scale = C. order is 1 or 2.
EsavState step_mesav(const EsavState& es, const FieldModel& model, double h,
                     const MesavConstant& c, int order, StepDiagnostics* diag = nullptr);

/// Linearly implicit baseline, one step. The coupling between s' and x'
/// through the midpoint average (s' + s)/2 is affine in s', so it is
/// resolved by exact scalar elimination: with w the rotated velocity,
/// xm = x + (h/2) w and a = E(xm) / (2 sqrt(U(xm) + C0)),
///
///   s' (1 + (h^2/2)|a|^2) = s (1 - (h^2/2)|a|^2) - h (w . a),
///
/// then x', v' are formed from the midpoint average. Throws DomainError
/// when U(xm) + C0 <= 0.
SavState step_s1_sav(const SavState& ss, const FieldModel& model, double h);

// --- Uniform stepper ----------------------------------------------------

/// One-step driver with a uniform interface across schemes: holds the
/// current state, advances it, and reports the scheme's native modified
/// energy and auxiliary scalar. Construction initializes the auxiliary
/// variable from the initial data (InitError on violated preconditions:
/// missing or invalid C0 for the baseline, H(x0,v0) = 0 for the scaled
/// exponential schemes). Steps are pure functions of the held state, so
/// trajectories are reproducible bit for bit.
class Stepper {
  public:
    Stepper(SchemeId id, const FieldModel& model, const ParticleState& init,
            std::optional<double> c0 = std::nullopt);

    /// Advances one step. Throws on field/overflow errors; verifies the
    /// auxiliary scalar stayed finite.
    void advance(double h);

    SchemeId id() const { return id_; }
    const ParticleState& particle() const { return particle_; }
    /// ln r for the exponential schemes, s for the baseline.
    double aux() const { return aux_; }
    /// The scheme's conserved functional at the current state.
    double modified_energy() const;
    /// C for the scaled schemes, 1 otherwise.
    double aux_constant() const { return c_; }
    std::uint64_t negative_r_half_count() const { return diag_.negative_r_half; }

  private:
    SchemeId id_;
    const FieldModel* model_;
    ParticleState particle_;
    double aux_ = 0.0;
    double c_ = 1.0;   // MESAV scale constant
    double c0_ = 0.0;  // SAV shift constant
    StepDiagnostics diag_;
};

}  // namespace cpd
