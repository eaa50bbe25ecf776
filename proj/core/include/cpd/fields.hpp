#pragma once

// Field-model abstraction: scalar potential U, electric field E = -grad U
// in closed form, and magnetic field B. Models are immutable after
// construction and safe for concurrent evaluation.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cpd/errors.hpp"
#include "cpd/linalg3.hpp"

namespace cpd {

class FieldModel {
  public:
    virtual ~FieldModel() = default;

    /// U(x). Throws DomainError on singularities.
    virtual double potential(const Vec3& x) const = 0;
    /// E(x) = -grad U(x), closed form. Throws DomainError on singularities.
    virtual Vec3 electric(const Vec3& x) const = 0;
    /// B(x). Well defined everywhere for the built-in models.
    virtual Vec3 magnetic(const Vec3& x) const = 0;

    virtual std::string name() const = 0;
    virtual std::map<std::string, double> params() const { return {}; }
};

/// U = 0, E = 0, B = 0.
class ZeroField final : public FieldModel {
  public:
    double potential(const Vec3&) const override { return 0.0; }
    Vec3 electric(const Vec3&) const override { return {}; }
    Vec3 magnetic(const Vec3&) const override { return {}; }
    std::string name() const override { return "zero"; }
};

/// U(x) = |x|^2 / 2 with uniform B = (0, 0, b).
class HarmonicField final : public FieldModel {
  public:
    explicit HarmonicField(double b = 1.0) : b_(b) {}

    double potential(const Vec3& x) const override { return 0.5 * dot(x, x); }
    Vec3 electric(const Vec3& x) const override { return -x; }
    Vec3 magnetic(const Vec3&) const override { return {0.0, 0.0, b_}; }
    std::string name() const override { return "harmonic"; }
    std::map<std::string, double> params() const override { return {{"b", b_}}; }

  private:
    double b_;
};

/// The singular-potential benchmark field:
///
///   U(x) = 1 / (100 sqrt(x1^2 + x2^2)),
///   B(x) = (1/eps) (0, 0, sqrt(x1^2 + x2^2)).
///
/// U and E are singular on the axis x1 = x2 = 0; evaluations with the
/// cylindrical radius below the guard value kMinRadius raise DomainError
/// rather than silently overflowing.
class ExperimentField final : public FieldModel {
  public:
    static constexpr double kMinRadius = 1e-12;

    explicit ExperimentField(double eps = 1.0);

    double potential(const Vec3& x) const override;
    Vec3 electric(const Vec3& x) const override;
    Vec3 magnetic(const Vec3& x) const override;
    std::string name() const override { return "experiment"; }
    std::map<std::string, double> params() const override { return {{"eps", eps_}}; }

    double eps() const { return eps_; }

  private:
    double eps_;
};

/// Worst componentwise deviation between the closed-form electric field and
/// the central finite difference of -U over a point set.
struct GradientCheckReport {
    double max_rel_deviation = 0.0;
    Vec3 worst_point{};
};

/// Compares electric(x) to the central difference of -potential at each
/// point, componentwise, with relative scale max(1, |E(x)|). Propagates
/// DomainError from the evaluators.
GradientCheckReport check_gradient_consistency(const FieldModel& model,
                                               const std::vector<Vec3>& points,
                                               double fd_step);

/// Builds a built-in model by name: "zero", "harmonic" (param b),
/// "experiment" (param eps). Throws UsageError for unknown names or
/// non-positive eps.
std::unique_ptr<FieldModel> make_field(const std::string& name,
                                       const std::map<std::string, double>& params);

}  // namespace cpd
