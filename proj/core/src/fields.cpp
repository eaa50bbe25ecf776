#include "cpd/fields.hpp"

#include <algorithm>
#include <cmath>

namespace cpd {

namespace {

double cylinder_radius_checked(const Vec3& x) {
    const double rho = std::hypot(x.x, x.y);
    if (rho < ExperimentField::kMinRadius) {
        throw DomainError("potential singular on the axis x1 = x2 = 0 (radius " +
                          std::to_string(rho) + ")");
    }
    return rho;
}

}  // namespace

ExperimentField::ExperimentField(double eps) : eps_(eps) {
    if (!(eps > 0.0)) {
        throw UsageError("experiment field requires eps > 0");
    }
}

double ExperimentField::potential(const Vec3& x) const {
    const double rho = cylinder_radius_checked(x);
    return 1.0 / (100.0 * rho);
}

Vec3 ExperimentField::electric(const Vec3& x) const {
    // -grad of 1/(100 rho) = (x1, x2, 0) / (100 rho^3)
    const double rho = cylinder_radius_checked(x);
    const double scale = 1.0 / (100.0 * rho * rho * rho);
    return {scale * x.x, scale * x.y, 0.0};
}

Vec3 ExperimentField::magnetic(const Vec3& x) const {
    const double rho = std::hypot(x.x, x.y);
    return {0.0, 0.0, rho / eps_};
}

GradientCheckReport check_gradient_consistency(const FieldModel& model,
                                               const std::vector<Vec3>& points,
                                               double fd_step) {
    GradientCheckReport report;
    for (const Vec3& p : points) {
        const Vec3 e = model.electric(p);
        const double scale = std::max(1.0, norm(e));
        for (int i = 0; i < 3; ++i) {
            Vec3 lo = p;
            Vec3 hi = p;
            lo[i] -= fd_step;
            hi[i] += fd_step;
            const double fd_grad =
                (model.potential(hi) - model.potential(lo)) / (2.0 * fd_step);
            const double dev = std::abs(e[i] + fd_grad) / scale;
            if (dev > report.max_rel_deviation) {
                report.max_rel_deviation = dev;
                report.worst_point = p;
            }
        }
    }
    return report;
}

std::unique_ptr<FieldModel> make_field(const std::string& name,
                                       const std::map<std::string, double>& params) {
    auto get = [&params](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (name == "zero") {
        return std::make_unique<ZeroField>();
    }
    if (name == "harmonic") {
        return std::make_unique<HarmonicField>(get("b", 1.0));
    }
    if (name == "experiment") {
        return std::make_unique<ExperimentField>(get("eps", 1.0));
    }
    throw UsageError("unknown field '" + name + "' (valid: zero, harmonic, experiment)");
}

}  // namespace cpd
