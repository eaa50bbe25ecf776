#pragma once

// Fixed-dimension 3-vector helpers plus the two kernels the magnetic
// subflow needs: the skew matrix mapping v -> v x B and its exact
// rotation exponential.

#include <array>
#include <cmath>

namespace cpd {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    friend constexpr Vec3 operator+(const Vec3& a, const Vec3& b) {
        return {a.x + b.x, a.y + b.y, a.z + b.z};
    }
    friend constexpr Vec3 operator-(const Vec3& a, const Vec3& b) {
        return {a.x - b.x, a.y - b.y, a.z - b.z};
    }
    friend constexpr Vec3 operator*(double s, const Vec3& a) {
        return {s * a.x, s * a.y, s * a.z};
    }
    friend constexpr Vec3 operator*(const Vec3& a, double s) { return s * a; }
    friend constexpr Vec3 operator/(const Vec3& a, double s) {
        return {a.x / s, a.y / s, a.z / s};
    }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    friend constexpr bool operator==(const Vec3& a, const Vec3& b) = default;
};

constexpr double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline bool is_finite(const Vec3& a) {
    return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Row-major 3x3 matrix. Only what the skew map and its tests need.
struct Mat3 {
    std::array<double, 9> m{};

    constexpr double operator()(int r, int c) const { return m[3 * r + c]; }
    constexpr double& operator()(int r, int c) { return m[3 * r + c]; }

    friend constexpr Vec3 operator*(const Mat3& a, const Vec3& v) {
        return {a.m[0] * v.x + a.m[1] * v.y + a.m[2] * v.z,
                a.m[3] * v.x + a.m[4] * v.y + a.m[5] * v.z,
                a.m[6] * v.x + a.m[7] * v.y + a.m[8] * v.z};
    }
};

/// Skew matrix of B = (b1,b2,b3): rows (0,b3,-b2), (-b3,0,b1), (b2,-b1,0).
/// Satisfies skew(B)*v == cross(v, B).
constexpr Mat3 skew(const Vec3& b) {
    return Mat3{{0.0, b.z, -b.y,  //
                 -b.z, 0.0, b.x,  //
                 b.y, -b.x, 0.0}};
}

/// Applies exp(t*skew(B)) to v, i.e. the exact solution at time t of
/// vdot = v x B with B frozen. Closed-form Rodrigues evaluation:
///
///   exp(A) v = v + (sin th / th) A v + ((1 - cos th) / th^2) A^2 v,
///   A = t*skew(B), th = |t|*|B|, A v = t*(v x B).
///
/// Below th = 1e-8 the two coefficients switch to their quadratic Taylor
/// expansions to avoid (1 - cos th)/th^2 cancellation.
inline Vec3 rot_exp_apply(const Vec3& b, double t, const Vec3& v) {
    const double theta = std::abs(t) * norm(b);
    double c1;  // sin(th)/th
    double c2;  // (1-cos(th))/th^2
    if (theta < 1e-8) {
        const double t2 = theta * theta;
        c1 = 1.0 - t2 / 6.0;
        c2 = 0.5 - t2 / 24.0;
    } else {
        c1 = std::sin(theta) / theta;
        c2 = (1.0 - std::cos(theta)) / (theta * theta);
    }
    const Vec3 w1 = cross(v, b);   // skew(B) v
    const Vec3 w2 = cross(w1, b);  // skew(B)^2 v
    return v + (t * c1) * w1 + (t * t * c2) * w2;
}

}  // namespace cpd
