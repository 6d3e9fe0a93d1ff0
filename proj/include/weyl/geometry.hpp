#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace weyl {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Flat 3-torus (R/LZ)^3. Distances are minimum over images, which for
// separations below L/2 coincide with the Euclidean distance.
struct Torus3 {
    double L = 1.0;

    double wrap1(double u) const {
        u = std::fmod(u, L);
        if (u < 0.0) u += L;
        return u;
    }
    Vec3 wrap(const Vec3& p) const { return {wrap1(p.x), wrap1(p.y), wrap1(p.z)}; }

    double delta1(double a, double b) const {
        double d = std::fmod(a - b, L);
        if (d < -0.5 * L) d += L;
        if (d > 0.5 * L) d -= L;
        return d;
    }
    Vec3 delta(const Vec3& a, const Vec3& b) const {
        return {delta1(a.x, b.x), delta1(a.y, b.y), delta1(a.z, b.z)};
    }
    double distance(const Vec3& a, const Vec3& b) const { return delta(a, b).norm(); }
    double volume() const { return L * L * L; }
};

// Open cube (0,a)^3 with Euclidean distance.
struct Cube3 {
    double a = 1.0;
    double distance(const Vec3& p, const Vec3& q) const { return (p - q).norm(); }
    double volume() const { return a * a * a; }
    double boundary_distance(const Vec3& p) const {
        double d = p.x;
        d = std::min(d, a - p.x);
        d = std::min(d, p.y);
        d = std::min(d, a - p.y);
        d = std::min(d, p.z);
        d = std::min(d, a - p.z);
        return d;
    }
};

namespace detail {

inline double halton(std::uint64_t i, std::uint64_t base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= static_cast<double>(base);
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

} // namespace detail

// Low-discrepancy points in the unit cube (Halton, bases 2/3/5).
inline std::vector<Vec3> halton_cloud(std::size_t n, std::uint64_t offset = 1) {
    std::vector<Vec3> pts;
    pts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t j = offset + i;
        pts.push_back({detail::halton(j, 2), detail::halton(j, 3), detail::halton(j, 5)});
    }
    return pts;
}

// Low-discrepancy cloud inside the ball of given radius around a center
// (rejection from the enclosing cube).
inline std::vector<Vec3> halton_ball(std::size_t n, const Vec3& center, double radius) {
    std::vector<Vec3> pts;
    pts.reserve(n);
    std::uint64_t j = 1;
    while (pts.size() < n) {
        const Vec3 u{detail::halton(j, 2), detail::halton(j, 3), detail::halton(j, 5)};
        ++j;
        const Vec3 p{(2.0 * u.x - 1.0) * radius, (2.0 * u.y - 1.0) * radius, (2.0 * u.z - 1.0) * radius};
        if (p.norm2() <= radius * radius) pts.push_back(center + p);
    }
    return pts;
}

} // namespace weyl
