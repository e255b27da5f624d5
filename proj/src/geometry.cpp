#include "wirebend/geometry.hpp"

#include "wirebend/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wirebend {

double angle_between_deg(const Vec3& a, const Vec3& b) {
    return rad_to_deg(std::atan2(a.cross(b).norm(), a.dot(b)));
}

double signed_angle_deg(const Vec3& from, const Vec3& to, const Vec3& axis) {
    const Vec3 k = axis.normalized();
    const Vec3 f = from - from.dot(k) * k;
    const Vec3 t = to - to.dot(k) * k;
    double deg = rad_to_deg(std::atan2(f.cross(t).dot(k), f.dot(t)));
    if (deg <= -180.0) deg += 360.0;
    return deg;
}

Vec3 any_perpendicular(const Vec3& v) {
    const Vec3 u = v.normalized();
    const Vec3 seed = std::abs(u.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return u.cross(seed).normalized();
}

Mat3 axis_rotation(const Vec3& axis, double deg) {
    return Eigen::AngleAxisd(deg_to_rad(deg), axis.normalized()).toRotationMatrix();
}

// Ericson, Real-Time Collision Detection, 5.1.9.
SegmentClosest closest_between_segments(const Vec3& a0, const Vec3& a1,
                                        const Vec3& b0, const Vec3& b1) {
    constexpr double eps = 1e-14;
    const Vec3 d1 = a1 - a0;
    const Vec3 d2 = b1 - b0;
    const Vec3 r = a0 - b0;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);

    double s = 0.0;
    double t = 0.0;
    if (a <= eps && e <= eps) {
        s = t = 0.0;
    } else if (a <= eps) {
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= eps) {
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > eps * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }

    SegmentClosest out;
    out.s = s;
    out.t = t;
    out.point_a = a0 + d1 * s;
    out.point_b = b0 + d2 * t;
    out.distance = (out.point_a - out.point_b).norm();
    return out;
}

Polyline3::Polyline3(std::vector<Vec3> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw InvalidInput("polyline needs at least 2 points, got " + std::to_string(points_.size()));
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!points_[i].allFinite()) {
            throw InvalidInput("polyline point " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && (points_[i] - points_[i - 1]).norm() <= kMinSegmentMm) {
            throw InvalidInput("polyline points " + std::to_string(i - 1) + " and " +
                               std::to_string(i) + " coincide");
        }
    }
}

Vec3 Polyline3::direction(std::size_t segment) const {
    return (points_[segment + 1] - points_[segment]).normalized();
}

double Polyline3::segment_length(std::size_t segment) const {
    return (points_[segment + 1] - points_[segment]).norm();
}

double Polyline3::length() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i) total += segment_length(i);
    return total;
}

std::vector<double> Polyline3::turn_angles() const { return wirebend::turn_angles(points_); }

double Polyline3::total_turn() const {
    double total = 0.0;
    for (double t : turn_angles()) total += t;
    return total;
}

Polyline3 Polyline3::transformed(const Mat3& rotation, const Vec3& translation) const {
    std::vector<Vec3> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(rotation * p + translation);
    return Polyline3(std::move(out));
}

Polyline3 Polyline3::reversed() const {
    return Polyline3(std::vector<Vec3>(points_.rbegin(), points_.rend()));
}

Vec3 bend_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 n = (b - a).normalized().cross((c - b).normalized());
    const double len = n.norm();
    if (len < 1e-12) return Vec3::Zero();
    return n / len;
}

std::vector<double> turn_angles(std::span<const Vec3> points) {
    std::vector<double> out;
    if (points.size() < 3) return out;
    out.reserve(points.size() - 2);
    for (std::size_t i = 1; i + 1 < points.size(); ++i) {
        out.push_back(angle_between_deg(points[i] - points[i - 1], points[i + 1] - points[i]));
    }
    return out;
}

}  // namespace wirebend
