#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace wirebend {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Consecutive polyline points closer than this are treated as coincident.
inline constexpr double kMinSegmentMm = 1e-6;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Unsigned angle between two vectors in degrees, [0, 180]. Uses atan2 so it
// stays accurate near 0 and 180.
double angle_between_deg(const Vec3& a, const Vec3& b);

// Signed angle from `from` to `to` about `axis` (right-handed), degrees in (-180, 180].
double signed_angle_deg(const Vec3& from, const Vec3& to, const Vec3& axis);

// Any unit vector perpendicular to v.
Vec3 any_perpendicular(const Vec3& v);

// Rotation about a unit axis by an angle in degrees.
Mat3 axis_rotation(const Vec3& axis, double deg);

struct SegmentClosest {
    double s = 0.0;  // parameter on the first segment, [0,1]
    double t = 0.0;  // parameter on the second segment, [0,1]
    Vec3 point_a = Vec3::Zero();
    Vec3 point_b = Vec3::Zero();
    double distance = 0.0;
};

// Closest points between segments [a0,a1] and [b0,b1].
SegmentClosest closest_between_segments(const Vec3& a0, const Vec3& a1,
                                        const Vec3& b0, const Vec3& b1);

// Ordered 3D point list in millimeters, at least two points, no two
// consecutive points coincident.
class Polyline3 {
public:
    explicit Polyline3(std::vector<Vec3> points);

    const std::vector<Vec3>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    std::size_t segment_count() const { return points_.size() - 1; }
    const Vec3& operator[](std::size_t i) const { return points_[i]; }
    const Vec3& front() const { return points_.front(); }
    const Vec3& back() const { return points_.back(); }

    Vec3 direction(std::size_t segment) const;
    double segment_length(std::size_t segment) const;
    double length() const;

    // Turn angle in degrees at each interior vertex; element k belongs to vertex k+1.
    std::vector<double> turn_angles() const;
    double total_turn() const;

    Polyline3 transformed(const Mat3& rotation, const Vec3& translation) const;
    Polyline3 reversed() const;

    bool operator==(const Polyline3& other) const { return points_ == other.points_; }

private:
    std::vector<Vec3> points_;
};

// Unit normal of the plane through three points (b is the corner); zero when collinear.
Vec3 bend_normal(const Vec3& a, const Vec3& b, const Vec3& c);

// Turn angles of a raw point list (no validation), degrees.
std::vector<double> turn_angles(std::span<const Vec3> points);

}  // namespace wirebend
