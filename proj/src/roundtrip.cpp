#include "wirebend/roundtrip.hpp"

#include "wirebend/bend_compiler.hpp"
#include "wirebend/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace wirebend {

double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

Polyline3 random_feasible_path(std::mt19937_64& rng, const MachineProfile& profile, std::size_t vertices) {
    if (vertices < 2) throw InvalidInput("random path needs at least 2 vertices");
    const double feed = std::max(min_feed(profile), 1.0);
    const double lo_turn = profile.min_plastic_deg + 0.01;
    const double hi_turn = std::min(profile.max_bend_deg, 179.0) - 0.01;

    std::vector<Vec3> pts{Vec3::Zero()};
    // Random initial heading.
    const double z = uniform(rng, -1.0, 1.0);
    const double phi = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(1.0 - z * z);
    Vec3 heading(r * std::cos(phi), r * std::sin(phi), z);

    for (std::size_t i = 1; i < vertices; ++i) {
        if (i > 1) {
            const double turn = uniform(rng, lo_turn, hi_turn);
            const double azimuth = uniform(rng, -180.0, 180.0);
            const Vec3 side = axis_rotation(heading, azimuth) * any_perpendicular(heading);
            heading = axis_rotation(heading.cross(side), turn) * heading;
            heading.normalize();
        }
        pts.push_back(pts.back() + uniform(rng, feed, feed + 50.0) * heading);
    }
    return Polyline3(std::move(pts));
}

RigidAlignment rigid_align(const Polyline3& moving, const Polyline3& fixed) {
    if (moving.size() != fixed.size()) {
        throw InvalidInput("rigid_align needs equal vertex counts");
    }
    const auto n = static_cast<double>(moving.size());
    Vec3 cm = Vec3::Zero();
    Vec3 cf = Vec3::Zero();
    for (std::size_t i = 0; i < moving.size(); ++i) {
        cm += moving[i];
        cf += fixed[i];
    }
    cm /= n;
    cf /= n;

    Mat3 cov = Mat3::Zero();
    for (std::size_t i = 0; i < moving.size(); ++i) cov += (moving[i] - cm) * (fixed[i] - cf).transpose();
    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0 ? -1.0 : 1.0;

    RigidAlignment out;
    out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    out.translation = cf - out.rotation * cm;
    for (std::size_t i = 0; i < moving.size(); ++i) {
        out.max_vertex_error =
            std::max(out.max_vertex_error, (out.rotation * moving[i] + out.translation - fixed[i]).norm());
    }
    return out;
}

RoundTripReport roundtrip_check(std::size_t count, std::uint64_t seed, const MachineProfile& profile) {
    std::mt19937_64 rng(seed);
    RoundTripReport report;
    for (std::size_t k = 0; k < count; ++k) {
        const auto vertices = 3 + static_cast<std::size_t>(rng() % 48);
        const Polyline3 path = random_feasible_path(rng, profile, vertices);
        const Polyline3 back = simulate(compile(path, profile), profile, false);
        const double err = rigid_align(back, path).max_vertex_error;
        if (err > report.max_vertex_error) {
            report.max_vertex_error = err;
            report.worst_path = k;
        }
        ++report.paths;
    }
    return report;
}

}  // namespace wirebend
