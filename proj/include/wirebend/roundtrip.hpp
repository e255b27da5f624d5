#pragma once

#include "wirebend/geometry.hpp"
#include "wirebend/machine_model.hpp"

#include <cstddef>
#include <cstdint>
#include <random>

namespace wirebend {

// Uniform double in [0, 1) from the top 53 bits; identical on every platform
// for a given engine state.
double unit_uniform(std::mt19937_64& rng);
double uniform(std::mt19937_64& rng, double lo, double hi);

// Random path with `vertices` points whose segments are in
// [min_feed, min_feed + 50] mm and whose turns lie strictly inside the
// machine's bend limits.
Polyline3 random_feasible_path(std::mt19937_64& rng, const MachineProfile& profile, std::size_t vertices);

struct RigidAlignment {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();
    double max_vertex_error = 0.0;
};

// Least-squares rigid transform (Kabsch) taking `moving` onto `fixed`,
// vertex-for-vertex. Throws InvalidInput on a size mismatch.
RigidAlignment rigid_align(const Polyline3& moving, const Polyline3& fixed);

struct RoundTripReport {
    std::size_t paths = 0;
    double max_vertex_error = 0.0;
    std::size_t worst_path = 0;
};

// compile -> simulate (no springback) -> align, over `count` random paths of
// 3 to 50 vertices.
RoundTripReport roundtrip_check(std::size_t count, std::uint64_t seed, const MachineProfile& profile);

}  // namespace wirebend
