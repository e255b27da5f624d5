#pragma once

#include "wirebend/geometry.hpp"
#include "wirebend/machine_model.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace wirebend {

struct SimplifyParams {
    double smoothing_strength = 0.0;   // [0, 1]; one averaging pass per 0.2
    double min_reduction_ratio = 0.0;  // [0, 1)
    double min_feed_mm = 0.0;
    double min_bend_deg = 0.0;

    void validate() const;

    static SimplifyParams for_profile(const MachineProfile& profile);
};

// True when every interior turn is >= min_bend_deg (and not collinear) and,
// for paths with bends, every segment is >= min_feed_mm. A two-point path is
// always fabricable.
bool is_fabricable(const Polyline3& path, const SimplifyParams& params);

// Smoothing, Douglas-Peucker reduction and constraint repair. A path that is
// already fabricable under `params` is returned unchanged, which makes the
// operation idempotent.
Polyline3 simplify(const Polyline3& path, const SimplifyParams& params);

// Douglas-Peucker with a fixed tolerance; returns the indices kept.
std::vector<std::size_t> douglas_peucker(const std::vector<Vec3>& points, double tolerance);

// A maximal run of consecutive interior vertices whose bend planes agree
// (normal dot > kCoplanarDot). Vertex indices are into the polyline.
struct CoplanarRun {
    std::size_t first_vertex = 0;
    std::size_t last_vertex = 0;
    std::size_t length() const { return last_vertex - first_vertex + 1; }
};

inline constexpr double kCoplanarDot = 0.999;

std::vector<CoplanarRun> coplanar_runs(const Polyline3& path);

// Dihedral between the bend planes at vertex i and vertex i+1, degrees in
// [0, 180]; nullopt when either vertex is straight.
std::optional<double> bend_plane_dihedral_deg(const Polyline3& path, std::size_t vertex);

// Lifts vertices of every coplanar same-direction run of >= 3 bends out of
// its plane so that consecutive bend planes differ by >= epsilon_deg.
Polyline3 deplanarize(const Polyline3& path, double epsilon_deg);

enum class ConflictKind { Proximity, Sweep, Both };

struct Conflict {
    std::size_t segment_a = 0;
    std::size_t segment_b = 0;
    Vec3 closest_a = Vec3::Zero();
    Vec3 closest_b = Vec3::Zero();
    double min_distance_mm = 0.0;
    ConflictKind kind = ConflictKind::Proximity;
    double swept_deg = 0.0;
};

struct CollisionReport {
    std::vector<Conflict> conflicts;
    std::size_t size() const { return conflicts.size(); }
    bool empty() const { return conflicts.empty(); }
};

// Default proximity: two wire diameters.
double default_proximity_mm(const MachineProfile& profile);

// Pairs of non-adjacent segments are flagged when they pass closer than
// proximity_mm, or when the wire between them turns by more than
// threshold_deg while staying in one bend plane (the formed part swings
// back through the head).
CollisionReport detect_conflicts(const Polyline3& path, double threshold_deg, double proximity_mm);

}  // namespace wirebend
