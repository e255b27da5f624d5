#include "wirebend/path_kernel.hpp"

#include "wirebend/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wirebend {

namespace {

// Vertices turning less than this are straight-through points.
constexpr double kStraightDeg = 1e-6;

double dist_to_segment(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double total_turn(const std::vector<Vec3>& pts) {
    double total = 0.0;
    for (double t : turn_angles(pts)) total += t;
    return total;
}

// Drops interior points that coincide with their predecessor; a point
// coinciding with the last point is dropped instead of the last point.
void drop_coincident(std::vector<Vec3>& pts) {
    std::vector<Vec3> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!out.empty() && (pts[i] - out.back()).norm() <= kMinSegmentMm) {
            if (i + 1 == pts.size() && out.size() > 1) out.back() = pts[i];
            continue;
        }
        out.push_back(pts[i]);
    }
    pts = std::move(out);
}

void smooth(std::vector<Vec3>& pts, double strength) {
    const int passes = static_cast<int>(std::floor(strength / 0.2 + 1e-9));
    for (int pass = 0; pass < passes && pts.size() > 2; ++pass) {
        std::vector<Vec3> next = pts;
        for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
            const Vec3 mid = 0.5 * (pts[i - 1] + pts[i + 1]);
            next[i] = pts[i] + strength * (mid - pts[i]);
        }
        drop_coincident(next);
        // Smoothing must not add turning; stop at the first pass that would.
        if (total_turn(next) > total_turn(pts)) break;
        pts = std::move(next);
    }
}

std::vector<Vec3> reduce_to_ratio(const std::vector<Vec3>& pts, double ratio) {
    if (ratio <= 0.0 || pts.size() <= 2) return pts;
    const auto target = std::max<std::size_t>(
        2, static_cast<std::size_t>(std::floor(static_cast<double>(pts.size()) * (1.0 - ratio) + 1e-9)));

    double extent = 0.0;
    for (const auto& p : pts) extent = std::max(extent, (p - pts.front()).norm());
    double tol = std::max(extent, 1.0) * 1e-9;
    std::vector<std::size_t> keep = douglas_peucker(pts, 0.0);
    while (keep.size() > target) {
        keep = douglas_peucker(pts, tol);
        tol *= 1.25;
    }
    std::vector<Vec3> out;
    out.reserve(keep.size());
    for (auto i : keep) out.push_back(pts[i]);
    return out;
}

void remove_vertex(std::vector<Vec3>& pts, std::size_t i) {
    pts.erase(pts.begin() + static_cast<std::ptrdiff_t>(i));
    drop_coincident(pts);
}

// Removes sub-threshold kinks and short segments until the path is clean.
void repair(std::vector<Vec3>& pts, const SimplifyParams& params) {
    const double min_bend = std::max(params.min_bend_deg, kStraightDeg);
    while (pts.size() > 2) {
        const auto turns = turn_angles(pts);
        const auto weakest = std::min_element(turns.begin(), turns.end());
        if (*weakest < min_bend) {
            remove_vertex(pts, static_cast<std::size_t>(weakest - turns.begin()) + 1);
            continue;
        }

        std::size_t shortest = 0;
        double shortest_len = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s + 1 < pts.size(); ++s) {
            const double len = (pts[s + 1] - pts[s]).norm();
            if (len < shortest_len) {
                shortest_len = len;
                shortest = s;
            }
        }
        if (shortest_len >= params.min_feed_mm) break;

        // Merge the short segment into its longer neighbour by removing the
        // vertex they share.
        const std::size_t last_segment = pts.size() - 2;
        std::size_t victim = 0;
        if (shortest == 0) {
            victim = 1;
        } else if (shortest == last_segment) {
            victim = last_segment;
        } else {
            const double before = (pts[shortest] - pts[shortest - 1]).norm();
            const double after = (pts[shortest + 2] - pts[shortest + 1]).norm();
            victim = before >= after ? shortest : shortest + 1;
        }
        remove_vertex(pts, victim);
    }
}

}  // namespace

void SimplifyParams::validate() const {
    if (!(smoothing_strength >= 0.0 && smoothing_strength <= 1.0)) {
        throw InvalidInput("smoothing_strength must be in [0, 1]");
    }
    if (!(min_reduction_ratio >= 0.0 && min_reduction_ratio < 1.0)) {
        throw InvalidInput("min_reduction_ratio must be in [0, 1)");
    }
    if (!(min_feed_mm >= 0.0) || !std::isfinite(min_feed_mm)) {
        throw InvalidInput("min_feed_mm must be >= 0");
    }
    if (!(min_bend_deg >= 0.0 && min_bend_deg <= 180.0)) {
        throw InvalidInput("min_bend_deg must be in [0, 180]");
    }
}

SimplifyParams SimplifyParams::for_profile(const MachineProfile& profile) {
    SimplifyParams p;
    p.min_feed_mm = min_feed(profile);
    p.min_bend_deg = profile.min_plastic_deg;
    return p;
}

bool is_fabricable(const Polyline3& path, const SimplifyParams& params) {
    if (path.size() == 2) return true;
    const double min_bend = std::max(params.min_bend_deg, kStraightDeg);
    for (double t : path.turn_angles()) {
        if (t < min_bend) return false;
    }
    for (std::size_t s = 0; s < path.segment_count(); ++s) {
        if (path.segment_length(s) < params.min_feed_mm) return false;
    }
    return true;
}

std::vector<std::size_t> douglas_peucker(const std::vector<Vec3>& points, double tolerance) {
    const std::size_t n = points.size();
    if (n <= 2) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    std::vector<bool> keep(n, false);
    keep.front() = keep.back() = true;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
    while (!stack.empty()) {
        const auto [lo, hi] = stack.back();
        stack.pop_back();
        double worst = -1.0;
        std::size_t worst_i = lo;
        for (std::size_t i = lo + 1; i < hi; ++i) {
            const double d = dist_to_segment(points[i], points[lo], points[hi]);
            if (d > worst) {
                worst = d;
                worst_i = i;
            }
        }
        if (worst_i != lo && worst > tolerance) {
            keep[worst_i] = true;
            stack.emplace_back(lo, worst_i);
            stack.emplace_back(worst_i, hi);
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (keep[i]) out.push_back(i);
    }
    return out;
}

Polyline3 simplify(const Polyline3& path, const SimplifyParams& params) {
    params.validate();
    if (is_fabricable(path, params)) return path;

    std::vector<Vec3> pts = path.points();
    smooth(pts, params.smoothing_strength);
    pts = reduce_to_ratio(pts, params.min_reduction_ratio);
    repair(pts, params);
    if (pts.size() < 2) throw Unsimplifiable("simplification collapsed the path");
    Polyline3 out(std::move(pts));
    if (!is_fabricable(out, params)) {
        throw Unsimplifiable("could not satisfy bend and feed limits");
    }
    return out;
}

std::vector<CoplanarRun> coplanar_runs(const Polyline3& path) {
    std::vector<CoplanarRun> runs;
    const auto& pts = path.points();
    std::optional<CoplanarRun> current;
    Vec3 prev_normal = Vec3::Zero();
    for (std::size_t v = 1; v + 1 < pts.size(); ++v) {
        const Vec3 n = bend_normal(pts[v - 1], pts[v], pts[v + 1]);
        if (n.isZero()) {
            if (current) runs.push_back(*current);
            current.reset();
        } else if (current && prev_normal.dot(n) > kCoplanarDot) {
            current->last_vertex = v;
        } else {
            if (current) runs.push_back(*current);
            current = CoplanarRun{v, v};
        }
        prev_normal = n;
    }
    if (current) runs.push_back(*current);
    return runs;
}

std::optional<double> bend_plane_dihedral_deg(const Polyline3& path, std::size_t vertex) {
    const auto& pts = path.points();
    if (vertex < 1 || vertex + 2 >= pts.size()) return std::nullopt;
    const Vec3 n1 = bend_normal(pts[vertex - 1], pts[vertex], pts[vertex + 1]);
    const Vec3 n2 = bend_normal(pts[vertex], pts[vertex + 1], pts[vertex + 2]);
    if (n1.isZero() || n2.isZero()) return std::nullopt;
    return angle_between_deg(n1, n2);
}

Polyline3 deplanarize(const Polyline3& path, double epsilon_deg) {
    if (!(epsilon_deg > 0.0 && epsilon_deg <= 10.0)) {
        throw InvalidInput("epsilon_deg must be in (0, 10]");
    }
    std::vector<CoplanarRun> runs;
    for (const auto& run : coplanar_runs(path)) {
        if (run.length() >= 3) runs.push_back(run);
    }
    if (runs.empty()) return path;

    const auto& pts = path.points();
    const double tan_eps = std::tan(deg_to_rad(epsilon_deg));

    struct Lift {
        std::size_t vertex;
        Vec3 unit;  // signed out-of-plane direction
        double max_mm;
    };
    std::vector<Lift> lifts;
    for (const auto& run : runs) {
        const Vec3 n = bend_normal(pts[run.first_vertex - 1], pts[run.first_vertex], pts[run.first_vertex + 1]);
        for (std::size_t v = run.first_vertex; v <= run.last_vertex; ++v) {
            const double sign = ((v - run.first_vertex) % 2 == 0) ? 1.0 : -1.0;
            const double adjacent = std::max((pts[v] - pts[v - 1]).norm(), (pts[v + 1] - pts[v]).norm());
            lifts.push_back({v, sign * n, tan_eps * adjacent});
        }
    }

    auto apply = [&](double scale) {
        std::vector<Vec3> moved = pts;
        for (const auto& lift : lifts) moved[lift.vertex] += scale * lift.max_mm * lift.unit;
        return Polyline3(std::move(moved));
    };
    auto separated = [&](const Polyline3& candidate) {
        for (const auto& run : runs) {
            for (std::size_t v = run.first_vertex; v < run.last_vertex; ++v) {
                const auto d = bend_plane_dihedral_deg(candidate, v);
                if (!d || *d < epsilon_deg) return false;
            }
        }
        return true;
    };

    // Smallest lift (in 5% steps of the allowed maximum) that separates every
    // pair of consecutive bend planes.
    for (int step = 1; step <= 20; ++step) {
        Polyline3 candidate = apply(step / 20.0);
        if (separated(candidate)) return candidate;
    }
    return apply(1.0);
}

double default_proximity_mm(const MachineProfile& profile) { return 2.0 * profile.wire_diameter_mm; }

CollisionReport detect_conflicts(const Polyline3& path, double threshold_deg, double proximity_mm) {
    const auto& pts = path.points();
    const std::size_t segments = path.segment_count();
    const std::size_t vertices = pts.size();

    // normals[v] for interior vertices; linked[v]: vertex v and v+1 share a bend plane.
    std::vector<Vec3> normals(vertices, Vec3::Zero());
    std::vector<double> turns(vertices, 0.0);
    for (std::size_t v = 1; v + 1 < vertices; ++v) {
        normals[v] = bend_normal(pts[v - 1], pts[v], pts[v + 1]);
        turns[v] = angle_between_deg(pts[v] - pts[v - 1], pts[v + 1] - pts[v]);
    }

    CollisionReport report;
    for (std::size_t a = 0; a < segments; ++a) {
        double swept = 0.0;
        bool chained = true;
        for (std::size_t b = a + 1; b < segments; ++b) {
            // Vertex b joins segment b-1 and segment b.
            if (normals[b].isZero()) {
                chained = false;
            } else if (b > a + 1 && chained && normals[b - 1].dot(normals[b]) <= kCoplanarDot) {
                chained = false;
            }
            if (chained) swept += turns[b];
            if (b == a + 1) continue;

            const auto closest = closest_between_segments(pts[a], pts[a + 1], pts[b], pts[b + 1]);
            const bool near = closest.distance < proximity_mm;
            const bool sweeps = chained && swept > threshold_deg;
            if (!near && !sweeps) continue;

            Conflict c;
            c.segment_a = a;
            c.segment_b = b;
            c.closest_a = closest.point_a;
            c.closest_b = closest.point_b;
            c.min_distance_mm = closest.distance;
            c.kind = near && sweeps ? ConflictKind::Both : (near ? ConflictKind::Proximity : ConflictKind::Sweep);
            c.swept_deg = chained ? swept : 0.0;
            report.conflicts.push_back(c);
        }
    }
    return report;
}

}  // namespace wirebend
