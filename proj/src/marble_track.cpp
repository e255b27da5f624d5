#include "wirebend/marble_track.hpp"

#include "wirebend/errors.hpp"
#include "wirebend/path_kernel.hpp"

#include <cmath>

namespace wirebend {

namespace {

const Vec3 kUp = Vec3::UnitY();

// Unit vector along `v` with its component along `t` removed; falls back to
// `fallback` when v is parallel to t.
Vec3 perpendicular_part(const Vec3& v, const Vec3& t, const Vec3& fallback) {
    Vec3 p = v - v.dot(t) * t;
    if (p.norm() < 1e-9) p = fallback - fallback.dot(t) * t;
    return p.normalized();
}

struct SegmentFrame {
    Vec3 tangent;
    Vec3 lateral;   // left, horizontal
    Vec3 vertical;  // up, perpendicular to the tangent
};

SegmentFrame frame_for(const Vec3& tangent) {
    Vec3 lateral = tangent.cross(kUp);
    if (lateral.norm() < 1e-9) lateral = tangent.cross(Vec3::UnitX());
    lateral.normalize();
    lateral = -lateral;  // tangent x up points right; keep +lateral on the left
    return {tangent, lateral, tangent.cross(lateral).normalized()};
}

Vec3 offset_in(const SegmentFrame& f, double side, double drop) { return side * f.lateral + drop * f.vertical; }

// Unit normal of the mitre plane at a corner.
Vec3 mitre_normal(const Vec3& t_in, const Vec3& t_out) { return (t_in + t_out).normalized(); }

// Carries the cross-section across a corner by reflecting it in the mitre
// plane, so both offset lines meet on that plane. Level turns keep the
// lateral horizontal; turns that also change slope bank the section.
SegmentFrame transport(const SegmentFrame& in, const Vec3& t_out) {
    const Vec3 n = mitre_normal(in.tangent, t_out);
    auto reflect = [&](const Vec3& v) -> Vec3 { return v - 2.0 * v.dot(n) * n; };
    return {t_out, reflect(in.lateral).normalized(), reflect(in.vertical).normalized()};
}

// Rail vertex at a corner: where the incoming offset line crosses the mitre plane.
Vec3 mitre(const Vec3& corner, const Vec3& off_in, const Vec3& t_in, const Vec3& t_out) {
    const Vec3 n = mitre_normal(t_in, t_out);
    return corner + off_in - (off_in.dot(n) / t_in.dot(n)) * t_in;
}

}  // namespace

double upper_gauge_mm(const TrackSpec& spec) {
    return spec.marble_diameter_mm * std::sin(deg_to_rad(spec.rail_contact_deg));
}

std::vector<double> clip_stations(double length_mm, double spacing_mm) {
    if (!(spacing_mm > 0.0)) throw InvalidInput("clip spacing must be > 0");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double s = k * spacing_mm;
        if (s >= length_mm - 1e-9) break;
        out.push_back(s);
    }
    out.push_back(length_mm);
    return out;
}

Track generate_track(const TrackSpec& spec, const MachineProfile& profile) {
    profile.validate();
    const double wire = profile.wire_diameter_mm;
    if (!(spec.marble_diameter_mm > 2.0 * wire)) throw InvalidInput("marble diameter must exceed two wire diameters");
    if (!(spec.clip_spacing_mm > 0.0)) throw InvalidInput("clip spacing must be > 0");
    if (!(spec.rail_contact_deg > 0.0 && spec.rail_contact_deg < 90.0)) {
        throw InvalidInput("rail contact angle must be in (0, 90)");
    }

    const SimplifyParams limits = SimplifyParams::for_profile(profile);
    const Polyline3 center = simplify(spec.center_path, limits);
    const auto& c = center.points();
    const double marble_r = spec.marble_diameter_mm / 2.0;

    const auto turns = center.turn_angles();
    for (std::size_t k = 0; k < turns.size(); ++k) {
        const double shorter = std::min(center.segment_length(k), center.segment_length(k + 1));
        const double radius = shorter / (2.0 * std::tan(deg_to_rad(turns[k]) / 2.0));
        if (radius < marble_r + wire / 2.0) {
            throw InfeasibleTrack("track bends too tightly at vertex " + std::to_string(k + 1) + " (radius " +
                                  std::to_string(radius) + " mm)");
        }
    }

    Track track;
    track.upper_gauge_mm = upper_gauge_mm(spec);
    const double half = track.upper_gauge_mm / 2.0;

    std::vector<SegmentFrame> frames;
    frames.push_back(frame_for(center.direction(0)));
    for (std::size_t s = 1; s < center.segment_count(); ++s) frames.push_back(transport(frames.back(), center.direction(s)));

    const std::array<std::pair<double, double>, 4> offsets{{{half, 0.0}, {-half, 0.0}, {half, -marble_r}, {-half, -marble_r}}};
    for (std::size_t r = 0; r < 4; ++r) {
        const auto [side, drop] = offsets[r];
        std::vector<Vec3> rail;
        rail.push_back(c.front() + offset_in(frames.front(), side, drop));
        for (std::size_t v = 1; v + 1 < c.size(); ++v) {
            const auto& fin = frames[v - 1];
            rail.push_back(mitre(c[v], offset_in(fin, side, drop), fin.tangent, frames[v].tangent));
        }
        rail.push_back(c.back() + offset_in(frames.back(), side, drop));
        track.rails[r] = simplify(Polyline3(std::move(rail)), limits);
    }

    // Zig-zag tower between the two lower rails at the start of each segment.
    for (std::size_t s = 0; s < center.segment_count(); ++s) {
        const Vec3 left = c[s] + offset_in(frames[s], half, -marble_r);
        const Vec3 right = c[s] + offset_in(frames[s], -half, -marble_r);
        const double height = std::min(left.y(), right.y());
        if (height < half) continue;
        const int panels = std::max(1, static_cast<int>(std::lround(height / track.upper_gauge_mm)));
        std::vector<Vec3> tower;
        for (int k = 0; k <= panels; ++k) {
            Vec3 p = (k % 2 == 0) ? left : right;
            p.y() = height * (1.0 - static_cast<double>(k) / panels);
            tower.emplace_back(p);
        }
        track.supports.emplace_back(std::move(tower));
    }

    // Clip mounts along the centre line.
    std::vector<double> vertex_arc{0.0};
    for (std::size_t s = 0; s < center.segment_count(); ++s) vertex_arc.push_back(vertex_arc.back() + center.segment_length(s));
    std::size_t seg = 0;
    for (double station : clip_stations(center.length(), spec.clip_spacing_mm)) {
        while (seg + 1 < center.segment_count() && station > vertex_arc[seg + 1]) ++seg;
        const double u = (station - vertex_arc[seg]) / center.segment_length(seg);
        ClipMount clip;
        clip.arc_length_mm = station;
        clip.point = c[seg] + std::clamp(u, 0.0, 1.0) * (c[seg + 1] - c[seg]);

        Vec3 tangent = frames[seg].tangent;
        Vec3 normal = perpendicular_part(kUp, tangent, Vec3::UnitX());
        // At an interior vertex the discrete Frenet normal is defined.
        const bool at_vertex = std::abs(station - vertex_arc[seg + 1]) < 1e-9 && seg + 1 < center.segment_count();
        if (at_vertex) {
            const Vec3 tin = frames[seg].tangent;
            const Vec3 tout = frames[seg + 1].tangent;
            tangent = (tin + tout).normalized();
            const Vec3 bend = tout - tin;
            normal = perpendicular_part(bend.norm() > 1e-9 ? bend : kUp, tangent, Vec3::UnitX());
        }
        clip.frame.col(0) = tangent;
        clip.frame.col(1) = normal;
        clip.frame.col(2) = tangent.cross(normal);
        track.clips.push_back(clip);
    }
    return track;
}

}  // namespace wirebend
