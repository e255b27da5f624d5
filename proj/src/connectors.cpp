#include "wirebend/connectors.hpp"

#include "wirebend/bend_compiler.hpp"
#include "wirebend/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace wirebend {

namespace {

using Params = std::map<std::string, double>;

void require(bool ok, const std::string& what) {
    if (!ok) throw InfeasibleSpec(what);
}

// Helical polygon around the +y axis: N sides per turn, inscribed circle of
// radius `apothem` in the xz projection, rising `pitch` per turn.
struct Ring {
    std::vector<Vec3> vertices;
    std::vector<Contact> contacts;
    int sides_per_turn = 0;
};

Vec3 ring_vertex(double circumradius, double pitch, int sides_per_turn, int k) {
    const double phi = 2.0 * std::numbers::pi * k / sides_per_turn;
    return {circumradius * std::cos(phi), pitch * k / sides_per_turn, circumradius * std::sin(phi)};
}

Ring make_ring(double apothem, double turns, double pitch, double wire_radius, const MachineProfile& profile) {
    const double feed = min_feed(profile);
    const int most = static_cast<int>(std::floor(360.0 / profile.min_plastic_deg));
    for (int n = most; n >= 3; --n) {
        const double circumradius = apothem / std::cos(std::numbers::pi / n);
        const Vec3 a = ring_vertex(circumradius, pitch, n, 0);
        const Vec3 b = ring_vertex(circumradius, pitch, n, 1);
        const Vec3 c = ring_vertex(circumradius, pitch, n, 2);
        const double turn = angle_between_deg(b - a, c - b);
        if (turn < profile.min_plastic_deg + 1e-6 || turn > profile.max_bend_deg) continue;
        if ((b - a).norm() < feed) continue;

        const int sides = static_cast<int>(std::lround(n * turns));
        require(sides >= 2, "ring needs at least two sides; increase the number of turns");
        Ring ring;
        ring.sides_per_turn = n;
        for (int k = 0; k <= sides; ++k) ring.vertices.push_back(ring_vertex(circumradius, pitch, n, k));
        for (int k = 0; k < sides; ++k) {
            const Vec3 mid = 0.5 * (ring.vertices[k] + ring.vertices[k + 1]);
            const Vec3 inward = -Vec3(mid.x(), 0.0, mid.z()).normalized();
            ring.contacts.push_back({mid + wire_radius * inward, inward});
        }
        return ring;
    }
    throw InfeasibleSpec("no ring polygon satisfies the bend and feed limits for apothem " +
                         std::to_string(apothem) + " mm");
}

Vec3 radial(const Vec3& p) { return Vec3(p.x(), 0.0, p.z()).normalized(); }

WirePart finish(const ConnectorSpec& spec, std::vector<Vec3> pts, std::vector<Contact> contacts,
                std::vector<std::size_t> anchors, const MachineProfile& profile) {
    WirePart part;
    part.kind = "connector";
    part.spec = spec;
    try {
        part.path = Polyline3(std::move(pts));
        check_compilable(part.path, profile);
    } catch (const ConstraintViolation& e) {
        throw InfeasibleSpec(std::string(to_string(spec.kind)) + ": " + e.what());
    } catch (const InvalidInput& e) {
        throw InfeasibleSpec(std::string(to_string(spec.kind)) + ": " + e.what());
    }
    part.contacts = std::move(contacts);
    part.anchors = std::move(anchors);
    return part;
}

WirePart pegboard_pin(const ConnectorSpec& spec, const Params& p, const MachineProfile& profile) {
    const double r = profile.wire_diameter_mm / 2.0;
    const double feed = min_feed(profile);
    const double spacing = p.at("hole_spacing_mm");
    const double board = p.at("board_thickness_mm");
    require(profile.wire_diameter_mm < p.at("hole_diameter_mm"), "wire is thicker than the pegboard hole");

    const double back = -board - r;
    const double rise = std::max(feed, p.at("hole_diameter_mm"));
    const double front = std::max(r, feed - board - r);
    std::vector<Vec3> pts{
        {back, rise, 0.0},                       // retaining tip behind the board
        {back, 0.0, 0.0},
        {front, 0.0, 0.0},                       // through the upper hole
        {front, -spacing, 0.0},                  // rests on the face at the lower hole
        {front + p.at("arm_mm"), -spacing, 0.0},
    };
    return finish(spec, std::move(pts), {}, {1, 3}, profile);
}

WirePart table_edge_clip(const ConnectorSpec& spec, const Params& p, const MachineProfile& profile) {
    const double r = profile.wire_diameter_mm / 2.0;
    const double edge = p.at("edge_thickness_mm");
    const double squeeze = edge * p.at("grip_factor") / 2.0;
    const double top = r - squeeze;
    const double bottom = -edge + squeeze - r;
    const double depth = p.at("depth_mm");
    const double under = std::max(depth / 2.0, min_feed(profile));
    std::vector<Vec3> pts{
        {-depth, top, 0.0},     // top jaw tip
        {r, top, 0.0},
        {r, bottom, 0.0},
        {-under, bottom, 0.0},  // bottom jaw
        {-under, bottom - p.at("drop_mm"), 0.0},
    };
    std::vector<Contact> contacts{
        {{-depth / 2.0, top - r, 0.0}, -Vec3::UnitY()},
        {{-under / 2.0, bottom + r, 0.0}, Vec3::UnitY()},
    };
    return finish(spec, std::move(pts), std::move(contacts), {1, 2}, profile);
}

WirePart cylinder_wrap(const ConnectorSpec& spec, const Params& p, const MachineProfile& profile) {
    const double d = profile.wire_diameter_mm;
    const double inner = p.at("object_diameter_mm") * (1.0 - p.at("grip_factor"));
    const double lead = p.at("lead_mm");
    Ring ring = make_ring(inner / 2.0 + d / 2.0, p.at("wrap_turns"), 4.0 * d, d / 2.0, profile);

    std::vector<Vec3> pts;
    pts.push_back(ring.vertices.front() + lead * radial(ring.vertices.front()));
    pts.insert(pts.end(), ring.vertices.begin(), ring.vertices.end());
    pts.push_back(ring.vertices.back() + lead * radial(ring.vertices.back()));
    return finish(spec, std::move(pts), std::move(ring.contacts), {}, profile);
}

WirePart hook(const ConnectorSpec& spec, const Params& p, const MachineProfile& profile) {
    const double d = profile.wire_diameter_mm;
    const double width = p.at("opening_mm") + d;
    std::vector<Vec3> pts{
        {0.0, p.at("shank_mm"), 0.0},
        {0.0, 0.0, 0.0},
        {width, 0.0, 0.0},
        {width, p.at("lip_mm"), 0.0},
    };
    std::vector<Contact> contacts{{{width / 2.0, d / 2.0, 0.0}, Vec3::UnitY()}};
    return finish(spec, std::move(pts), std::move(contacts), {}, profile);
}

WirePart clamp(const ConnectorSpec& spec, const Params& p, const MachineProfile& profile) {
    const double r = profile.wire_diameter_mm / 2.0;
    const double gap = p.at("jaw_gap_mm");
    const bool two_axis = p.at("two_axis") != 0.0;
    const double half = gap * (1.0 - p.at("grip_factor")) / 2.0 + r;
    const double jaw = p.at("jaw_length_mm");
    // Two-axis clamps cradle the object's lower face; single-axis clamps keep clear of it.
    const double cradle = two_axis ? -r + gap * p.at("grip_factor") / 2.0 : -r - 2.0 * profile.wire_diameter_mm;
    std::vector<Vec3> pts{
        {-half, jaw, 0.0},
        {-half, cradle, 0.0},
        {half, cradle, 0.0},
        {half, jaw, 0.0},
        {half + p.at("arm_mm"), jaw, 0.0},
    };
    std::vector<Contact> contacts{
        {{-half + r, jaw / 2.0, 0.0}, Vec3::UnitX()},
        {{half - r, jaw / 2.0, 0.0}, -Vec3::UnitX()},
    };
    if (two_axis) contacts.push_back({{0.0, cradle + r, 0.0}, Vec3::UnitY()});
    return finish(spec, std::move(pts), std::move(contacts), {}, profile);
}

WirePart cup_holder(const ConnectorSpec& spec, const Params& p, const MachineProfile& profile) {
    const double d = profile.wire_diameter_mm;
    const double r = d / 2.0;
    const double feed = min_feed(profile);
    const double inner = p.at("cup_diameter_mm") * (1.0 - p.at("grip_factor"));
    const double drop = p.at("ring_drop_mm");
    const double arm = p.at("arm_mm");
    const double edge = p.at("edge_thickness_mm");
    Ring ring = make_ring(inner / 2.0 + r, 1.5, 4.0 * d, r, profile);
    const Vec3 first = ring.vertices.front();
    const Vec3 last = ring.vertices.back();

    std::vector<Vec3> pts;
    std::vector<std::size_t> anchors;
    const double face = first.x() + arm;  // table edge face / lead-in start
    if (edge > 0.0) {
        // Hung over a table edge: top jaw on the table, down the edge face,
        // then out to the ring below the table.
        const double hang = std::max(p.at("hang_mm"), edge + 2.0 * d + feed);
        pts.push_back({face + p.at("depth_mm"), hang + r, 0.0});
        pts.push_back({face - r, hang + r, 0.0});
        pts.push_back({face - r, 0.0, 0.0});
        anchors = {1, 2};
    } else {
        pts.push_back({face, 0.0, 0.0});
    }
    pts.insert(pts.end(), ring.vertices.begin(), ring.vertices.end());

    // Under-support: step out past the ring, drop below it and cross under
    // the cup's axis to the far side.
    const double out = std::max(feed, 4.0 * d);
    const Vec3 u = radial(last);
    const Vec3 step = last + out * u;
    pts.push_back(step);
    pts.push_back({step.x(), -drop, step.z()});
    pts.push_back({-step.x(), -drop, -step.z()});

    std::vector<Contact> contacts = std::move(ring.contacts);
    contacts.push_back({{0.0, -drop + r, 0.0}, Vec3::UnitY()});
    return finish(spec, std::move(pts), std::move(contacts), std::move(anchors), profile);
}

}  // namespace

const std::map<std::string, double>& connector_defaults(ConnectorKind kind) {
    static const std::map<ConnectorKind, Params> defaults = {
        {ConnectorKind::PegboardPin,
         {{"hole_spacing_mm", 25.4}, {"hole_diameter_mm", 6.35}, {"board_thickness_mm", 5.0}, {"arm_mm", 40.0}}},
        {ConnectorKind::TableEdgeClip,
         {{"edge_thickness_mm", 20.0}, {"depth_mm", 30.0}, {"grip_factor", 0.05}, {"drop_mm", 30.0}}},
        {ConnectorKind::CylinderWrap,
         {{"object_diameter_mm", 66.0}, {"grip_factor", 0.05}, {"wrap_turns", 1.25}, {"lead_mm", 30.0}}},
        {ConnectorKind::Hook, {{"opening_mm", 20.0}, {"shank_mm", 40.0}, {"lip_mm", 12.0}}},
        {ConnectorKind::Clamp,
         {{"jaw_gap_mm", 9.0}, {"two_axis", 0.0}, {"jaw_length_mm", 30.0}, {"grip_factor", 0.05}, {"arm_mm", 30.0}}},
        {ConnectorKind::CupHolder,
         {{"cup_diameter_mm", 80.0}, {"ring_drop_mm", 60.0}, {"grip_factor", 0.05}, {"edge_thickness_mm", 0.0},
          {"arm_mm", 30.0}, {"hang_mm", 40.0}, {"depth_mm", 40.0}}},
    };
    return defaults.at(kind);
}

std::map<std::string, double> resolve_params(const ConnectorSpec& spec) {
    Params params = connector_defaults(spec.kind);
    for (const auto& [name, value] : spec.params) {
        const auto it = params.find(name);
        if (it == params.end()) {
            throw InvalidInput(std::string(to_string(spec.kind)) + " has no parameter '" + name + "'");
        }
        if (!std::isfinite(value)) throw InvalidInput("parameter '" + name + "' is not finite");
        it->second = value;
    }
    for (const auto& [name, value] : params) {
        if (name == "grip_factor") {
            if (!(value > 0.0 && value <= 0.15)) throw InvalidInput("grip_factor must be in (0, 0.15]");
        } else if (name == "two_axis") {
            if (value != 0.0 && value != 1.0) throw InvalidInput("two_axis must be 0 or 1");
        } else if (name == "edge_thickness_mm" && spec.kind == ConnectorKind::CupHolder) {
            if (!(value >= 0.0)) throw InvalidInput("edge_thickness_mm must be >= 0");
        } else if (!(value > 0.0)) {
            throw InvalidInput("parameter '" + name + "' must be > 0");
        }
    }
    return params;
}

WirePart generate(const ConnectorSpec& spec, const MachineProfile& profile) {
    profile.validate();
    const Params p = resolve_params(spec);
    switch (spec.kind) {
        case ConnectorKind::PegboardPin: return pegboard_pin(spec, p, profile);
        case ConnectorKind::TableEdgeClip: return table_edge_clip(spec, p, profile);
        case ConnectorKind::CylinderWrap: return cylinder_wrap(spec, p, profile);
        case ConnectorKind::Hook: return hook(spec, p, profile);
        case ConnectorKind::Clamp: return clamp(spec, p, profile);
        case ConnectorKind::CupHolder: return cup_holder(spec, p, profile);
    }
    throw InvalidInput("unknown connector kind");
}

LinkResult link(Scene scene, Splice splice) {
    const WirePart* a = scene.find(splice.part_a);
    const WirePart* b = scene.find(splice.part_b);
    if (!a) throw NotFound("no part labeled " + std::to_string(splice.part_a));
    if (!b) throw NotFound("no part labeled " + std::to_string(splice.part_b));
    if (!(splice.sleeve_length_mm > 0.0)) throw InvalidInput("sleeve_length_mm must be > 0");

    auto occupied = [&](int label, End end) {
        for (const auto& s : scene.splices) {
            if ((s.part_a == label && s.end_a == end) || (s.part_b == label && s.end_b == end)) return true;
            if (s.bridge && *s.bridge == label) return true;
        }
        return false;
    };
    for (const auto& [label, end] : {std::pair{splice.part_a, splice.end_a}, std::pair{splice.part_b, splice.end_b}}) {
        if (occupied(label, end)) {
            throw EndpointOccupied("part " + std::to_string(label) + " " + to_string(end) + " is already spliced");
        }
    }

    const Vec3 pa = a->endpoint(splice.end_a).point;
    const Vec3 pb = b->endpoint(splice.end_b).point;
    const double gap = (pa - pb).norm();

    LinkResult result;
    if (splice.part_a == splice.part_b) {
        if (splice.end_a == splice.end_b) throw SelfSplice("cannot splice an endpoint to itself");
        if (gap > splice.sleeve_length_mm) {
            throw SelfSplice("part " + std::to_string(splice.part_a) + " ends are out of sleeve reach");
        }
        result.warnings.push_back("part " + std::to_string(splice.part_a) + " spliced into a closed loop");
    }

    splice.bridge.reset();
    if (gap > splice.sleeve_length_mm) {
        WirePart bridge;
        bridge.kind = "bridge";
        bridge.path = Polyline3({pa, pb});
        splice.bridge = scene.add(std::move(bridge));
    }
    scene.splices.push_back(splice);
    result.scene = std::move(scene);
    return result;
}

Vec3 grasp_reference(const WirePart& part) {
    Vec3 sum = Vec3::Zero();
    if (!part.contacts.empty()) {
        for (const auto& c : part.contacts) sum += c.point;
        return sum / static_cast<double>(part.contacts.size());
    }
    for (const auto& p : part.path.points()) sum += p;
    return sum / static_cast<double>(part.path.size());
}

std::vector<OrientationWarning> check_orientation(const Scene& scene, const Vec3& gravity, double tolerance_mm) {
    if (!(gravity.norm() > 0.0)) throw InvalidInput("gravity must be a nonzero vector");
    const Vec3 up = -gravity.normalized();
    std::vector<OrientationWarning> out;
    for (std::size_t s = 0; s < scene.splices.size(); ++s) {
        const auto& sp = scene.splices[s];
        const WirePart* a = scene.find(sp.part_a);
        const WirePart* b = scene.find(sp.part_b);
        if (!a || !b) continue;
        const double ha = (a->endpoint(sp.end_a).point - grasp_reference(*a)).dot(up);
        const double hb = (b->endpoint(sp.end_b).point - grasp_reference(*b)).dot(up);
        const double delta = std::abs(ha - hb);
        if (delta <= tolerance_mm) continue;
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "parts %d and %d are joined %.3f mm out of level with their grasps; the held object will rotate",
                      sp.part_a, sp.part_b, delta);
        out.push_back({s, sp.part_a, sp.part_b, delta, msg});
    }
    return out;
}

double lever_arm_mm(const WirePart& part, const Vec3& load_point) {
    std::vector<Vec3> supports;
    for (auto i : part.anchors) supports.push_back(part.path[i]);
    if (supports.empty()) {
        supports.push_back(part.path.front());
        supports.push_back(part.path.back());
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : supports) best = std::min(best, (s - load_point).norm());
    return best;
}

double estimate_capacity(const WirePart& part, double wire_diameter_mm, const WireMaterial& material,
                         const Vec3& load_point, double calibration) {
    if (!(wire_diameter_mm > 0.0)) throw InvalidInput("wire diameter must be > 0");
    if (!(material.yield_strength_mpa > 0.0) || !(material.youngs_modulus_gpa > 0.0)) {
        throw InvalidInput("material constants must be > 0");
    }
    Vec3 lo = part.path.front();
    Vec3 hi = part.path.front();
    for (const auto& p : part.path.points()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Vec3 margin = Vec3::Constant(10.0);
    if ((load_point.array() < (lo - margin).array()).any() || (load_point.array() > (hi + margin).array()).any()) {
        throw InvalidInput("load point is outside the part's bounds");
    }
    const double lever = lever_arm_mm(part, load_point);
    if (!(lever > 1e-9)) throw InvalidInput("load point coincides with a support");

    const double section_modulus = std::numbers::pi * std::pow(wire_diameter_mm, 3) / 32.0;  // mm^3
    const double newtons = calibration * material.yield_strength_mpa * section_modulus / lever;
    return newtons / kStandardGravity * 1000.0;
}

ConnectorSpec reference_cup_holder_spec() {
    return {ConnectorKind::CupHolder, {{"cup_diameter_mm", 80.0}, {"edge_thickness_mm", 25.0}}};
}

Vec3 cup_load_point(const WirePart& cup_holder) {
    if (cup_holder.contacts.empty()) throw InvalidInput("part has no contacts");
    return cup_holder.contacts.back().point;
}

}  // namespace wirebend
