#pragma once

#include "wirebend/geometry.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wirebend {

enum class ConnectorKind { PegboardPin, TableEdgeClip, CylinderWrap, Hook, Clamp, CupHolder };

const char* to_string(ConnectorKind kind);
ConnectorKind connector_kind_from_string(const std::string& name);

// Parametric recipe for one connector. Missing parameters take the kind's
// defaults; flags are stored as 0/1.
struct ConnectorSpec {
    ConnectorKind kind = ConnectorKind::Hook;
    std::map<std::string, double> params;

    bool operator==(const ConnectorSpec&) const = default;
};

// Where a held object touches the wire; the normal points from the wire
// toward the object.
struct Contact {
    Vec3 point = Vec3::Zero();
    Vec3 normal = Vec3::UnitY();
    bool operator==(const Contact&) const = default;
};

enum class End { Start, End };

const char* to_string(End end);
End end_from_string(const std::string& name);

struct Endpoint {
    Vec3 point;
    Vec3 tangent;  // unit, pointing out of the wire
};

// One fabricable piece of wire.
struct WirePart {
    int label = 0;
    std::string kind = "drawn";          // drawn | connector | bridge | rail | support
    Polyline3 path{std::vector<Vec3>{Vec3::Zero(), Vec3::UnitX()}};
    std::vector<Contact> contacts;       // grasp contacts with the held object
    std::vector<std::size_t> anchors;    // vertices that bear on a fixed support
    std::optional<ConnectorSpec> spec;

    Endpoint endpoint(End end) const;

    // Rigid placement: rotation about the origin, then translation.
    WirePart placed(const Mat3& rotation, const Vec3& translation) const;

    bool operator==(const WirePart&) const = default;
};

// Crimp sleeve joining two wire ends. When the ends are farther apart than
// the sleeve, `bridge` names the straight part synthesized between them.
struct Splice {
    int part_a = 0;
    End end_a = End::End;
    int part_b = 0;
    End end_b = End::Start;
    double sleeve_length_mm = 20.0;
    std::optional<int> bridge;

    bool operator==(const Splice&) const = default;
};

// 3D-printed clip position along a marble track, with its frame
// (tangent, normal, binormal as columns).
struct ClipMount {
    Vec3 point = Vec3::Zero();
    Mat3 frame = Mat3::Identity();
    double arc_length_mm = 0.0;
    bool operator==(const ClipMount&) const = default;
};

struct Scene {
    std::vector<WirePart> parts;
    std::vector<Splice> splices;
    std::vector<ClipMount> clips;
    int next_label = 1;
    std::string profile_ref = "default";

    const WirePart* find(int label) const;
    WirePart* find(int label);

    // Appends the part under the next free label and returns that label.
    int add(WirePart part);

    // Labels dense from 1, next_label consistent, splice references valid,
    // no endpoint in two splices. Throws ConstraintViolation.
    void validate() const;

    bool operator==(const Scene&) const = default;
};

}  // namespace wirebend
