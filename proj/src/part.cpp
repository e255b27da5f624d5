#include "wirebend/part.hpp"

#include "wirebend/errors.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace wirebend {

const char* to_string(ConnectorKind kind) {
    switch (kind) {
        case ConnectorKind::PegboardPin: return "PegboardPin";
        case ConnectorKind::TableEdgeClip: return "TableEdgeClip";
        case ConnectorKind::CylinderWrap: return "CylinderWrap";
        case ConnectorKind::Hook: return "Hook";
        case ConnectorKind::Clamp: return "Clamp";
        case ConnectorKind::CupHolder: return "CupHolder";
    }
    return "?";
}

ConnectorKind connector_kind_from_string(const std::string& name) {
    for (auto kind : {ConnectorKind::PegboardPin, ConnectorKind::TableEdgeClip, ConnectorKind::CylinderWrap,
                      ConnectorKind::Hook, ConnectorKind::Clamp, ConnectorKind::CupHolder}) {
        if (name == to_string(kind)) return kind;
    }
    throw InvalidInput("unknown connector kind '" + name + "'");
}

const char* to_string(End end) { return end == End::Start ? "start" : "end"; }

End end_from_string(const std::string& name) {
    if (name == "start") return End::Start;
    if (name == "end") return End::End;
    throw InvalidInput("endpoint must be 'start' or 'end', got '" + name + "'");
}

Endpoint WirePart::endpoint(End end) const {
    const auto& pts = path.points();
    if (end == End::Start) return {pts.front(), (pts[0] - pts[1]).normalized()};
    const auto n = pts.size();
    return {pts.back(), (pts[n - 1] - pts[n - 2]).normalized()};
}

WirePart WirePart::placed(const Mat3& rotation, const Vec3& translation) const {
    WirePart out = *this;
    out.path = path.transformed(rotation, translation);
    for (auto& c : out.contacts) {
        c.point = rotation * c.point + translation;
        c.normal = rotation * c.normal;
    }
    return out;
}

const WirePart* Scene::find(int label) const {
    const auto it = std::find_if(parts.begin(), parts.end(), [&](const auto& p) { return p.label == label; });
    return it == parts.end() ? nullptr : &*it;
}

WirePart* Scene::find(int label) {
    return const_cast<WirePart*>(std::as_const(*this).find(label));
}

int Scene::add(WirePart part) {
    part.label = next_label++;
    parts.push_back(std::move(part));
    return parts.back().label;
}

void Scene::validate() const {
    std::vector<Violation> problems;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].label != static_cast<int>(i) + 1) {
            problems.push_back({parts[i].label, "part", i, "labels must be dense from 1 in order"});
        }
        for (auto a : parts[i].anchors) {
            if (a >= parts[i].path.size()) {
                problems.push_back({parts[i].label, "vertex", a, "anchor index out of range"});
            }
        }
    }
    if (next_label != static_cast<int>(parts.size()) + 1) {
        problems.push_back({std::nullopt, "scene", 0, "next_label must follow the last part"});
    }
    std::set<std::pair<int, End>> used;
    auto claim = [&](std::size_t s, int label, End end) {
        if (!find(label)) {
            problems.push_back({label, "splice", s, "splice references a missing part"});
        } else if (!used.insert({label, end}).second) {
            problems.push_back({label, "splice", s, std::string("endpoint ") + to_string(end) + " is spliced twice"});
        }
    };
    for (std::size_t s = 0; s < splices.size(); ++s) {
        const auto& sp = splices[s];
        claim(s, sp.part_a, sp.end_a);
        claim(s, sp.part_b, sp.end_b);
        if (sp.bridge) {
            claim(s, *sp.bridge, End::Start);
            claim(s, *sp.bridge, End::End);
        }
    }
    if (!problems.empty()) throw ConstraintViolation(std::move(problems));
}

}  // namespace wirebend
