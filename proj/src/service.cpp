#include "wirebend/service.hpp"

#include "wirebend/connectors.hpp"
#include "wirebend/errors.hpp"
#include "wirebend/marble_track.hpp"
#include "wirebend/path_kernel.hpp"
#include "wirebend/scene_io.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace wirebend {

using nlohmann::json;

namespace {

Response reply(int status, const json& body) { return {status, body.dump()}; }

Response error_reply(int status, const std::string& kind, const std::string& message) {
    return reply(status, {{"error", kind}, {"message", message}});
}

json violations_json(const ConstraintViolation& e) {
    json out = json::array();
    for (const auto& v : e.violations()) {
        json item = {{"element", v.element}, {"index", v.index}, {"rule", v.rule}};
        item["part"] = v.part ? json(*v.part) : json(nullptr);
        out.push_back(item);
    }
    return out;
}

std::vector<std::string> path_parts(const std::string& path) {
    std::vector<std::string> out;
    std::stringstream ss(path);
    std::string item;
    while (std::getline(ss, item, '/')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    try {
        return json::parse(body);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("body is not valid JSON: ") + e.what());
    }
}

int parse_label(const std::string& text) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw NotFound("no part '" + text + "'");
}

double query_double(const Request& r, const std::string& key, double fallback) {
    const auto it = r.query.find(key);
    if (it == r.query.end()) return fallback;
    try {
        std::size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used == it->second.size()) return v;
    } catch (const std::exception&) {
    }
    throw InvalidInput("query parameter " + key + " must be a number");
}

Vec3 query_vec(const Request& r, const std::string& key, const Vec3& fallback) {
    const auto it = r.query.find(key);
    if (it == r.query.end()) return fallback;
    std::stringstream ss(it->second);
    std::string field;
    std::vector<double> v;
    while (std::getline(ss, field, ',')) {
        try {
            v.push_back(std::stod(field));
        } catch (const std::exception&) {
            throw InvalidInput("query parameter " + key + " must be x,y,z");
        }
    }
    if (v.size() != 3) throw InvalidInput("query parameter " + key + " must be x,y,z");
    return {v[0], v[1], v[2]};
}

Vec3 json_vec(const json& j) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput("expected [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Optional placement: "rotation" as 3 rows, "translation" as [x, y, z].
WirePart place(const WirePart& part, const json& body) {
    Mat3 r = Mat3::Identity();
    Vec3 t = Vec3::Zero();
    if (body.contains("rotation")) {
        const auto& rows = body.at("rotation");
        if (!rows.is_array() || rows.size() != 3) throw InvalidInput("rotation must be 3 rows");
        for (int i = 0; i < 3; ++i) r.row(i) = json_vec(rows[i]).transpose();
        if ((r * r.transpose() - Mat3::Identity()).norm() > 1e-6 || r.determinant() < 0.0) {
            throw InvalidInput("rotation must be a proper orthonormal matrix");
        }
    }
    if (body.contains("translation")) t = json_vec(body.at("translation"));
    return part.placed(r, t);
}

const char* conflict_kind(ConflictKind k) {
    switch (k) {
        case ConflictKind::Proximity: return "proximity";
        case ConflictKind::Sweep: return "sweep";
        case ConflictKind::Both: return "both";
    }
    return "?";
}

// Anchors that survive a path edit are the ones whose vertex still exists.
std::vector<std::size_t> remap_anchors(const WirePart& before, const Polyline3& after) {
    std::vector<std::size_t> out;
    for (auto a : before.anchors) {
        const auto& p = before.path[a];
        for (std::size_t i = 0; i < after.size(); ++i) {
            if (after[i] == p) {
                out.push_back(i);
                break;
            }
        }
    }
    return out;
}

}  // namespace

Service::Service(MachineProfile profile) : profile_(std::move(profile)) { profile_.validate(); }

std::shared_ptr<Service::Session> Service::session(const std::string& id) {
    std::lock_guard lock(sessions_mutex_);
    auto& slot = sessions_[id];
    if (!slot) slot = std::make_shared<Session>();
    return slot;
}

Scene Service::scene(const std::string& id) {
    auto s = session(id);
    std::shared_lock lock(s->mutex);
    return s->scene;
}

std::size_t Service::undo_depth(const std::string& id) {
    auto s = session(id);
    std::shared_lock lock(s->mutex);
    return s->undo.size();
}

Response Service::handle(const Request& request) {
    try {
        return dispatch(request);
    } catch (const ConstraintViolation& e) {
        return reply(409, {{"error", "ConstraintViolation"}, {"message", e.what()}, {"violations", violations_json(e)}});
    } catch (const EndpointOccupied& e) {
        return error_reply(409, "EndpointOccupied", e.what());
    } catch (const SelfSplice& e) {
        return error_reply(409, "SelfSplice", e.what());
    } catch (const NotFound& e) {
        return error_reply(404, "NotFound", e.what());
    } catch (const InfeasibleSpec& e) {
        return error_reply(422, "InfeasibleSpec", e.what());
    } catch (const InfeasibleTrack& e) {
        return error_reply(422, "InfeasibleTrack", e.what());
    } catch (const Unsimplifiable& e) {
        return error_reply(422, "Unsimplifiable", e.what());
    } catch (const VersionError& e) {
        return error_reply(400, "VersionError", e.what());
    } catch (const InvalidInput& e) {
        return error_reply(400, "InvalidInput", e.what());
    } catch (const json::exception& e) {
        return error_reply(400, "InvalidInput", e.what());
    } catch (const std::exception& e) {
        return error_reply(500, "InternalError", e.what());
    }
}

Response Service::dispatch(const Request& req) {
    const auto parts = path_parts(req.path);
    auto s = session(req.session);

    // Runs `edit` on a copy of the scene; the old scene goes on the undo
    // stack only if the edit succeeds.
    auto mutate = [&](const std::function<std::vector<std::string>(Scene&)>& edit) {
        std::unique_lock lock(s->mutex);
        Scene next = s->scene;
        const auto warnings = edit(next);
        s->undo.push_back(std::move(s->scene));
        if (s->undo.size() > kUndoDepth) s->undo.pop_front();
        s->scene = std::move(next);
        return reply(200, {{"scene", scene_to_json(s->scene)}, {"warnings", warnings}});
    };
    auto route = [&](const char* method, std::initializer_list<const char*> shape) {
        if (req.method != method || parts.size() != shape.size()) return false;
        std::size_t i = 0;
        for (const char* seg : shape) {
            if (std::string(seg) != "*" && parts[i] != seg) return false;
            ++i;
        }
        return true;
    };

    if (route("GET", {"scene"})) {
        std::shared_lock lock(s->mutex);
        return reply(200, scene_to_json(s->scene));
    }
    if (route("GET", {"profile"})) {
        json j = profile_to_json(profile_);
        j["min_feed_mm"] = min_feed(profile_);
        return reply(200, j);
    }
    if (route("POST", {"scene"})) {
        const Scene incoming = scene_from_json(parse_body(req.body));
        return mutate([&](Scene& scene) {
            scene = incoming;
            return std::vector<std::string>{};
        });
    }
    if (route("POST", {"parts"})) {
        const json body = parse_body(req.body);
        if (!body.is_object()) throw InvalidInput("body must be a JSON object");
        WirePart part;
        if (body.contains("points")) {
            static const std::set<std::string> kinds = {"drawn", "connector", "bridge", "rail", "support"};
            part.path = polyline_from_json(body.at("points"));
            part.kind = body.value("kind", std::string("drawn"));
            if (!kinds.count(part.kind)) throw InvalidInput("unknown part kind '" + part.kind + "'");
        } else {
            json spec = body.contains("spec") ? body.at("spec") : json{{"kind", body.at("kind")}};
            if (!body.contains("spec") && body.contains("params")) spec["params"] = body.at("params");
            part = generate(spec_from_json(spec), profile_);
        }
        part = place(part, body);
        return mutate([&](Scene& scene) {
            scene.add(part);
            return std::vector<std::string>{};
        });
    }
    if (route("POST", {"parts", "*", "simplify"})) {
        const int label = parse_label(parts[1]);
        const json body = parse_body(req.body);
        SimplifyParams params = SimplifyParams::for_profile(profile_);
        params.smoothing_strength = body.value("smoothing_strength", 0.0);
        params.min_reduction_ratio = body.value("min_reduction_ratio", 0.0);
        params.validate();
        return mutate([&](Scene& scene) {
            WirePart* part = scene.find(label);
            if (!part) throw NotFound("no part " + std::to_string(label));
            const Polyline3 simplified = simplify(part->path, params);
            part->anchors = remap_anchors(*part, simplified);
            part->path = simplified;
            return std::vector<std::string>{};
        });
    }
    if (route("POST", {"links"})) {
        const Splice splice = splice_from_json(parse_body(req.body));
        return mutate([&](Scene& scene) {
            auto result = link(std::move(scene), splice);
            scene = std::move(result.scene);
            return result.warnings;
        });
    }
    if (route("GET", {"conflicts"})) {
        const double threshold = query_double(req, "threshold_deg", profile_.max_bend_deg);
        const double proximity = query_double(req, "proximity_mm", default_proximity_mm(profile_));
        std::optional<int> only;
        if (req.query.count("part")) only = parse_label(req.query.at("part"));
        std::shared_lock lock(s->mutex);
        if (only && !s->scene.find(*only)) throw NotFound("no part " + std::to_string(*only));
        json out = json::array();
        for (const auto& part : s->scene.parts) {
            if (only && part.label != *only) continue;
            for (const auto& c : detect_conflicts(part.path, threshold, proximity).conflicts) {
                out.push_back({
                    {"part", part.label},
                    {"segment_a", c.segment_a},
                    {"segment_b", c.segment_b},
                    {"closest_a", {c.closest_a.x(), c.closest_a.y(), c.closest_a.z()}},
                    {"closest_b", {c.closest_b.x(), c.closest_b.y(), c.closest_b.z()}},
                    {"min_distance_mm", c.min_distance_mm},
                    {"kind", conflict_kind(c.kind)},
                    {"swept_deg", c.swept_deg},
                });
            }
        }
        return reply(200, {{"conflicts", out}});
    }
    if (route("GET", {"warnings", "orientation"})) {
        const Vec3 gravity = query_vec(req, "gravity", -Vec3::UnitY());
        const double tol = query_double(req, "tolerance_mm", kOrientationToleranceMm);
        std::shared_lock lock(s->mutex);
        json out = json::array();
        for (const auto& w : check_orientation(s->scene, gravity, tol)) {
            out.push_back({{"splice", w.splice_index},
                           {"part_a", w.part_a},
                           {"part_b", w.part_b},
                           {"delta_mm", w.delta_mm},
                           {"message", w.message}});
        }
        return reply(200, {{"warnings", out}});
    }
    if (route("POST", {"track"})) {
        const json body = parse_body(req.body);
        TrackSpec spec;
        spec.center_path = polyline_from_json(body.at("center_path"));
        spec.marble_diameter_mm = body.value("marble_diameter_mm", spec.marble_diameter_mm);
        spec.clip_spacing_mm = body.value("clip_spacing_mm", spec.clip_spacing_mm);
        spec.rail_contact_deg = body.value("rail_contact_deg", spec.rail_contact_deg);
        const Track track = generate_track(spec, profile_);
        return mutate([&](Scene& scene) {
            for (const auto& rail : track.rails) {
                WirePart p;
                p.kind = "rail";
                p.path = rail;
                scene.add(p);
            }
            for (const auto& support : track.supports) {
                WirePart p;
                p.kind = "support";
                p.path = support;
                scene.add(p);
            }
            scene.clips.insert(scene.clips.end(), track.clips.begin(), track.clips.end());
            return std::vector<std::string>{};
        });
    }
    if (route("POST", {"export"})) {
        const json body = parse_body(req.body);
        const auto format = export_format_from_string(body.value("format", std::string("coords")));
        const bool header = body.value("header", false);
        std::shared_lock lock(s->mutex);
        const auto bundle = export_assembly(s->scene, profile_, format, header);
        return reply(200, {{"files", bundle.files}, {"plan", plan_to_json(bundle.plan)}});
    }
    if (route("POST", {"undo"})) {
        std::unique_lock lock(s->mutex);
        if (s->undo.empty()) return error_reply(409, "NothingToUndo", "undo history is empty");
        s->scene = std::move(s->undo.back());
        s->undo.pop_back();
        return reply(200, {{"scene", scene_to_json(s->scene)}, {"warnings", json::array()}});
    }

    static const std::set<std::string> known = {"scene", "profile", "parts", "links", "conflicts", "warnings", "track",
                                                "export", "undo"};
    if (!parts.empty() && known.count(parts[0])) {
        return error_reply(req.method == "GET" || req.method == "POST" ? 404 : 405, "NotFound",
                           req.method + " " + req.path + " is not an endpoint");
    }
    return error_reply(404, "NotFound", "no route " + req.path);
}

}  // namespace wirebend
