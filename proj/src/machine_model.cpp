#include "wirebend/machine_model.hpp"

#include "wirebend/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace wirebend {

SpringbackCurve::SpringbackCurve(std::vector<Sample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.commanded_deg) || !std::isfinite(s.actual_deg)) {
            throw InvalidInput("springback sample " + std::to_string(i) + " is not finite");
        }
        if (s.actual_deg < 0.0) {
            throw InvalidInput("springback sample " + std::to_string(i) + " has negative actual angle");
        }
        if (i > 0) {
            if (s.commanded_deg <= samples_[i - 1].commanded_deg) {
                throw InvalidInput("springback commanded angles must be strictly increasing");
            }
            if (s.actual_deg < samples_[i - 1].actual_deg) {
                throw InvalidInput("springback actual angles must be non-decreasing");
            }
        }
    }
}

SpringbackCurve default_aluminum_springback() {
    return SpringbackCurve({{15, 0}, {25, 12}, {35, 24}, {45, 36},
                            {55, 47}, {65, 58}, {75, 69}, {85, 80}});
}

void MachineProfile::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidInput(std::string(name) + " must be > 0");
        }
    };
    positive(die_diameter_mm, "die_diameter_mm");
    positive(pin_diameter_mm, "pin_diameter_mm");
    positive(wire_diameter_mm, "wire_diameter_mm");
    if (!(clearance_gap_mm >= 0.0) || !std::isfinite(clearance_gap_mm)) {
        throw InvalidInput("clearance_gap_mm must be >= 0");
    }
    if (!(min_plastic_deg > 0.0 && min_plastic_deg < max_bend_deg && max_bend_deg <= 180.0)) {
        throw InvalidInput("need 0 < min_plastic_deg < max_bend_deg <= 180");
    }
    if (springback.empty()) {
        throw InvalidInput("springback curve is empty");
    }
    const auto& first = springback.samples().front();
    if (first.commanded_deg != min_plastic_deg || first.actual_deg != 0.0) {
        throw InvalidInput("first springback sample must be (min_plastic_deg, 0)");
    }
}

double center_distance(const MachineProfile& p) {
    return p.die_diameter_mm / 2.0 + p.pin_diameter_mm / 2.0 + p.wire_diameter_mm + p.clearance_gap_mm;
}

double contact_distance(const MachineProfile& p) {
    return p.die_diameter_mm / 2.0 + p.pin_diameter_mm / 2.0 + p.wire_diameter_mm;
}

double tangency_angle_rad(const MachineProfile& p) {
    // CB <= CD always, so the ratio stays inside acos's domain.
    return std::acos(std::min(1.0, contact_distance(p) / center_distance(p)));
}

double min_feed(const MachineProfile& p) {
    if (p.clearance_gap_mm == 0.0) return 0.0;
    return center_distance(p) * std::sin(tangency_angle_rad(p));
}

std::string describe_min_feed(const MachineProfile& p) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "min_feed = CD*sin(acos(CB/CD)), CD=%.3f CB=%.3f -> %.3f mm",
                  center_distance(p), contact_distance(p), min_feed(p));
    return buf;
}

double actual_angle(const MachineProfile& p, double commanded_deg) {
    const auto& s = p.springback.samples();
    if (s.empty() || commanded_deg <= s.front().commanded_deg) return 0.0;
    if (commanded_deg >= s.back().commanded_deg) return s.back().actual_deg;
    const auto hi = std::upper_bound(s.begin(), s.end(), commanded_deg,
                                     [](double c, const auto& sample) { return c < sample.commanded_deg; });
    const auto lo = hi - 1;
    const double u = (commanded_deg - lo->commanded_deg) / (hi->commanded_deg - lo->commanded_deg);
    return lo->actual_deg + u * (hi->actual_deg - lo->actual_deg);
}

double max_actual_angle(const MachineProfile& p) { return actual_angle(p, p.max_bend_deg); }

double commanded_for(const MachineProfile& p, double target_actual_deg) {
    if (!(target_actual_deg >= 0.0)) {
        throw InvalidInput("target angle must be >= 0");
    }
    if (target_actual_deg == 0.0) return 0.0;
    const double reach = max_actual_angle(p);
    if (target_actual_deg > reach) throw TargetUnreachable(target_actual_deg, reach);

    const auto& s = p.springback.samples();
    // First sample whose actual angle reaches the target; interpolate on the
    // segment leading into it. The first sample has actual 0 < target, so hi > 0.
    const auto hi = std::lower_bound(s.begin(), s.end(), target_actual_deg,
                                     [](const auto& sample, double t) { return sample.actual_deg < t; });
    if (hi == s.end()) {
        // Only reachable when max_bend lies inside the table.
        throw TargetUnreachable(target_actual_deg, reach);
    }
    const auto lo = hi - 1;
    const double u = (target_actual_deg - lo->actual_deg) / (hi->actual_deg - lo->actual_deg);
    const double commanded = lo->commanded_deg + u * (hi->commanded_deg - lo->commanded_deg);
    return std::min(commanded, p.max_bend_deg);
}

nlohmann::json profile_to_json(const MachineProfile& p) {
    nlohmann::json curve = nlohmann::json::array();
    for (const auto& s : p.springback.samples()) curve.push_back({s.commanded_deg, s.actual_deg});
    return {
        {"version", kProfileSchemaVersion},
        {"die_diameter_mm", p.die_diameter_mm},
        {"pin_diameter_mm", p.pin_diameter_mm},
        {"wire_diameter_mm", p.wire_diameter_mm},
        {"clearance_gap_mm", p.clearance_gap_mm},
        {"max_bend_deg", p.max_bend_deg},
        {"min_plastic_deg", p.min_plastic_deg},
        {"springback", curve},
    };
}

MachineProfile profile_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {
        "version", "die_diameter_mm", "pin_diameter_mm", "wire_diameter_mm", "clearance_gap_mm",
        "max_bend_deg", "min_plastic_deg", "springback"};
    if (!j.is_object()) throw InvalidInput("profile must be a JSON object");
    if (!j.contains("version")) throw VersionError("profile has no version");
    if (j.at("version") != kProfileSchemaVersion) {
        throw VersionError("unsupported profile version " + j.at("version").dump());
    }
    for (const auto& [key, _] : j.items()) {
        if (!known.contains(key)) throw InvalidInput("unknown profile field '" + key + "'");
    }
    for (const auto& key : known) {
        if (!j.contains(key)) throw InvalidInput("profile is missing '" + key + "'");
    }
    try {
        MachineProfile p;
        p.die_diameter_mm = j.at("die_diameter_mm").get<double>();
        p.pin_diameter_mm = j.at("pin_diameter_mm").get<double>();
        p.wire_diameter_mm = j.at("wire_diameter_mm").get<double>();
        p.clearance_gap_mm = j.at("clearance_gap_mm").get<double>();
        p.max_bend_deg = j.at("max_bend_deg").get<double>();
        p.min_plastic_deg = j.at("min_plastic_deg").get<double>();
        std::vector<SpringbackCurve::Sample> samples;
        for (const auto& pair : j.at("springback")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw InvalidInput("springback entries must be [commanded, actual] pairs");
            }
            samples.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        p.springback = SpringbackCurve(std::move(samples));
        p.validate();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed profile: ") + e.what());
    }
}

MachineProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open profile " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse profile " + path.string() + ": " + e.what());
    }
    return profile_from_json(j);
}

}  // namespace wirebend
