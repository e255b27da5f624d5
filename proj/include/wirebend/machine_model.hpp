#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace wirebend {

// Measured (commanded, actual) bend angle pairs in degrees. The first sample
// marks the end of the elastic dead zone: its actual angle is 0.
class SpringbackCurve {
public:
    struct Sample {
        double commanded_deg;
        double actual_deg;
        bool operator==(const Sample&) const = default;
    };

    SpringbackCurve() = default;
    explicit SpringbackCurve(std::vector<Sample> samples);

    const std::vector<Sample>& samples() const { return samples_; }
    bool empty() const { return samples_.empty(); }

    bool operator==(const SpringbackCurve&) const = default;

private:
    std::vector<Sample> samples_;
};

// Placeholder calibration for 1.6 mm aluminum. Only the (15, 0) dead-zone
// anchor is measured; the remaining points should be replaced by a
// recalibration of the actual machine.
SpringbackCurve default_aluminum_springback();

inline constexpr double kAluminumWireDiameterMm = 1.6;

// Bender head geometry, angle limits and springback of one machine + wire.
struct MachineProfile {
    double die_diameter_mm = 0.0;   // D1
    double pin_diameter_mm = 0.0;   // D2
    double wire_diameter_mm = kAluminumWireDiameterMm;  // D3
    double clearance_gap_mm = 0.0;  // G
    double max_bend_deg = 180.0;
    double min_plastic_deg = 15.0;
    SpringbackCurve springback;

    // Throws InvalidInput when any invariant is broken.
    void validate() const;

    bool operator==(const MachineProfile&) const = default;
};

// CD = D1/2 + D2/2 + D3 + G
double center_distance(const MachineProfile& profile);
// CB = D1/2 + D2/2 + D3
double contact_distance(const MachineProfile& profile);
// A = acos(CB / CD), radians
double tangency_angle_rad(const MachineProfile& profile);

// Shortest feed between two consecutive bends: CD * sin(A).
double min_feed(const MachineProfile& profile);

// Human-readable statement of the minimum-feed formula and its value.
std::string describe_min_feed(const MachineProfile& profile);

// Angle the wire keeps after springback for a commanded bend magnitude.
double actual_angle(const MachineProfile& profile, double commanded_deg);

// Largest angle the machine can leave in the wire.
double max_actual_angle(const MachineProfile& profile);

// Commanded magnitude that leaves `target_actual_deg` in the wire. Throws
// TargetUnreachable beyond max_actual_angle().
double commanded_for(const MachineProfile& profile, double target_actual_deg);

// Profile files: {"version": 1, <field names>, "springback": [[c, a], ...]}.
inline constexpr int kProfileSchemaVersion = 1;
nlohmann::json profile_to_json(const MachineProfile& profile);
MachineProfile profile_from_json(const nlohmann::json& j);
MachineProfile load_profile(const std::filesystem::path& path);

}  // namespace wirebend
