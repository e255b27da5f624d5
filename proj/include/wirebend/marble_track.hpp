#pragma once

#include "wirebend/machine_model.hpp"
#include "wirebend/part.hpp"

#include <array>
#include <vector>

namespace wirebend {

struct TrackSpec {
    Polyline3 center_path{std::vector<Vec3>{Vec3::Zero(), Vec3(100.0, 0.0, 0.0)}};
    double marble_diameter_mm = 16.0;
    double clip_spacing_mm = 50.0;
    double rail_contact_deg = 45.0;
};

// Rails are ordered upper-left, upper-right, lower-left, lower-right
// (left = +binormal side when looking along the track).
struct Track {
    std::array<Polyline3, 4> rails{placeholder(), placeholder(), placeholder(), placeholder()};
    std::vector<Polyline3> supports;
    std::vector<ClipMount> clips;
    double upper_gauge_mm = 0.0;

private:
    static Polyline3 placeholder() { return Polyline3(std::vector<Vec3>{Vec3::Zero(), Vec3::UnitX()}); }
};

// Lateral distance between the two upper rails so a marble seats on them at
// the contact angle.
double upper_gauge_mm(const TrackSpec& spec);

// Arc-length stations every `spacing` from the start, plus the end.
std::vector<double> clip_stations(double length_mm, double spacing_mm);

// Four-rail channel along the centre path (the midline of the upper rails),
// zig-zag support towers down to the floor (y = 0) at the start of every
// segment, and clip mounts along the arc length. Throws InfeasibleTrack when
// the path bends tighter than marble radius + wire radius.
Track generate_track(const TrackSpec& spec, const MachineProfile& profile);

}  // namespace wirebend
