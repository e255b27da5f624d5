#pragma once

#include "wirebend/connectors.hpp"
#include "wirebend/geometry.hpp"
#include "wirebend/machine_model.hpp"
#include "wirebend/part.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path source_dir() { return WIREBEND_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& name) { return source_dir() / "fixtures" / name; }
inline std::filesystem::path golden(const std::string& name) { return source_dir() / "tests" / "golden" / name; }

// fixtures/m.json: D1=20, D2=10, D3=1.6, G=2.
inline wirebend::MachineProfile machine() { return wirebend::load_profile(fixture("m.json")); }

inline wirebend::Polyline3 line(std::initializer_list<wirebend::Vec3> pts) {
    return wirebend::Polyline3(std::vector<wirebend::Vec3>(pts));
}

// Planar spiral with three consecutive 90 degree bends in the same direction.
inline wirebend::Polyline3 staircase() {
    return line({{0, 0, 0}, {20, 0, 0}, {20, 20, 0}, {0, 20, 0}, {0, 5, 0}});
}

// Pegboard pin and a CylinderWrap handle mount 150 mm to its right, linked
// end-to-start; the gap is bridged by a third part.
inline wirebend::Scene walkthrough_scene(const wirebend::MachineProfile& profile) {
    using namespace wirebend;
    Scene scene;
    scene.add(generate({ConnectorKind::PegboardPin, {}}, profile));
    scene.add(generate({ConnectorKind::CylinderWrap, {}}, profile).placed(Mat3::Identity(), Vec3(150, 0, 0)));
    Splice s;
    s.part_a = 1;
    s.end_a = End::End;
    s.part_b = 2;
    s.end_b = End::Start;
    return link(scene, s).scene;
}

}  // namespace testing
