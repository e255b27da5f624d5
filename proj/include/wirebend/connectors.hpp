#pragma once

#include "wirebend/machine_model.hpp"
#include "wirebend/part.hpp"

#include <map>
#include <string>
#include <vector>

namespace wirebend {

// Default parameters for a connector kind. These are also the only
// parameter names generate() accepts for that kind.
//
//   PegboardPin   hole_spacing_mm, hole_diameter_mm, board_thickness_mm, arm_mm
//   TableEdgeClip edge_thickness_mm, depth_mm, grip_factor, drop_mm
//   CylinderWrap  object_diameter_mm, grip_factor, wrap_turns, lead_mm
//   Hook          opening_mm, shank_mm, lip_mm
//   Clamp         jaw_gap_mm, two_axis, jaw_length_mm, grip_factor, arm_mm
//   CupHolder     cup_diameter_mm, ring_drop_mm, grip_factor, edge_thickness_mm,
//                 arm_mm, hang_mm, depth_mm
const std::map<std::string, double>& connector_defaults(ConnectorKind kind);

// Spec params merged over the kind's defaults. Throws InvalidInput on unknown
// names, non-positive lengths or grip_factor outside (0, 0.15].
std::map<std::string, double> resolve_params(const ConnectorSpec& spec);

// Builds one single-wire connector in its local frame (+y up). Throws
// InfeasibleSpec when the parameters force a bend or feed the machine
// cannot make.
//
// Local frames:
//   CylinderWrap, CupHolder: ring axis is +y through the origin.
//   Clamp: held object occupies |x| <= jaw_gap/2, resting on y = 0.
//   TableEdgeClip: table top at y = 0, edge face at x = 0, table at x < 0.
//   PegboardPin: board front face at x = 0, upper hole at the origin.
//   Hook: shank along +y above the origin, opening toward +x.
//   CupHolder with edge_thickness_mm > 0: table edge face faces -x.
WirePart generate(const ConnectorSpec& spec, const MachineProfile& profile);

struct LinkResult {
    Scene scene;
    std::vector<std::string> warnings;
};

// Records the splice. Ends farther apart than the sleeve get a straight
// bridge part, added to the scene under the next label.
// Throws NotFound, EndpointOccupied or SelfSplice.
LinkResult link(Scene scene, Splice splice);

struct OrientationWarning {
    std::size_t splice_index = 0;
    int part_a = 0;
    int part_b = 0;
    double delta_mm = 0.0;
    std::string message;
};

inline constexpr double kOrientationToleranceMm = 2.0;

// Reference point of a part's grasp: centroid of its contacts, or of its
// vertices when it has none.
Vec3 grasp_reference(const WirePart& part);

// Compares the heights (along -gravity) of each spliced endpoint pair,
// each measured from its own part's grasp reference.
std::vector<OrientationWarning> check_orientation(const Scene& scene, const Vec3& gravity,
                                                  double tolerance_mm = kOrientationToleranceMm);

struct WireMaterial {
    double youngs_modulus_gpa = 69.0;
    double yield_strength_mpa = 95.0;
};

// Dimensionless constant of the capacity estimator, calibrated once so that
// the reference cup holder (see reference_cup_holder_spec) reads 351 g.
inline constexpr double kCapacityCalibration = 8.1485;

inline constexpr double kStandardGravity = 9.80665;

// Yield-limited cantilever estimate in grams-force:
//   calibration * yield * (pi d^3 / 32) / L
// with L the distance from the load point to the nearest anchor vertex (or
// endpoint, for parts without anchors). This is an indication, not a
// structural analysis; stiffness does not enter the yield limit.
double estimate_capacity(const WirePart& part, double wire_diameter_mm, const WireMaterial& material,
                         const Vec3& load_point, double calibration = kCapacityCalibration);

// Lever arm used by estimate_capacity.
double lever_arm_mm(const WirePart& part, const Vec3& load_point);

// Cup holder hung over a table edge: ring, under-support and edge clip.
ConnectorSpec reference_cup_holder_spec();
// Where a held cup's weight acts on a CupHolder: its under-support contact,
// which generate() stores last.
Vec3 cup_load_point(const WirePart& cup_holder);

}  // namespace wirebend
