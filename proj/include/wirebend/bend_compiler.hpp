#pragma once

#include "wirebend/geometry.hpp"
#include "wirebend/machine_model.hpp"

#include <cstddef>
#include <vector>

namespace wirebend {

// FEED advances the wire along its own axis, ROTATE twists it about the feed
// axis (right-handed), BEND turns the emerging wire about +z of the current
// bend frame (positive = counter-clockwise).
struct Instruction {
    enum class Kind { Feed, Rotate, Bend };

    Kind kind = Kind::Feed;
    double value = 0.0;  // mm for FEED, degrees otherwise

    static Instruction feed(double mm) { return {Kind::Feed, mm}; }
    static Instruction rotate(double deg) { return {Kind::Rotate, deg}; }
    static Instruction bend(double deg) { return {Kind::Bend, deg}; }

    bool operator==(const Instruction&) const = default;
};

const char* to_string(Instruction::Kind kind);

class BendProgram {
public:
    BendProgram() = default;
    explicit BendProgram(std::vector<Instruction> instructions);

    const std::vector<Instruction>& instructions() const { return instructions_; }
    std::size_t size() const { return instructions_.size(); }
    bool empty() const { return instructions_.empty(); }
    std::size_t bend_count() const;
    double total_feed() const;

    // Structural invariants: starts and ends with FEED, no two consecutive
    // instructions of one kind, FEED > 0, BEND nonzero with |BEND| <= 180,
    // ROTATE in (-180, 180]. Throws ConstraintViolation.
    void validate() const;
    // Adds the machine's bend limit on top of validate().
    void validate(const MachineProfile& profile) const;

    bool operator==(const BendProgram&) const = default;

private:
    std::vector<Instruction> instructions_;
};

// Throws ConstraintViolation naming the first vertex or segment that breaks
// the machine's feed and bend limits.
void check_compilable(const Polyline3& path, const MachineProfile& profile);

BendProgram compile(const Polyline3& path, const MachineProfile& profile);

// Forward kinematics from the origin feeding along +x, first bend about +z.
Polyline3 simulate(const BendProgram& program, const MachineProfile& profile, bool with_springback);

// Replaces every BEND target with the commanded angle that springs back to
// it. Apply once, to target programs.
BendProgram compensate(const BendProgram& program, const MachineProfile& profile);

}  // namespace wirebend
