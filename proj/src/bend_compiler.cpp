#include "wirebend/bend_compiler.hpp"

#include "wirebend/errors.hpp"

#include <cmath>
#include <string>

namespace wirebend {

namespace {

// Rotations smaller than this are numerical noise of a planar section.
constexpr double kZeroRotateDeg = 1e-9;
// Rotations beyond +-90 are folded into a reversed bend; the margin keeps
// exact 90-degree twists stable under round-off.
constexpr double kFoldMarginDeg = 1e-7;
// Slack for limits checked on computed angles and lengths.
constexpr double kLimitSlack = 1e-9;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

const char* to_string(Instruction::Kind kind) {
    switch (kind) {
        case Instruction::Kind::Feed: return "FEED";
        case Instruction::Kind::Rotate: return "ROTATE";
        case Instruction::Kind::Bend: return "BEND";
    }
    return "?";
}

BendProgram::BendProgram(std::vector<Instruction> instructions) : instructions_(std::move(instructions)) {
    validate();
}

std::size_t BendProgram::bend_count() const {
    std::size_t n = 0;
    for (const auto& ins : instructions_) n += ins.kind == Instruction::Kind::Bend;
    return n;
}

double BendProgram::total_feed() const {
    double total = 0.0;
    for (const auto& ins : instructions_) {
        if (ins.kind == Instruction::Kind::Feed) total += ins.value;
    }
    return total;
}

void BendProgram::validate() const {
    using K = Instruction::Kind;
    if (instructions_.empty()) throw ConstraintViolation("program", 0, "program must start with FEED");
    if (instructions_.front().kind != K::Feed) {
        throw ConstraintViolation("program", 0, "program must start with FEED");
    }
    if (instructions_.back().kind != K::Feed) {
        throw ConstraintViolation("program", instructions_.size() - 1, "program must end with FEED");
    }
    for (std::size_t i = 0; i < instructions_.size(); ++i) {
        const auto& ins = instructions_[i];
        if (!std::isfinite(ins.value)) throw ConstraintViolation("program", i, "value is not finite");
        if (i > 0 && instructions_[i - 1].kind == ins.kind) {
            throw ConstraintViolation("program", i, std::string("two consecutive ") + to_string(ins.kind));
        }
        switch (ins.kind) {
            case K::Feed:
                if (!(ins.value > 0.0)) throw ConstraintViolation("program", i, "FEED must be > 0");
                break;
            case K::Rotate:
                if (!(ins.value > -180.0 && ins.value <= 180.0)) {
                    throw ConstraintViolation("program", i, "ROTATE must be in (-180, 180]");
                }
                break;
            case K::Bend:
                if (ins.value == 0.0 || std::abs(ins.value) > 180.0) {
                    throw ConstraintViolation("program", i, "BEND must be nonzero and within 180");
                }
                break;
        }
    }
}

void BendProgram::validate(const MachineProfile& profile) const {
    validate();
    for (std::size_t i = 0; i < instructions_.size(); ++i) {
        const auto& ins = instructions_[i];
        if (ins.kind == Instruction::Kind::Bend && std::abs(ins.value) > profile.max_bend_deg + kLimitSlack) {
            throw ConstraintViolation("program", i, "BEND exceeds max_bend_deg " + fmt(profile.max_bend_deg));
        }
    }
}

void check_compilable(const Polyline3& path, const MachineProfile& profile) {
    const auto turns = path.turn_angles();
    for (std::size_t k = 0; k < turns.size(); ++k) {
        if (turns[k] < profile.min_plastic_deg - kLimitSlack) {
            throw ConstraintViolation("vertex", k + 1,
                                      "turn " + fmt(turns[k]) + " deg below minimum " + fmt(profile.min_plastic_deg));
        }
        if (turns[k] > profile.max_bend_deg + kLimitSlack) {
            throw ConstraintViolation("vertex", k + 1,
                                      "turn " + fmt(turns[k]) + " deg above maximum " + fmt(profile.max_bend_deg));
        }
    }
    if (turns.empty()) return;
    const double feed = min_feed(profile);
    for (std::size_t s = 0; s < path.segment_count(); ++s) {
        if (path.segment_length(s) < feed - kLimitSlack) {
            throw ConstraintViolation("segment", s,
                                      "length " + fmt(path.segment_length(s)) + " mm below min feed " + fmt(feed));
        }
    }
}

BendProgram compile(const Polyline3& path, const MachineProfile& profile) {
    check_compilable(path, profile);

    std::vector<Instruction> out;
    out.push_back(Instruction::feed(path.segment_length(0)));

    Vec3 axis = Vec3::Zero();  // bend axis (+z of the bend frame); unset until the first bend
    for (std::size_t v = 1; v + 1 < path.size(); ++v) {
        const Vec3 incoming = path.direction(v - 1);
        const Vec3 outgoing = path.direction(v);
        const double turn = angle_between_deg(incoming, outgoing);
        Vec3 normal = incoming.cross(outgoing);
        if (normal.norm() < 1e-12) {
            // Full reversal: any plane containing the wire works; keep the current one.
            normal = axis.isZero() ? any_perpendicular(incoming) : axis;
        }
        normal.normalize();

        double sign = 1.0;
        if (axis.isZero()) {
            axis = normal;
        } else {
            double twist = signed_angle_deg(axis, normal, incoming);
            if (twist > 90.0 + kFoldMarginDeg) {
                twist -= 180.0;
                sign = -1.0;
            } else if (twist < -90.0 - kFoldMarginDeg) {
                twist += 180.0;
                sign = -1.0;
            }
            if (std::abs(twist) > kZeroRotateDeg) out.push_back(Instruction::rotate(twist));
            axis = sign * normal;
        }
        out.push_back(Instruction::bend(sign * turn));
        out.push_back(Instruction::feed(path.segment_length(v)));
    }
    return BendProgram(std::move(out));
}

Polyline3 simulate(const BendProgram& program, const MachineProfile& profile, bool with_springback) {
    program.validate();
    Vec3 position = Vec3::Zero();
    Mat3 frame = Mat3::Identity();  // columns: feed axis, in-plane normal, bend axis
    std::vector<Vec3> points{position};
    for (const auto& ins : program.instructions()) {
        switch (ins.kind) {
            case Instruction::Kind::Feed:
                position += ins.value * frame.col(0);
                points.push_back(position);
                break;
            case Instruction::Kind::Rotate:
                frame = axis_rotation(frame.col(0), ins.value) * frame;
                break;
            case Instruction::Kind::Bend: {
                double angle = ins.value;
                if (with_springback) angle = std::copysign(actual_angle(profile, std::abs(angle)), angle);
                if (angle != 0.0) frame = axis_rotation(frame.col(2), angle) * frame;
                break;
            }
        }
    }
    return Polyline3(std::move(points));
}

BendProgram compensate(const BendProgram& program, const MachineProfile& profile) {
    program.validate();
    std::vector<Instruction> out = program.instructions();
    std::size_t bend = 0;
    for (auto& ins : out) {
        if (ins.kind != Instruction::Kind::Bend) continue;
        try {
            ins.value = std::copysign(commanded_for(profile, std::abs(ins.value)), ins.value);
        } catch (const TargetUnreachable&) {
            throw TargetUnreachable(std::abs(ins.value), max_actual_angle(profile), bend);
        }
        ++bend;
    }
    return BendProgram(std::move(out));
}

}  // namespace wirebend
