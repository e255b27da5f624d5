#include "support.hpp"

#include "wirebend/bend_compiler.hpp"
#include "wirebend/errors.hpp"
#include "wirebend/roundtrip.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace wirebend;
using testing::line;
using K = Instruction::Kind;

namespace {

// Rigid map built from the first non-collinear triple of each path; does
// not share code with rigid_align.
double frame_alignment_error(const Polyline3& a, const Polyline3& b) {
    auto frame = [](const Polyline3& p) {
        const Vec3 x = (p[1] - p[0]).normalized();
        Vec3 y = Vec3::Zero();
        for (std::size_t i = 2; i < p.size() && y.norm() < 1e-9; ++i) {
            y = (p[i] - p[0]) - (p[i] - p[0]).dot(x) * x;
        }
        if (y.norm() < 1e-9) y = x.unitOrthogonal();
        y.normalize();
        Mat3 f;
        f << x, y, x.cross(y);
        return f;
    };
    const Mat3 fa = frame(a), fb = frame(b);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec3 mapped = fb * (fa.transpose() * (a[i] - a[0])) + b[0];
        worst = std::max(worst, (mapped - b[i]).norm());
    }
    return worst;
}

void check_program(const BendProgram& p, const std::vector<Instruction>& want) {
    REQUIRE(p.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(p.instructions()[i].kind == want[i].kind);
        CHECK(p.instructions()[i].value == doctest::Approx(want[i].value).epsilon(1e-12));
    }
}

}  // namespace

TEST_CASE("compile examples") {
    const auto m = testing::machine();
    check_program(compile(line({{0, 0, 0}, {10, 0, 0}}), m), {Instruction::feed(10)});
    check_program(compile(line({{0, 0, 0}, {10, 0, 0}, {10, 10, 0}}), m),
                  {Instruction::feed(10), Instruction::bend(90), Instruction::feed(10)});
    const auto corner = line({{0, 0, 0}, {10, 0, 0}, {10, 10, 0}, {10, 10, 10}});
    const auto program = compile(corner, m);
    check_program(program, {Instruction::feed(10), Instruction::bend(90), Instruction::feed(10), Instruction::rotate(90),
                            Instruction::bend(90), Instruction::feed(10)});
    CHECK(frame_alignment_error(simulate(program, m, false), corner) < 1e-12);
}

TEST_CASE("compile refuses paths the machine cannot make") {
    const auto m = testing::machine();
    try {
        compile(line({{0, 0, 0}, {10, 0, 0}, {10, 5, 0}, {20, 5, 0}}), m);
        FAIL("expected a violation");
    } catch (const ConstraintViolation& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].element == "segment");
        CHECK(e.violations()[0].index == 1);
    }
    const double a = deg_to_rad(10);
    try {
        compile(line({{0, 0, 0}, {20, 0, 0}, {20 + 20 * std::cos(a), 20 * std::sin(a), 0}}), m);
        FAIL("expected a violation");
    } catch (const ConstraintViolation& e) {
        CHECK(e.violations()[0].element == "vertex");
        CHECK(e.violations()[0].index == 1);
    }
}

TEST_CASE("program structure is validated") {
    CHECK_THROWS_AS(BendProgram(std::vector<Instruction>{}), ConstraintViolation);
    CHECK_THROWS_AS(BendProgram({Instruction::bend(10)}), ConstraintViolation);
    CHECK_THROWS_AS(BendProgram({Instruction::feed(1), Instruction::feed(1)}), ConstraintViolation);
    CHECK_THROWS_AS(BendProgram({Instruction::feed(0)}), ConstraintViolation);
    CHECK_THROWS_AS(BendProgram({Instruction::feed(1), Instruction::bend(90)}), ConstraintViolation);
    CHECK_THROWS_AS(BendProgram({Instruction::feed(1), Instruction::rotate(-180), Instruction::bend(9),
                                 Instruction::feed(1)}),
                    ConstraintViolation);
    CHECK_NOTHROW(BendProgram({Instruction::feed(1), Instruction::bend(-90), Instruction::feed(1)}));

    auto m = testing::machine();
    m.max_bend_deg = 120;
    const BendProgram p({Instruction::feed(1), Instruction::bend(150), Instruction::feed(1)});
    CHECK_THROWS_AS(p.validate(m), ConstraintViolation);
}

TEST_CASE("simulate") {
    const auto m = testing::machine();
    const auto straight = simulate(BendProgram({Instruction::feed(10)}), m, false);
    CHECK(straight.size() == 2);
    CHECK(straight.length() == doctest::Approx(10));

    const BendProgram dead({Instruction::feed(10), Instruction::bend(15), Instruction::feed(10)});
    const auto sprung = simulate(dead, m, true);
    CHECK(sprung.total_turn() < 0.5);
    CHECK((sprung.back() - sprung.front()).norm() == doctest::Approx(20));
    CHECK(simulate(dead, m, false).total_turn() == doctest::Approx(15));
}

TEST_CASE("random round trips") {
    const auto m = testing::machine();
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        const auto path = random_feasible_path(rng, m, 3 + rng() % 48);
        const auto program = compile(path, m);
        const auto back = simulate(program, m, false);
        REQUIRE(back.size() == path.size());
        CHECK(rigid_align(back, path).max_vertex_error < 1e-6);
        CHECK(frame_alignment_error(back, path) < 1e-6);
        CHECK(std::abs(program.total_feed() - path.length()) < 1e-9);
    }
}

TEST_CASE("compile is rigid-motion invariant") {
    const auto m = testing::machine();
    std::mt19937_64 rng(4);
    const Mat3 r = axis_rotation(Vec3(-2, 1, 5).normalized(), 123.0);
    for (int i = 0; i < 50; ++i) {
        const auto path = random_feasible_path(rng, m, 3 + rng() % 20);
        const auto a = compile(path, m);
        const auto b = compile(path.transformed(r, Vec3(40, -3, 8)), m);
        REQUIRE(a.size() == b.size());
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a.instructions()[k].kind == b.instructions()[k].kind);
            CHECK(std::abs(a.instructions()[k].value - b.instructions()[k].value) < 1e-9);
        }
    }
}

TEST_CASE("rigid_align recovers a known transform") {
    const auto m = testing::machine();
    std::mt19937_64 rng(8);
    const auto path = random_feasible_path(rng, m, 12);
    const Mat3 r = axis_rotation(Vec3(0.3, -1, 0.2).normalized(), 71.0);
    const auto moved = path.transformed(r, Vec3(1, 2, 3));
    const auto fit = rigid_align(moved, path);
    CHECK(fit.max_vertex_error < 1e-9);
    CHECK((fit.rotation * r - Mat3::Identity()).norm() < 1e-9);
    CHECK_THROWS_AS(rigid_align(path, line({{0, 0, 0}, {1, 0, 0}})), InvalidInput);
}

TEST_CASE("compensation") {
    const auto m = testing::machine();
    const BendProgram plain({Instruction::feed(10)});
    CHECK(compensate(plain, m) == plain);

    const auto c45 = compensate(BendProgram({Instruction::feed(10), Instruction::bend(45), Instruction::feed(10)}), m);
    CHECK(actual_angle(m, c45.instructions()[1].value) == doctest::Approx(45));

    const auto c10 = compensate(BendProgram({Instruction::feed(10), Instruction::bend(-10), Instruction::feed(10)}), m);
    CHECK(c10.instructions()[1].value < -15.0);

    for (double t = 1; t <= 80; t += 1) {
        const auto c = compensate(BendProgram({Instruction::feed(10), Instruction::bend(t), Instruction::feed(10)}), m);
        CHECK(c.instructions()[1].value > 15.0);
    }

    try {
        compensate(BendProgram({Instruction::feed(10), Instruction::bend(30), Instruction::feed(10),
                                Instruction::bend(85), Instruction::feed(10)}),
                   m);
        FAIL("expected TargetUnreachable");
    } catch (const TargetUnreachable& e) {
        REQUIRE(e.bend_index());
        CHECK(*e.bend_index() == 1);
    }
}

TEST_CASE("compensated programs spring back onto their targets") {
    const auto m = testing::machine();
    std::mt19937_64 rng(21);
    for (int i = 0; i < 50; ++i) {
        std::vector<Instruction> ins{Instruction::feed(uniform(rng, 9, 40))};
        const int bends = 1 + static_cast<int>(rng() % 6);
        for (int b = 0; b < bends; ++b) {
            if (b > 0) ins.push_back(Instruction::rotate(uniform(rng, -170, 170)));
            ins.push_back(Instruction::bend(uniform(rng, 15, 80) * (rng() % 2 ? 1 : -1)));
            ins.push_back(Instruction::feed(uniform(rng, 9, 40)));
        }
        const BendProgram target(ins);
        const auto want = simulate(target, m, false).turn_angles();
        const auto got = simulate(compensate(target, m), m, true).turn_angles();
        REQUIRE(want.size() == got.size());
        for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(want[k] - got[k]) < 1.0);
    }
}

TEST_CASE("roundtrip_check is deterministic") {
    const auto m = testing::machine();
    const auto a = roundtrip_check(50, 7, m);
    const auto b = roundtrip_check(50, 7, m);
    CHECK(a.paths == 50);
    CHECK(a.max_vertex_error == b.max_vertex_error);
    CHECK(a.worst_path == b.worst_path);
    CHECK(a.max_vertex_error < 1e-6);
}
