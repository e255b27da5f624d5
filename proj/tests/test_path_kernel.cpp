#include "support.hpp"

#include "wirebend/errors.hpp"
#include "wirebend/path_kernel.hpp"
#include "wirebend/roundtrip.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace wirebend;
using testing::line;

namespace {

SimplifyParams params(double feed, double bend, double smoothing = 0.0, double ratio = 0.0) {
    SimplifyParams p;
    p.min_feed_mm = feed;
    p.min_bend_deg = bend;
    p.smoothing_strength = smoothing;
    p.min_reduction_ratio = ratio;
    return p;
}

// Noisy quarter-circle sweep of radius 150 mm with a gentle rise.
Polyline3 noisy_sweep(std::size_t n, std::uint64_t seed, double noise = 0.8) {
    std::mt19937_64 rng(seed);
    std::vector<Vec3> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / (n - 1);
        const double a = t * std::numbers::pi / 2;
        pts.emplace_back(150 * std::cos(a) + uniform(rng, -noise, noise), 150 * std::sin(a) + uniform(rng, -noise, noise),
                         20 * t + uniform(rng, -noise, noise));
    }
    return Polyline3(pts);
}

// Turn at b computed from the law of cosines rather than atan2.
double turn_oracle(const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 u = b - a, v = c - b;
    const double cosine = std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

// Angle between the planes (a,b,c) and (b,c,d), via unnormalized cross products.
double dihedral_oracle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    const Vec3 n1 = (b - a).cross(c - b);
    const Vec3 n2 = (c - b).cross(d - c);
    const double cosine = std::clamp(n1.dot(n2) / (n1.norm() * n2.norm()), -1.0, 1.0);
    return std::acos(cosine) * 180.0 / std::numbers::pi;
}

// Grid search over both segment parameters.
double brute_distance(const Vec3& a0, const Vec3& a1, const Vec3& b0, const Vec3& b1, int steps = 400) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const Vec3 p = a0 + (a1 - a0) * (double(i) / steps);
        for (int j = 0; j <= steps; ++j) best = std::min(best, (p - (b0 + (b1 - b0) * (double(j) / steps))).norm());
    }
    return best;
}

void check_clean(const Polyline3& out, const SimplifyParams& p) {
    for (double t : out.turn_angles()) CHECK(t >= p.min_bend_deg);
    if (out.size() > 2) {
        for (std::size_t s = 0; s < out.segment_count(); ++s) CHECK(out.segment_length(s) >= p.min_feed_mm);
    }
}

Mat3 some_rotation() { return axis_rotation(Vec3(1, 2, 3).normalized(), 37.0); }

}  // namespace

TEST_CASE("polyline rejects degenerate input") {
    CHECK_THROWS_AS(Polyline3({Vec3(0, 0, 0)}), InvalidInput);
    CHECK_THROWS_AS(Polyline3({Vec3(0, 0, 0), Vec3(0, 0, 0)}), InvalidInput);
    CHECK_THROWS_AS(Polyline3({Vec3(0, 0, 0), Vec3(NAN, 0, 0)}), InvalidInput);
}

TEST_CASE("collinear path collapses to its endpoints") {
    const auto p = line({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {5, 0, 0}, {9, 0, 0}});
    const auto out = simplify(p, params(0.5, 0.5));
    REQUIRE(out.size() == 2);
    CHECK(out.front() == p.front());
    CHECK(out.back() == p.back());
}

TEST_CASE("square wave with 2 mm steps merges to min feed") {
    std::vector<Vec3> pts;
    for (int i = 0; i <= 30; ++i) {
        pts.emplace_back(2.0 * i, 0, 0);
        pts.emplace_back(2.0 * i, 0, 2);
        ++i;
        pts.emplace_back(2.0 * i, 0, 2);
        pts.emplace_back(2.0 * i, 0, 0);
    }
    const Polyline3 wave(pts);
    const auto p = params(8.39, 15);
    const auto out = simplify(wave, p);
    check_clean(out, p);
    for (std::size_t s = 0; s + 1 < out.size() && out.size() > 2; ++s) CHECK(out.segment_length(s) >= 8.39);
}

TEST_CASE("a 10 degree kink is removed at min bend 15") {
    const double a = deg_to_rad(10);
    const auto p = line({{0, 0, 0}, {50, 0, 0}, {50 + 50 * std::cos(a), 50 * std::sin(a), 0}});
    CHECK(turn_oracle(p[0], p[1], p[2]) == doctest::Approx(10));
    const auto out = simplify(p, params(8.39, 15));
    CHECK(out.size() == 2);
}

TEST_CASE("fabricable paths pass through untouched") {
    const auto p = line({{0, 0, 0}, {20, 0, 0}, {20, 20, 0}});
    CHECK(simplify(p, params(8.39, 15, 1.0, 0.9)) == p);
}

TEST_CASE("simplify properties on random noisy paths") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        CAPTURE(seed);
        std::mt19937_64 rng(seed);
        const auto path = noisy_sweep(20 + rng() % 200, seed, uniform(rng, 0.0, 3.0));
        const auto p = params(uniform(rng, 2, 12), uniform(rng, 5, 30), uniform(rng, 0, 1), uniform(rng, 0, 0.9));
        const auto once = simplify(path, p);
        const auto twice = simplify(once, p);
        CHECK(twice == once);
        CHECK(once.size() <= path.size());
        CHECK(once.total_turn() <= path.total_turn() + 1e-6);
        check_clean(once, p);
        CHECK(once.front() == path.front());
        CHECK(once.back() == path.back());
    }
}

TEST_CASE("reduction ratio is met when the constraints allow it") {
    const auto path = noisy_sweep(200, 3, 0.1);
    REQUIRE(!is_fabricable(path, params(1e-3, 5.0)));
    const auto out = simplify(path, params(1e-3, 5.0, 0.0, 0.6));
    CHECK(out.size() <= 80);
    CHECK(simplify(out, params(1e-3, 5.0, 0.0, 0.6)) == out);

    // Already fabricable input is a fixed point, ratio or not.
    const auto coarse = line({{0, 0, 0}, {30, 0, 0}, {30, 30, 0}, {60, 30, 10}});
    CHECK(simplify(coarse, params(8.4, 15, 0.0, 0.6)) == coarse);
}

TEST_CASE("douglas peucker keeps endpoints and drops near-collinear points") {
    std::vector<Vec3> pts{{0, 0, 0}, {1, 0.01, 0}, {2, 0, 0}, {3, 5, 0}, {4, 0, 0}};
    const auto keep = douglas_peucker(pts, 0.1);
    CHECK(keep == std::vector<std::size_t>{0, 2, 3, 4});
    CHECK(douglas_peucker(pts, 100).size() == 2);
}

TEST_CASE("simplify parameter ranges") {
    const auto p = line({{0, 0, 0}, {1, 0, 0}});
    CHECK_THROWS_AS(simplify(p, params(1, 15, 1.5)), InvalidInput);
    CHECK_THROWS_AS(simplify(p, params(1, 15, 0, 1.0)), InvalidInput);
    CHECK_THROWS_AS(simplify(p, params(-1, 15)), InvalidInput);
}

TEST_CASE("deplanarize leaves short runs and straight paths alone") {
    const auto straight = line({{0, 0, 0}, {10, 0, 0}, {30, 0, 0}});
    CHECK(deplanarize(straight, 5) == straight);
    const auto u = line({{0, 0, 0}, {20, 0, 0}, {20, 20, 0}, {0, 20, 0}});
    CHECK(deplanarize(u, 5) == u);
    CHECK_THROWS_AS(deplanarize(u, 0), InvalidInput);
    CHECK_THROWS_AS(deplanarize(u, 10.5), InvalidInput);
}

TEST_CASE("planar spiral gets separated bend planes") {
    const auto spiral = line({{0, 0, 0}, {40, 0, 0}, {40, 30, 0}, {10, 30, 0}, {10, 10, 0}, {30, 10, 0}});
    REQUIRE(coplanar_runs(spiral).size() == 1);
    REQUIRE(coplanar_runs(spiral)[0].length() == 4);
    for (double eps : {1.0, 5.0, 10.0}) {
        CAPTURE(eps);
        const auto out = deplanarize(spiral, eps);
        CHECK(out.front() == spiral.front());
        CHECK(out.back() == spiral.back());
        for (std::size_t v = 1; v + 2 < out.size(); ++v) {
            CHECK(dihedral_oracle(out[v - 1], out[v], out[v + 1], out[v + 2]) >= eps - 1e-9);
        }
        const double t = std::tan(deg_to_rad(eps));
        for (std::size_t v = 1; v + 1 < out.size(); ++v) {
            const double adjacent = std::max((spiral[v] - spiral[v - 1]).norm(), (spiral[v + 1] - spiral[v]).norm());
            CHECK((out[v] - spiral[v]).norm() <= t * adjacent + 1e-12);
        }
    }
}

TEST_CASE("deplanarize only moves vertices inside runs") {
    // Straight lead-in, a three-bend planar run, then an out-of-plane exit.
    const auto p = line({{-30, 0, 0}, {0, 0, 0}, {20, 0, 0}, {20, 20, 0}, {0, 20, 0}, {0, 10, 0}, {0, 10, 20}});
    const auto out = deplanarize(p, 5);
    CHECK(out[0] == p[0]);
    CHECK(out[1] == p[1]);
    CHECK(out[5] == p[5]);
    CHECK(out[6] == p[6]);
    CHECK(!(out[2] == p[2]));
}

TEST_CASE("collision detection basics") {
    CHECK(detect_conflicts(line({{0, 0, 0}, {100, 0, 0}}), 180, 3.2).empty());
    CHECK(detect_conflicts(line({{0, 0, 0}, {20, 0, 0}, {20, 20, 0}}), 180, 3.2).empty());

    const auto stair = testing::staircase();
    const auto report = detect_conflicts(stair, 180, 3.2);
    CHECK(report.size() >= 1);
    for (const auto& c : report.conflicts) {
        CHECK(c.segment_a + 1 < c.segment_b);
        CHECK(c.segment_b < stair.segment_count());
        CHECK(c.min_distance_mm >= 0.0);
    }
    CHECK(detect_conflicts(deplanarize(stair, 5), 180, 3.2).size() < report.size());
}

TEST_CASE("close passes are flagged with their closest points") {
    // Hairpin whose return leg runs 2 mm from the start.
    const auto p = line({{0, 0, 0}, {30, 0, 0}, {30, 12, 1}, {5, 2, 0}});
    const auto report = detect_conflicts(p, 360, 3.2);
    REQUIRE(report.size() == 1);
    const auto& c = report.conflicts[0];
    CHECK(c.kind == ConflictKind::Proximity);
    CHECK(c.min_distance_mm == doctest::Approx(brute_distance(p[0], p[1], p[2], p[3])).epsilon(1e-3));
    CHECK((c.closest_a - c.closest_b).norm() == doctest::Approx(c.min_distance_mm));
}

TEST_CASE("segment distance matches brute force") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        Vec3 q[4];
        for (auto& v : q) v = Vec3(uniform(rng, -10, 10), uniform(rng, -10, 10), uniform(rng, -10, 10));
        if (i % 10 == 0) q[3] = q[2] + (q[1] - q[0]) * 0.5;  // parallel case
        const auto c = closest_between_segments(q[0], q[1], q[2], q[3]);
        const double brute = brute_distance(q[0], q[1], q[2], q[3], 300);
        CHECK(c.distance <= brute + 1e-12);
        CHECK(c.distance >= brute - 0.2);
        CHECK((c.point_a - c.point_b).norm() == doctest::Approx(c.distance));
    }
}

TEST_CASE("conflicts are symmetric and invariant under rigid motion") {
    std::mt19937_64 rng(17);
    std::vector<Polyline3> paths{testing::staircase(), line({{0, 0, 0}, {30, 0, 0}, {30, 12, 1}, {5, 2, 0}})};
    for (int i = 0; i < 20; ++i) {
        // Tight random walks so that some pairs come close.
        std::vector<Vec3> pts{Vec3::Zero()};
        for (int k = 0; k < 12; ++k) {
            pts.push_back(pts.back() + Vec3(uniform(rng, -8, 8), uniform(rng, -8, 8), uniform(rng, -2, 2)));
        }
        paths.emplace_back(pts);
    }
    const Mat3 r = some_rotation();
    const Vec3 t(5, -7, 11);
    for (const auto& p : paths) {
        const auto base = detect_conflicts(p, 180, 4);
        const auto moved = detect_conflicts(p.transformed(r, t), 180, 4);
        REQUIRE(base.size() == moved.size());
        for (std::size_t k = 0; k < base.size(); ++k) {
            CHECK(base.conflicts[k].segment_a == moved.conflicts[k].segment_a);
            CHECK(base.conflicts[k].segment_b == moved.conflicts[k].segment_b);
            CHECK(base.conflicts[k].min_distance_mm == doctest::Approx(moved.conflicts[k].min_distance_mm));
        }

        const auto rev = detect_conflicts(p.reversed(), 180, 4);
        REQUIRE(rev.size() == base.size());
        const std::size_t last = p.segment_count() - 1;
        std::vector<std::pair<std::size_t, std::size_t>> fwd, back;
        for (const auto& c : base.conflicts) fwd.emplace_back(c.segment_a, c.segment_b);
        for (const auto& c : rev.conflicts) back.emplace_back(last - c.segment_b, last - c.segment_a);
        std::sort(fwd.begin(), fwd.end());
        std::sort(back.begin(), back.end());
        CHECK(fwd == back);
    }
}
