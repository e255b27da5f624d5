#include "support.hpp"

#include "wirebend/cli.hpp"
#include "wirebend/scene_io.hpp"

#include <doctest.h>

#include <unistd.h>

#include <sstream>

using namespace wirebend;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "wirebend");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return testing::fixture(name).string(); }

fs::path workdir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("wirebend_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("compile a straight wire") {
    const auto r = run({"compile", fx("straight.json"), "--profile", fx("m.json")});
    CHECK(r.code == 0);
    CHECK(r.out == "FEED,100.000\n");
    CHECK(r.err.find("acos(CB/CD)") != std::string::npos);
}

TEST_CASE("roundtrip-check") {
    const auto r = run({"roundtrip-check", "--n", "1000", "--seed", "7", "--profile", fx("m.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("paths=1000") != std::string::npos);
    CHECK(run({"roundtrip-check", "--n", "1000", "--seed", "7", "--profile", fx("m.json")}).out == r.out);
}

TEST_CASE("collide the staircase") {
    const auto r = run({"collide", fx("staircase.json")});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("count").get<int>() >= 1);
    CHECK(j.at("conflicts").size() == j.at("count").get<std::size_t>());
}

TEST_CASE("deplanarize then collide") {
    const auto dir = workdir("deplan");
    const auto out = (dir / "d.json").string();
    REQUIRE(run({"deplanarize", fx("staircase.json"), "--epsilon", "5", "--out", out}).code == 0);
    const auto before = nlohmann::json::parse(run({"collide", fx("staircase.json")}).out).at("count").get<int>();
    const auto after = nlohmann::json::parse(run({"collide", out}).out).at("count").get<int>();
    CHECK(after < before);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cli::kUsage);
    CHECK(run({"frobnicate"}).code == cli::kUsage);
    CHECK(run({"compile", fx("straight.json")}).code == cli::kUsage);  // --profile missing
    CHECK(run({"compile", fx("straight.json"), "--profile", fx("nope.json")}).code == cli::kIo);
    CHECK(run({"compile", fx("nope.json"), "--profile", fx("m.json")}).code == cli::kIo);
    CHECK(run({"compile", fx("staircase.json"), "--profile", fx("m.json")}).code == cli::kOk);

    const auto dir = workdir("codes");
    const auto tight = (dir / "tight.json").string();
    write_file_atomic(tight, R"({"points": [[0,0,0],[3,0,0],[3,3,0]]})");
    const auto r = run({"compile", tight, "--profile", fx("m.json")});
    CHECK(r.code == cli::kConstraint);
    CHECK(r.err.find("segment 0") != std::string::npos);

    const auto program = (dir / "p.csv").string();
    write_file_atomic(program, "FEED,10\nBEND,85\nFEED,10\n");
    CHECK(run({"compensate", program, "--profile", fx("m.json")}).code == cli::kConstraint);
    CHECK(run({"connector", "gen", "CylinderWrap", "--param", "object_diameter_mm=3", "--profile", fx("m.json")}).code ==
          cli::kConstraint);
    CHECK(run({"connector", "gen", "CylinderWrap", "--param", "bogus=3", "--profile", fx("m.json")}).code == cli::kUsage);
}

TEST_CASE("simulate, compensate and compile --compensate agree") {
    const auto dir = workdir("sim");
    const auto program = (dir / "p.csv").string();
    write_file_atomic(program, "FEED,10\nBEND,15\nFEED,10\n");
    const auto sprung = run({"simulate", program, "--profile", fx("m.json"), "--springback"});
    REQUIRE(sprung.code == 0);
    const auto path = polyline_from_json(nlohmann::json::parse(sprung.out));
    CHECK(path.total_turn() < 0.5);

    write_file_atomic(program, "FEED,10\nBEND,45\nFEED,10\n");
    const auto comp = run({"compensate", program, "--profile", fx("m.json")});
    CHECK(comp.code == 0);
    CHECK(comp.out.find("BEND,53.182") != std::string::npos);  // 45 + 10 * 9 / 11 between (45, 36) and (55, 47)

    const auto planar = (dir / "l.json").string();
    write_file_atomic(planar, R"({"points": [[0,0,0],[10,0,0],[10,10,0]]})");
    CHECK(run({"compile", planar, "--profile", fx("m.json"), "--compensate"}).code == cli::kConstraint);  // 90 > 80 reach
}

TEST_CASE("simplify command") {
    const auto dir = workdir("simp");
    const auto in = (dir / "in.json").string();
    write_file_atomic(in, R"({"points": [[0,0,0],[1,0,0],[2,0,0],[50,0,0],[50,1,0],[50,40,0]]})");
    const auto r = run({"simplify", in, "--profile", fx("m.json")});
    REQUIRE(r.code == 0);
    CHECK(polyline_from_json(nlohmann::json::parse(r.out)).size() == 3);
}

TEST_CASE("walkthrough via the CLI equals the library export") {
    const auto dir = workdir("walk");
    const auto scene = (dir / "scene.json").string();
    const auto m = fx("m.json");
    REQUIRE(run({"connector", "gen", "PegboardPin", "--profile", m, "--scene", scene}).code == 0);
    REQUIRE(run({"connector", "gen", "CylinderWrap", "--profile", m, "--translate", "150,0,0", "--scene", scene}).code == 0);
    const auto linked = run({"link", scene, "--a", "1:end", "--b", "2:start"});
    REQUIRE(linked.code == 0);
    CHECK(linked.out == "bridge part 3\n");
    CHECK(load_scene(scene) == testing::walkthrough_scene(testing::machine()));

    REQUIRE(run({"export", scene, "--profile", m, "--out", (dir / "coords").string()}).code == 0);
    REQUIRE(run({"export", scene, "--profile", m, "--format", "frb", "--out", (dir / "frb").string()}).code == 0);
    const auto prof = testing::machine();
    const auto want = export_assembly(testing::walkthrough_scene(prof), prof, ExportFormat::Coords);
    for (const auto& [name, bytes] : want.files) CHECK(read_file(dir / "coords" / name) == bytes);
    CHECK(read_file(dir / "coords" / "plan.json") == want.manifest());

    CHECK(run({"link", scene, "--a", "1:end", "--b", "2:end"}).code == cli::kConstraint);
    CHECK(run({"check-orientation", scene}).code == 0);
    CHECK(run({"export", scene, "--profile", m, "--format", "stl", "--out", (dir / "x").string()}).code == cli::kUsage);
}

TEST_CASE("capacity command") {
    const auto dir = workdir("cap");
    const auto scene = (dir / "scene.json").string();
    const auto m = fx("m.json");
    REQUIRE(run({"connector", "gen", "CupHolder", "--param", "cup_diameter_mm=80", "--param", "edge_thickness_mm=25",
                 "--profile", m, "--scene", scene})
                .code == 0);
    const auto r = run({"capacity", scene, "--part", "1", "--profile", m});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("capacity_g=351.0", 0) == 0);
    CHECK(run({"capacity", scene, "--part", "2", "--profile", m}).code == cli::kUsage);
}

TEST_CASE("track gen") {
    const auto dir = workdir("track");
    const auto center = (dir / "c.json").string();
    write_file_atomic(center, R"({"points": [[0,100,0],[500,100,0]]})");
    const auto r = run({"track", "gen", center, "--profile", fx("m.json")});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("rails").size() == 4);
    CHECK(j.at("clips").size() == 11);
    CHECK(j.at("upper_gauge_mm").get<double>() == doctest::Approx(11.3137).epsilon(1e-5));
}
