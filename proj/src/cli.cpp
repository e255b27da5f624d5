#include "wirebend/cli.hpp"

#include "wirebend/bend_compiler.hpp"
#include "wirebend/connectors.hpp"
#include "wirebend/errors.hpp"
#include "wirebend/marble_track.hpp"
#include "wirebend/path_kernel.hpp"
#include "wirebend/roundtrip.hpp"
#include "wirebend/scene_io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <ostream>
#include <sstream>

namespace wirebend::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string input;
    std::string profile;
    std::string out;
    double smoothing = 0.0;
    double reduction = 0.0;
    double epsilon = 5.0;
    std::optional<double> threshold;
    std::optional<double> proximity;
    bool compensate = false;
    bool springback = false;
    std::string kind;
    std::vector<std::string> params;
    std::string translate;
    std::string scene;
    double marble = 16.0;
    double clip_spacing = 50.0;
    double contact = 45.0;
    std::string end_a;
    std::string end_b;
    double sleeve = 20.0;
    std::string gravity = "0,-1,0";
    double tolerance = kOrientationToleranceMm;
    int part = 0;
    std::string load;
    double yield = WireMaterial{}.yield_strength_mpa;
    double youngs = WireMaterial{}.youngs_modulus_gpa;
    std::string format = "coords";
    bool header = false;
    std::size_t n = 1000;
    std::uint64_t seed = 7;
};

Vec3 parse_vec(const std::string& text, const char* what) {
    std::stringstream ss(text);
    std::string field;
    std::vector<double> v;
    while (std::getline(ss, field, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw InvalidInput(std::string(what) + " must be x,y,z");
        }
    }
    if (v.size() != 3) throw InvalidInput(std::string(what) + " must be x,y,z");
    return {v[0], v[1], v[2]};
}

// "3:end" -> (3, End::End)
std::pair<int, End> parse_endpoint(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidInput("endpoint must look like <label>:start|end, got '" + text + "'");
    int label = 0;
    try {
        label = std::stoi(text.substr(0, colon));
    } catch (const std::exception&) {
        throw InvalidInput("bad part label in '" + text + "'");
    }
    return {label, end_from_string(text.substr(colon + 1))};
}

class Runner {
public:
    Runner(const Options& o, std::ostream& out, std::ostream& err) : o_(o), out_(out), err_(err) {}

    void emit(const std::string& text, const std::string& path) const {
        if (path.empty()) out_ << text;
        else write_file_atomic(path, text);
    }
    void emit(const std::string& text) const { emit(text, o_.out); }
    void emit_json(const json& j) const { emit(j.dump(2) + "\n"); }

    MachineProfile profile() const {
        auto p = load_profile(o_.profile);
        err_ << describe_min_feed(p) << "\n";
        return p;
    }

    Scene scene_or_empty(const std::string& path) const {
        if (path.empty() || !fs::exists(path)) return Scene{};
        return load_scene(path);
    }

    void simplify_cmd() const {
        const auto prof = profile();
        auto params = SimplifyParams::for_profile(prof);
        params.smoothing_strength = o_.smoothing;
        params.min_reduction_ratio = o_.reduction;
        params.validate();
        emit_json(polyline_to_json(simplify(load_polyline(o_.input), params)));
    }

    void deplanarize_cmd() const { emit_json(polyline_to_json(deplanarize(load_polyline(o_.input), o_.epsilon))); }

    void collide_cmd() const {
        MachineProfile prof;
        if (!o_.profile.empty()) prof = profile();
        const double threshold = o_.threshold.value_or(prof.max_bend_deg);
        const double proximity = o_.proximity.value_or(2.0 * prof.wire_diameter_mm);
        const auto report = detect_conflicts(load_polyline(o_.input), threshold, proximity);
        json conflicts = json::array();
        for (const auto& c : report.conflicts) {
            conflicts.push_back({
                {"segment_a", c.segment_a},
                {"segment_b", c.segment_b},
                {"closest_a", {c.closest_a.x(), c.closest_a.y(), c.closest_a.z()}},
                {"closest_b", {c.closest_b.x(), c.closest_b.y(), c.closest_b.z()}},
                {"min_distance_mm", c.min_distance_mm},
                {"swept_deg", c.swept_deg},
            });
        }
        err_ << report.size() << " conflict(s)\n";
        emit_json({{"count", report.size()}, {"conflicts", conflicts}});
    }

    void compile_cmd() const {
        const auto prof = profile();
        auto program = compile(load_polyline(o_.input), prof);
        if (o_.compensate) program = compensate(program, prof);
        emit(export_program_csv(program));
    }

    void simulate_cmd() const {
        const auto prof = profile();
        const auto program = parse_program_csv(read_file(o_.input));
        emit_json(polyline_to_json(simulate(program, prof, o_.springback)));
    }

    void compensate_cmd() const {
        const auto prof = profile();
        emit(export_program_csv(compensate(parse_program_csv(read_file(o_.input)), prof)));
    }

    void connector_gen_cmd() const {
        const auto prof = profile();
        ConnectorSpec spec{connector_kind_from_string(o_.kind), {}};
        for (const auto& kv : o_.params) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidInput("--param expects name=value, got '" + kv + "'");
            try {
                spec.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
            } catch (const std::exception&) {
                throw InvalidInput("--param " + kv + ": value is not a number");
            }
        }
        WirePart part = generate(spec, prof);
        if (!o_.translate.empty()) part = part.placed(Mat3::Identity(), parse_vec(o_.translate, "--translate"));
        if (o_.scene.empty()) {
            emit_json(part_to_json(part));
            return;
        }
        Scene scene = scene_or_empty(o_.scene);
        const int label = scene.add(part);
        save_scene(scene, o_.out.empty() ? o_.scene : o_.out);
        out_ << "part " << label << "\n";
    }

    void track_gen_cmd() const {
        const auto prof = profile();
        TrackSpec spec;
        spec.center_path = load_polyline(o_.input);
        spec.marble_diameter_mm = o_.marble;
        spec.clip_spacing_mm = o_.clip_spacing;
        spec.rail_contact_deg = o_.contact;
        const Track track = generate_track(spec, prof);
        if (o_.scene.empty()) {
            json rails = json::array();
            for (const auto& r : track.rails) rails.push_back(polyline_to_json(r).at("points"));
            json supports = json::array();
            for (const auto& s : track.supports) supports.push_back(polyline_to_json(s).at("points"));
            json clips = json::array();
            for (const auto& c : track.clips) clips.push_back(clip_to_json(c));
            emit_json({{"upper_gauge_mm", track.upper_gauge_mm}, {"rails", rails}, {"supports", supports}, {"clips", clips}});
            return;
        }
        Scene scene = scene_or_empty(o_.scene);
        for (const auto& r : track.rails) {
            WirePart p;
            p.kind = "rail";
            p.path = r;
            scene.add(p);
        }
        for (const auto& s : track.supports) {
            WirePart p;
            p.kind = "support";
            p.path = s;
            scene.add(p);
        }
        scene.clips.insert(scene.clips.end(), track.clips.begin(), track.clips.end());
        save_scene(scene, o_.out.empty() ? o_.scene : o_.out);
    }

    void link_cmd() const {
        Scene scene = load_scene(o_.input);
        Splice s;
        std::tie(s.part_a, s.end_a) = parse_endpoint(o_.end_a);
        std::tie(s.part_b, s.end_b) = parse_endpoint(o_.end_b);
        s.sleeve_length_mm = o_.sleeve;
        const auto result = link(std::move(scene), s);
        for (const auto& w : result.warnings) err_ << "warning: " << w << "\n";
        if (const auto& last = result.scene.splices.back(); last.bridge) {
            out_ << "bridge part " << *last.bridge << "\n";
        }
        save_scene(result.scene, o_.out.empty() ? o_.input : o_.out);
    }

    void check_orientation_cmd() const {
        const Scene scene = load_scene(o_.input);
        const auto warnings = check_orientation(scene, parse_vec(o_.gravity, "--gravity"), o_.tolerance);
        for (const auto& w : warnings) out_ << "warning: splice " << w.splice_index + 1 << ": " << w.message << "\n";
        if (warnings.empty()) out_ << "ok\n";
    }

    void capacity_cmd() const {
        const auto prof = profile();
        const Scene scene = load_scene(o_.input);
        const WirePart* part = scene.find(o_.part);
        if (!part) throw NotFound("no part " + std::to_string(o_.part));
        Vec3 load;
        if (!o_.load.empty()) load = parse_vec(o_.load, "--load");
        else if (!part->contacts.empty()) load = part->contacts.back().point;
        else throw InvalidInput("part has no contacts; pass --load x,y,z");
        const WireMaterial material{o_.youngs, o_.yield};
        const double grams = estimate_capacity(*part, prof.wire_diameter_mm, material, load);
        char line[128];
        std::snprintf(line, sizeof line, "capacity_g=%.1f lever_arm_mm=%.3f\n", grams, lever_arm_mm(*part, load));
        out_ << line;
    }

    void export_cmd() const {
        const auto prof = profile();
        const Scene scene = load_scene(o_.input);
        const auto bundle = export_assembly(scene, prof, export_format_from_string(o_.format), o_.header);
        write_assembly(bundle, o_.out);
        for (const auto& [name, _] : bundle.files) out_ << (fs::path(o_.out) / name).string() << "\n";
        out_ << (fs::path(o_.out) / "plan.json").string() << "\n";
    }

    bool roundtrip_cmd() const {
        const auto prof = profile();
        const auto report = roundtrip_check(o_.n, o_.seed, prof);
        char line[160];
        std::snprintf(line, sizeof line, "paths=%zu max_vertex_error_mm=%.3e worst_path=%zu\n", report.paths,
                      report.max_vertex_error, report.worst_path);
        out_ << line;
        return report.max_vertex_error < 1e-6;
    }

private:
    const Options& o_;
    std::ostream& out_;
    std::ostream& err_;
};

void print_violations(const ConstraintViolation& e, std::ostream& err) {
    err << "constraint violation:\n";
    for (const auto& v : e.violations()) {
        err << "  ";
        if (v.part) err << "part " << *v.part << " ";
        err << v.element << " " << v.index << ": " << v.rule << "\n";
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"CNC wire-bending design compiler", "wirebend"};
    app.require_subcommand(1);

    auto add_profile = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--profile", o.profile, "machine profile JSON");
        if (required) opt->required();
    };
    auto add_input = [&](CLI::App* sub, const char* what) { sub->add_option("input", o.input, what)->required(); };

    auto* simplify = app.add_subcommand("simplify", "smooth and reduce a polyline to fabricable form");
    add_input(simplify, "polyline JSON");
    add_profile(simplify, true);
    simplify->add_option("--smoothing", o.smoothing, "smoothing strength in [0,1]");
    simplify->add_option("--reduction", o.reduction, "minimum point reduction ratio in [0,1)");
    simplify->add_option("--out", o.out);

    auto* deplan = app.add_subcommand("deplanarize", "break up runs of coplanar same-direction bends");
    add_input(deplan, "polyline JSON");
    deplan->add_option("--epsilon", o.epsilon, "minimum dihedral between bend planes, degrees");
    deplan->add_option("--out", o.out);

    auto* collide = app.add_subcommand("collide", "report segment pairs that may hit during bending");
    add_input(collide, "polyline JSON");
    add_profile(collide, false);
    collide->add_option("--threshold", o.threshold, "sweep threshold, degrees (default: max bend)");
    collide->add_option("--proximity", o.proximity, "proximity, mm (default: 2 wire diameters)");
    collide->add_option("--out", o.out);

    auto* comp = app.add_subcommand("compile", "compile a polyline to a FEED/ROTATE/BEND program CSV");
    add_input(comp, "polyline JSON");
    add_profile(comp, true);
    comp->add_flag("--compensate", o.compensate, "apply springback compensation");
    comp->add_option("--out", o.out);

    auto* sim = app.add_subcommand("simulate", "run a program CSV forward to a polyline");
    add_input(sim, "program CSV");
    add_profile(sim, true);
    sim->add_flag("--springback", o.springback, "apply the springback curve");
    sim->add_option("--out", o.out);

    auto* compens = app.add_subcommand("compensate", "replace BEND targets with commanded angles");
    add_input(compens, "program CSV");
    add_profile(compens, true);
    compens->add_option("--out", o.out);

    auto* connector = app.add_subcommand("connector", "connector generators");
    connector->require_subcommand(1);
    auto* cgen = connector->add_subcommand("gen", "generate one connector");
    cgen->add_option("kind", o.kind, "PegboardPin|TableEdgeClip|CylinderWrap|Hook|Clamp|CupHolder")->required();
    add_profile(cgen, true);
    cgen->add_option("--param", o.params, "name=value, repeatable");
    cgen->add_option("--translate", o.translate, "x,y,z placement offset");
    cgen->add_option("--scene", o.scene, "add the part to this scene file");
    cgen->add_option("--out", o.out);

    auto* track = app.add_subcommand("track", "marble track generator");
    track->require_subcommand(1);
    auto* tgen = track->add_subcommand("gen", "generate a 4-rail track along a centre path");
    add_input(tgen, "centre path JSON");
    add_profile(tgen, true);
    tgen->add_option("--marble", o.marble, "marble diameter, mm");
    tgen->add_option("--clip-spacing", o.clip_spacing, "clip spacing, mm");
    tgen->add_option("--contact", o.contact, "rail contact angle, degrees");
    tgen->add_option("--scene", o.scene, "add rails and supports to this scene file");
    tgen->add_option("--out", o.out);

    auto* lnk = app.add_subcommand("link", "splice two endpoints");
    add_input(lnk, "scene JSON");
    lnk->add_option("--a", o.end_a, "<label>:start|end")->required();
    lnk->add_option("--b", o.end_b, "<label>:start|end")->required();
    lnk->add_option("--sleeve", o.sleeve, "sleeve length, mm");
    lnk->add_option("--out", o.out, "output scene (default: overwrite input)");

    auto* orient = app.add_subcommand("check-orientation", "warn about splices that tilt the held object");
    add_input(orient, "scene JSON");
    orient->add_option("--gravity", o.gravity, "x,y,z");
    orient->add_option("--tolerance", o.tolerance, "mm");

    auto* cap = app.add_subcommand("capacity", "estimate how much weight a part holds");
    add_input(cap, "scene JSON");
    add_profile(cap, true);
    cap->add_option("--part", o.part, "part label")->required();
    cap->add_option("--load", o.load, "x,y,z load point (default: last contact)");
    cap->add_option("--yield", o.yield, "yield strength, MPa");
    cap->add_option("--youngs", o.youngs, "Young's modulus, GPa");

    auto* exp = app.add_subcommand("export", "write part CSVs and the assembly plan");
    add_input(exp, "scene JSON");
    add_profile(exp, true);
    exp->add_option("--format", o.format, "coords|frb")->check(CLI::IsMember({"coords", "frb"}));
    exp->add_flag("--header", o.header, "add an x,y,z header row to coordinate CSVs");
    exp->add_option("--out", o.out, "output directory")->required();

    auto* rt = app.add_subcommand("roundtrip-check", "compile/simulate random paths and compare");
    add_profile(rt, true);
    rt->add_option("--n", o.n, "number of paths");
    rt->add_option("--seed", o.seed, "RNG seed");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    Runner r(o, out, err);
    try {
        if (simplify->parsed()) r.simplify_cmd();
        else if (deplan->parsed()) r.deplanarize_cmd();
        else if (collide->parsed()) r.collide_cmd();
        else if (comp->parsed()) r.compile_cmd();
        else if (sim->parsed()) r.simulate_cmd();
        else if (compens->parsed()) r.compensate_cmd();
        else if (cgen->parsed()) r.connector_gen_cmd();
        else if (tgen->parsed()) r.track_gen_cmd();
        else if (lnk->parsed()) r.link_cmd();
        else if (orient->parsed()) r.check_orientation_cmd();
        else if (cap->parsed()) r.capacity_cmd();
        else if (exp->parsed()) r.export_cmd();
        else if (rt->parsed()) return r.roundtrip_cmd() ? kOk : kConstraint;
        return kOk;
    } catch (const ConstraintViolation& e) {
        print_violations(e, err);
        return kConstraint;
    } catch (const TargetUnreachable& e) {
        err << "error: " << e.what() << "\n";
        return kConstraint;
    } catch (const InfeasibleSpec& e) {
        err << "error: " << e.what() << "\n";
        return kConstraint;
    } catch (const InfeasibleTrack& e) {
        err << "error: " << e.what() << "\n";
        return kConstraint;
    } catch (const Unsimplifiable& e) {
        err << "error: " << e.what() << "\n";
        return kConstraint;
    } catch (const EndpointOccupied& e) {
        err << "error: " << e.what() << "\n";
        return kConstraint;
    } catch (const SelfSplice& e) {
        err << "error: " << e.what() << "\n";
        return kConstraint;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const VersionError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace wirebend::cli
