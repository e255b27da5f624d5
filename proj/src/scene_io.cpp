#include "wirebend/scene_io.hpp"

#include "wirebend/errors.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace wirebend {

using nlohmann::json;

namespace {

// %.3f with "-0.000" folded into "0.000" so tiny negative noise does not
// change the bytes.
std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

std::vector<std::string> split(std::string_view line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(const std::string& field, std::size_t row) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != field.size()) {
        throw InvalidInput("row " + std::to_string(row) + ": '" + field + "' is not a number");
    }
    return v;
}

// Non-empty lines, tolerating CRLF.
std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) out.push_back(line);
        start = end + 1;
    }
    return out;
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw InvalidInput("expected [x, y, z], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
    if (!j.is_object()) throw InvalidInput(std::string(what) + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw InvalidInput(std::string("unknown ") + what + " field '" + key + "'");
    }
}

template <class F>
auto guarded(const char* what, F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

std::string export_coords_csv(const Polyline3& path, bool header) {
    std::string out;
    if (header) out += "x,y,z\n";
    for (const auto& p : path.points()) {
        out += fixed3(p.x()) + "," + fixed3(p.y()) + "," + fixed3(p.z()) + "\n";
    }
    return out;
}

std::string export_coords_csv(const WirePart& part, bool header) { return export_coords_csv(part.path, header); }

Polyline3 parse_coords_csv(std::string_view text) {
    std::vector<Vec3> pts;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i == 0 && lines[i] == "x,y,z") continue;
        const auto fields = split(lines[i], ',');
        if (fields.size() != 3) throw InvalidInput("row " + std::to_string(i + 1) + ": expected 3 fields");
        pts.emplace_back(parse_number(fields[0], i + 1), parse_number(fields[1], i + 1), parse_number(fields[2], i + 1));
    }
    return Polyline3(std::move(pts));
}

std::string export_program_csv(const BendProgram& program) {
    program.validate();
    std::string out;
    for (const auto& ins : program.instructions()) {
        out += std::string(to_string(ins.kind)) + "," + fixed3(ins.value) + "\n";
    }
    return out;
}

BendProgram parse_program_csv(std::string_view text) {
    std::vector<Instruction> ins;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto fields = split(lines[i], ',');
        if (fields.size() != 2) throw InvalidInput("row " + std::to_string(i + 1) + ": expected KIND,value");
        const double v = parse_number(fields[1], i + 1);
        if (fields[0] == "FEED") ins.push_back(Instruction::feed(v));
        else if (fields[0] == "ROTATE") ins.push_back(Instruction::rotate(v));
        else if (fields[0] == "BEND") ins.push_back(Instruction::bend(v));
        else throw InvalidInput("row " + std::to_string(i + 1) + ": unknown instruction '" + fields[0] + "'");
    }
    BendProgram program(std::move(ins));
    program.validate();
    return program;
}

Polyline3 polyline_from_json(const json& j) {
    return guarded("polyline", [&] {
        const json& pts = j.is_object() ? j.at("points") : j;
        if (!pts.is_array()) throw InvalidInput("polyline must be an array of [x, y, z]");
        std::vector<Vec3> out;
        for (const auto& p : pts) out.push_back(vec_from_json(p));
        return Polyline3(std::move(out));
    });
}

json polyline_to_json(const Polyline3& path) {
    json pts = json::array();
    for (const auto& p : path.points()) pts.push_back(vec_to_json(p));
    return {{"points", pts}};
}

Polyline3 load_polyline(const std::filesystem::path& path) {
    const auto text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
    return polyline_from_json(j);
}

json spec_to_json(const ConnectorSpec& spec) {
    return {{"kind", to_string(spec.kind)}, {"params", spec.params}};
}

ConnectorSpec spec_from_json(const json& j) {
    return guarded("connector spec", [&] {
        reject_unknown(j, {"kind", "params"}, "connector spec");
        ConnectorSpec spec;
        spec.kind = connector_kind_from_string(j.at("kind").get<std::string>());
        if (j.contains("params")) spec.params = j.at("params").get<std::map<std::string, double>>();
        return spec;
    });
}

json part_to_json(const WirePart& part) {
    json contacts = json::array();
    for (const auto& c : part.contacts) contacts.push_back({{"point", vec_to_json(c.point)}, {"normal", vec_to_json(c.normal)}});
    json j = {
        {"label", part.label},
        {"kind", part.kind},
        {"points", polyline_to_json(part.path).at("points")},
        {"contacts", contacts},
        {"anchors", part.anchors},
    };
    if (part.spec) j["spec"] = spec_to_json(*part.spec);
    return j;
}

WirePart part_from_json(const json& j) {
    return guarded("part", [&] {
        reject_unknown(j, {"label", "kind", "points", "contacts", "anchors", "spec"}, "part");
        WirePart part;
        part.label = j.value("label", 0);
        part.kind = j.value("kind", std::string("drawn"));
        part.path = polyline_from_json(j.at("points"));
        if (j.contains("contacts")) {
            for (const auto& c : j.at("contacts")) {
                part.contacts.push_back({vec_from_json(c.at("point")), vec_from_json(c.at("normal"))});
            }
        }
        if (j.contains("anchors")) part.anchors = j.at("anchors").get<std::vector<std::size_t>>();
        if (j.contains("spec")) part.spec = spec_from_json(j.at("spec"));
        return part;
    });
}

json splice_to_json(const Splice& s) {
    json j = {
        {"part_a", s.part_a}, {"end_a", to_string(s.end_a)},
        {"part_b", s.part_b}, {"end_b", to_string(s.end_b)},
        {"sleeve_length_mm", s.sleeve_length_mm},
    };
    if (s.bridge) j["bridge"] = *s.bridge;
    return j;
}

Splice splice_from_json(const json& j) {
    return guarded("splice", [&] {
        reject_unknown(j, {"part_a", "end_a", "part_b", "end_b", "sleeve_length_mm", "bridge"}, "splice");
        Splice s;
        s.part_a = j.at("part_a").get<int>();
        s.end_a = end_from_string(j.value("end_a", std::string("end")));
        s.part_b = j.at("part_b").get<int>();
        s.end_b = end_from_string(j.value("end_b", std::string("start")));
        s.sleeve_length_mm = j.value("sleeve_length_mm", s.sleeve_length_mm);
        if (j.contains("bridge")) s.bridge = j.at("bridge").get<int>();
        return s;
    });
}

json clip_to_json(const ClipMount& c) {
    json frame = json::array();
    for (int k = 0; k < 3; ++k) frame.push_back(vec_to_json(c.frame.col(k)));
    return {{"point", vec_to_json(c.point)}, {"frame", frame}, {"arc_length_mm", c.arc_length_mm}};
}

ClipMount clip_from_json(const json& j) {
    return guarded("clip", [&] {
        reject_unknown(j, {"point", "frame", "arc_length_mm"}, "clip");
        ClipMount c;
        c.point = vec_from_json(j.at("point"));
        const auto& frame = j.at("frame");
        if (!frame.is_array() || frame.size() != 3) throw InvalidInput("clip frame must hold 3 columns");
        for (int k = 0; k < 3; ++k) c.frame.col(k) = vec_from_json(frame[k]);
        c.arc_length_mm = j.at("arc_length_mm").get<double>();
        return c;
    });
}

json scene_to_json(const Scene& scene) {
    json parts = json::array();
    for (const auto& p : scene.parts) parts.push_back(part_to_json(p));
    json splices = json::array();
    for (const auto& s : scene.splices) splices.push_back(splice_to_json(s));
    json clips = json::array();
    for (const auto& c : scene.clips) clips.push_back(clip_to_json(c));
    return {
        {"version", kSceneSchemaVersion},
        {"profile_ref", scene.profile_ref},
        {"next_label", scene.next_label},
        {"parts", parts},
        {"splices", splices},
        {"clips", clips},
    };
}

Scene scene_from_json(const json& j) {
    Scene scene = guarded("scene", [&] {
        reject_unknown(j, {"version", "profile_ref", "next_label", "parts", "splices", "clips"}, "scene");
        if (!j.contains("version")) throw VersionError("scene has no \"version\"");
        const auto& v = j.at("version");
        if (!v.is_number_integer() || v.get<int>() != kSceneSchemaVersion) {
            throw VersionError("unsupported scene version " + v.dump() + " (expected " +
                               std::to_string(kSceneSchemaVersion) + ")");
        }
        Scene s;
        s.profile_ref = j.value("profile_ref", s.profile_ref);
        for (const auto& p : j.value("parts", json::array())) s.parts.push_back(part_from_json(p));
        for (const auto& sp : j.value("splices", json::array())) s.splices.push_back(splice_from_json(sp));
        for (const auto& c : j.value("clips", json::array())) s.clips.push_back(clip_from_json(c));
        s.next_label = j.value("next_label", static_cast<int>(s.parts.size()) + 1);
        return s;
    });
    scene.validate();
    return scene;
}

std::string dump_scene(const Scene& scene) { return scene_to_json(scene).dump(2) + "\n"; }

Scene parse_scene(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("scene is not valid JSON: ") + e.what());
    }
    return scene_from_json(j);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("cannot read " + path.string());
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw IoError("cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot replace " + path.string());
    }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    const auto text = dump_scene(scene);
    auto lock = path;
    lock += ".lock";
    const int fd = ::open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
        if (errno == EEXIST) throw IoError(path.string() + " is being written by another process (" + lock.string() + ")");
        throw IoError("cannot lock " + path.string() + ": " + std::strerror(errno));
    }
    ::close(fd);
    try {
        write_file_atomic(path, text);
    } catch (...) {
        std::filesystem::remove(lock);
        throw;
    }
    std::filesystem::remove(lock);
}

Scene load_scene(const std::filesystem::path& path) {
    const auto text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
    return scene_from_json(j);
}

ExportFormat export_format_from_string(const std::string& name) {
    if (name == "coords") return ExportFormat::Coords;
    if (name == "frb") return ExportFormat::Frb;
    throw InvalidInput("export format must be 'coords' or 'frb', got '" + name + "'");
}

json plan_to_json(const AssemblyPlan& plan) {
    json steps = json::array();
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const auto& s = plan.steps[i];
        json step = {{"step", i + 1}, {"action", s.action}, {"part", s.part_label}, {"file", s.file_name}};
        if (s.counterpart) step["counterpart"] = *s.counterpart;
        if (s.via) step["via"] = *s.via;
        steps.push_back(step);
    }
    json clips = json::array();
    for (const auto& c : plan.clips) clips.push_back(clip_to_json(c));
    return {{"steps", steps}, {"clips", clips}};
}

std::string AssemblyExport::manifest() const { return plan_to_json(plan).dump(2) + "\n"; }

AssemblyExport export_assembly(const Scene& scene, const MachineProfile& profile, ExportFormat format, bool header) {
    std::vector<Violation> problems;
    try {
        scene.validate();
    } catch (const ConstraintViolation& e) {
        problems = e.violations();
    }

    AssemblyExport bundle;
    for (const auto& part : scene.parts) {
        try {
            check_compilable(part.path, profile);
        } catch (const ConstraintViolation& e) {
            for (auto v : e.violations()) {
                v.part = part.label;
                problems.push_back(std::move(v));
            }
            continue;
        }
        const auto name = part_file_name(part.label);
        bundle.files[name] = format == ExportFormat::Coords ? export_coords_csv(part, header)
                                                            : export_program_csv(compile(part.path, profile));
        bundle.plan.steps.push_back({part.label, name, "bend", std::nullopt, std::nullopt});
    }
    if (!problems.empty()) throw ConstraintViolation(std::move(problems));

    for (const auto& s : scene.splices) {
        bundle.plan.steps.push_back({s.part_a, part_file_name(s.part_a), "splice", s.part_b, s.bridge});
    }
    bundle.plan.clips = scene.clips;
    return bundle;
}

void write_assembly(const AssemblyExport& bundle, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, bytes] : bundle.files) write_file_atomic(dir / name, bytes);
    write_file_atomic(dir / "plan.json", bundle.manifest());
}

}  // namespace wirebend
