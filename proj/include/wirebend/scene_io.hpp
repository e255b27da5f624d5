#pragma once

#include "wirebend/bend_compiler.hpp"
#include "wirebend/machine_model.hpp"
#include "wirebend/part.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wirebend {

// "x,y,z" rows, millimeters, 3 decimals, LF after every row. The optional
// header row is for bender software that wants one.
std::string export_coords_csv(const Polyline3& path, bool header = false);
std::string export_coords_csv(const WirePart& part, bool header = false);
// Accepts the output of export_coords_csv, with or without header.
Polyline3 parse_coords_csv(std::string_view text);

// "FEED,<mm>" / "ROTATE,<deg>" / "BEND,<deg>" rows, 3 decimals. The program
// is validated first, so an empty program throws ConstraintViolation.
std::string export_program_csv(const BendProgram& program);
BendProgram parse_program_csv(std::string_view text);

// Geometry input: either [[x,y,z], ...] or {"points": [[x,y,z], ...]}.
Polyline3 polyline_from_json(const nlohmann::json& j);
nlohmann::json polyline_to_json(const Polyline3& path);
Polyline3 load_polyline(const std::filesystem::path& path);

nlohmann::json spec_to_json(const ConnectorSpec& spec);
ConnectorSpec spec_from_json(const nlohmann::json& j);
nlohmann::json part_to_json(const WirePart& part);
WirePart part_from_json(const nlohmann::json& j);
nlohmann::json splice_to_json(const Splice& splice);
Splice splice_from_json(const nlohmann::json& j);
nlohmann::json clip_to_json(const ClipMount& clip);
ClipMount clip_from_json(const nlohmann::json& j);

inline constexpr int kSceneSchemaVersion = 1;

nlohmann::json scene_to_json(const Scene& scene);
// Throws VersionError for an unknown "version", InvalidInput for a bad shape
// and ConstraintViolation when the scene is inconsistent.
Scene scene_from_json(const nlohmann::json& j);

std::string dump_scene(const Scene& scene);
Scene parse_scene(std::string_view text);

// save_scene fails with IoError if another writer holds the file; the new
// contents replace the old atomically.
void save_scene(const Scene& scene, const std::filesystem::path& path);
Scene load_scene(const std::filesystem::path& path);

// Writes `bytes` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

enum class ExportFormat { Coords, Frb };
ExportFormat export_format_from_string(const std::string& name);

struct AssemblyStep {
    int part_label = 0;
    std::string file_name;
    std::string action;               // "bend" | "splice"
    std::optional<int> counterpart;   // splice: the other part
    std::optional<int> via;           // splice: bridge part, if any

    bool operator==(const AssemblyStep&) const = default;
};

struct AssemblyPlan {
    std::vector<AssemblyStep> steps;
    std::vector<ClipMount> clips;
};

nlohmann::json plan_to_json(const AssemblyPlan& plan);

struct AssemblyExport {
    std::map<std::string, std::string> files;  // part_<label>.csv -> bytes
    AssemblyPlan plan;

    // plan.json contents.
    std::string manifest() const;
};

inline std::string part_file_name(int label) { return "part_" + std::to_string(label) + ".csv"; }

// One CSV per part plus the plan: bend steps in label order, then splice
// steps. Every part is checked against the machine first; all problems are
// reported together as one ConstraintViolation.
AssemblyExport export_assembly(const Scene& scene, const MachineProfile& profile, ExportFormat format,
                               bool header = false);

// Writes every file and plan.json into `dir` (created if missing).
void write_assembly(const AssemblyExport& bundle, const std::filesystem::path& dir);

}  // namespace wirebend
