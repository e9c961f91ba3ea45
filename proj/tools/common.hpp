// Shared plumbing for the command line tool: mesh spec strings, numeric list
// parsing and the reproducible JSON artifact envelope.
#pragma once
#include <string>
#include <vector>

#include "json.hpp"
#include "vortexmf/mesh.hpp"

namespace vmf::tools {

inline constexpr const char* kToolVersion = "0.1.0";

// "disk:4096", "disk:4096:log", "disk:4096:uniform", "grid:2.2x2.2:0.01".
// The disk default is the log-graded mesh (resolves the vortex core).
MeshPtr parse_mesh_spec(const std::string& spec);

// "0.5,1,2" or the range form "a:b:n" (n equally spaced points, ends included).
std::vector<double> parse_double_list(const std::string& text, const char* what);

// 64-bit FNV-1a over the concatenated bytes of the given files, "none" when
// the list is empty. Missing files are config errors.
std::string input_hash(const std::vector<std::string>& paths);

// Artifact layout (insertion-ordered, byte-stable for identical configs):
//   { tool, version, subcommand, config, provenance, result, wall_time_s }
// wall_time_s is appended last by finish_artifact so consumers can drop the
// only non-deterministic field.
nlohmann::ordered_json artifact_envelope(const std::string& subcommand,
                                         nlohmann::ordered_json config,
                                         const std::vector<std::string>& input_files);
void finish_artifact(nlohmann::ordered_json& artifact, nlohmann::ordered_json result,
                     double wall_seconds);
// Empty path writes to stdout.
void write_artifact(const nlohmann::ordered_json& artifact, const std::string& out_path);

} // namespace vmf::tools
