#include "common.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "vortexmf/errors.hpp"

namespace vmf::tools {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

double to_double(const std::string& s, const char* what) {
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    require_config(end && *end == '\0' && !s.empty(),
                   std::string(what) + ": not a number: '" + s + "'");
    return v;
}

long to_long(const std::string& s, const char* what) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    require_config(end && *end == '\0' && !s.empty(),
                   std::string(what) + ": not an integer: '" + s + "'");
    return v;
}

} // namespace

MeshPtr parse_mesh_spec(const std::string& spec) {
    auto parts = split(spec, ':');
    require_config(!parts.empty() && !parts[0].empty(),
                   "mesh spec: expected disk:<nodes>[:log|:uniform] or grid:<W>x<H>:<h>");
    if (parts[0] == "disk") {
        require_config(parts.size() == 2 || parts.size() == 3,
                       "mesh spec: disk takes a node count and an optional grading");
        long n = to_long(parts[1], "mesh spec");
        Grading g = Grading::LogNearOrigin;
        if (parts.size() == 3) {
            if (parts[2] == "log")
                g = Grading::LogNearOrigin;
            else if (parts[2] == "uniform")
                g = Grading::Uniform;
            else
                throw config_error("mesh spec: grading must be 'log' or 'uniform'");
        }
        return build_disk_mesh(static_cast<int>(n), g);
    }
    if (parts[0] == "grid") {
        require_config(parts.size() == 3, "mesh spec: grid takes <W>x<H> and <h>");
        auto dims = split(parts[1], 'x');
        require_config(dims.size() == 2, "mesh spec: grid dimensions must be <W>x<H>");
        double w = to_double(dims[0], "mesh spec");
        double h_dim = to_double(dims[1], "mesh spec");
        double h = to_double(parts[2], "mesh spec");
        return build_grid_mesh(w, h_dim, h);
    }
    throw config_error("mesh spec: unknown kind '" + parts[0] + "'");
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    require_config(!text.empty(), std::string(what) + ": empty list");
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        require_config(parts.size() == 3, std::string(what) + ": range form is a:b:n");
        double a = to_double(parts[0], what), b = to_double(parts[1], what);
        long n = to_long(parts[2], what);
        require_config(n >= 2, std::string(what) + ": range needs n >= 2");
        for (long i = 0; i < n; ++i)
            out.push_back(a + (b - a) * double(i) / double(n - 1));
        return out;
    }
    for (const auto& item : split(text, ','))
        out.push_back(to_double(item, what));
    return out;
}

std::string input_hash(const std::vector<std::string>& paths) {
    if (paths.empty()) return "none";
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& p : paths) {
        std::ifstream is(p, std::ios::binary);
        require_config(bool(is), "input hash: cannot open '" + p + "'");
        char buf[4096];
        while (is.read(buf, sizeof buf) || is.gcount() > 0) {
            for (std::streamsize i = 0; i < is.gcount(); ++i) {
                h ^= static_cast<unsigned char>(buf[i]);
                h *= 1099511628211ull;
            }
        }
    }
    char hex[32];
    std::snprintf(hex, sizeof hex, "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return hex;
}

nlohmann::ordered_json artifact_envelope(const std::string& subcommand,
                                         nlohmann::ordered_json config,
                                         const std::vector<std::string>& input_files) {
    nlohmann::ordered_json j;
    j["tool"] = "vortexmf";
    j["version"] = kToolVersion;
    j["subcommand"] = subcommand;
    j["config"] = std::move(config);
    j["provenance"] = {{"input_hash", input_hash(input_files)}};
    return j;
}

void finish_artifact(nlohmann::ordered_json& artifact, nlohmann::ordered_json result,
                     double wall_seconds) {
    artifact["result"] = std::move(result);
    artifact["wall_time_s"] = wall_seconds;
}

void write_artifact(const nlohmann::ordered_json& artifact, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << artifact.dump(2) << "\n";
        return;
    }
    std::ofstream os(out_path);
    require_config(bool(os), "cannot open output file '" + out_path + "'");
    os << artifact.dump(2) << "\n";
}

} // namespace vmf::tools
