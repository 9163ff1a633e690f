#include "attractorlab/artifacts.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "attractorlab/errors.hpp"

namespace attractorlab {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no encoding for nonfinite numbers; render them as strings so the
// report stays loadable everywhere.
ordered_json json_num(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

ordered_json entry_json(const CheckEntry& e) {
    ordered_json j;
    j["name"] = e.name;
    j["status"] = to_cstring(e.status);
    ordered_json metrics;
    for (const auto& [key, value] : e.metrics) metrics[key] = json_num(value);
    j["metrics"] = metrics;
    ordered_json notes;
    for (const auto& [key, value] : e.notes) notes[key] = value;
    j["notes"] = notes;
    j["artifacts"] = e.artifacts;
    return j;
}

}  // namespace

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ValidationError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw ValidationError("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string csv_cells(const CellSet& s) {
    std::string out = "i,j,k\n";
    for (std::uint32_t c : s.members) {
        int i = 0, j = 0, k = 0;
        s.grid.decompose(c, i, j, k);
        out += std::to_string(i);
        out += ',';
        out += std::to_string(j);
        out += ',';
        out += std::to_string(k);
        out += '\n';
    }
    return out;
}

std::string csv_leaf(const LeafGraph& g) {
    std::string out = "t,x1,x2,y\n";
    for (const auto& n : g.nodes) {
        out += fmt(n.t) + "," + fmt(n.point.base.x1) + "," + fmt(n.point.base.x2) + "," +
               fmt(n.point.y) + "\n";
    }
    return out;
}

std::string csv_orbit(const std::vector<PointX>& pts) {
    std::string out = "x1,x2,y\n";
    for (const auto& p : pts)
        out += fmt(p.base.x1) + "," + fmt(p.base.x2) + "," + fmt(p.y) + "\n";
    return out;
}

std::string csv_scan(const std::vector<PerturbationPoint>& pts) {
    std::string out = "b,z_hat\n";
    for (const auto& p : pts) out += fmt(p.b) + "," + fmt(p.z_hat) + "\n";
    return out;
}

std::string ppm_heatmap(const CellSet& s) {
    int nb = s.grid.n_base;
    int nf = s.grid.n_fiber;
    std::vector<int> counts(static_cast<std::size_t>(nb) * nb, 0);
    for (std::uint32_t c : s.members) {
        int i = 0, j = 0, k = 0;
        s.grid.decompose(c, i, j, k);
        (void)k;
        ++counts[static_cast<std::size_t>(j) * nb + i];
    }
    int max_count = 1;
    for (int c : counts) max_count = std::max(max_count, c);
    (void)nf;
    std::string out = "P5\n" + std::to_string(nb) + " " + std::to_string(nb) + "\n255\n";
    out.reserve(out.size() + static_cast<std::size_t>(nb) * nb);
    for (int row = 0; row < nb; ++row) {
        int j = nb - 1 - row;  // top row = largest x2
        for (int i = 0; i < nb; ++i) {
            int c = counts[static_cast<std::size_t>(j) * nb + i];
            out += static_cast<char>((255 * c) / max_count);
        }
    }
    return out;
}

std::string report_json(const SuiteReport& rep, const std::string& config_echo) {
    ordered_json j;
    j["system"] = rep.system_description;
    j["seed"] = rep.seed;
    j["status"] = to_cstring(rep.aggregate());
    ordered_json entries = ordered_json::array();
    for (const auto& e : rep.entries) entries.push_back(entry_json(e));
    j["entries"] = entries;
    if (!config_echo.empty()) {
        try {
            j["config"] = ordered_json::parse(config_echo);
        } catch (const nlohmann::json::parse_error&) {
            j["config"] = config_echo;
        }
    }
    return j.dump(2) + "\n";
}

std::string probe_json(const StabilityProbeReport& rep) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rep.results) {
        ordered_json j;
        j["eps"] = json_num(r.eps);
        j["delta_found"] = json_num(r.delta_found);
        if (r.witness) {
            j["witness_start"] = {json_num(r.witness->start.base.x1),
                                  json_num(r.witness->start.base.x2),
                                  json_num(r.witness->start.y)};
            j["escape_step"] = r.witness->escape_step;
            j["escape_distance"] = json_num(r.witness->escape_distance);
        }
        arr.push_back(j);
    }
    ordered_json j;
    j["results"] = arr;
    return j.dump(2) + "\n";
}

std::string certificate_json(const HyperbolicityCertificate& cert) {
    ordered_json j;
    j["ok"] = cert.ok;
    j["grid_n"] = cert.grid_n;
    j["inf_derivative"] = json_num(cert.inf_derivative);
    j["sup_derivative"] = json_num(cert.sup_derivative);
    j["inf_certified"] = json_num(cert.inf_certified);
    j["sup_certified"] = json_num(cert.sup_certified);
    j["slack"] = json_num(cert.slack);
    j["margin_stable"] = json_num(cert.margin_stable);
    j["margin_unstable"] = json_num(cert.margin_unstable);
    j["violated_side"] = cert.violated_side;
    return j.dump(2) + "\n";
}

}  // namespace attractorlab
