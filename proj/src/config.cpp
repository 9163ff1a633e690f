#include "attractorlab/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "attractorlab/errors.hpp"

namespace attractorlab {

namespace {

using ordered_json = nlohmann::ordered_json;

int edit_distance(const std::string& a, const std::string& b) {
    std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= b.size(); ++j) {
            int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

// Rejects keys outside the allowed set, suggesting the nearest known key.
void check_keys(const ordered_json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const std::string& key = item.key();
        bool known = false;
        for (const char* k : allowed)
            if (key == k) {
                known = true;
                break;
            }
        if (known) continue;
        std::string best;
        int best_d = 1 << 20;
        for (const char* k : allowed) {
            int d = edit_distance(key, k);
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        std::string msg = "unknown key \"" + key + "\" in " + ctx;
        if (best_d <= 3) msg += " (did you mean \"" + best + "\"?)";
        throw ParseError(msg);
    }
}

const ordered_json* child(const ordered_json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) return nullptr;
    if (!it->is_object())
        throw ParseError(std::string("key \"") + key + "\" must be an object");
    return &*it;
}

double get_num(const ordered_json& obj, const std::string& ctx, const char* key,
               double dflt) {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_number())
        throw ParseError("key \"" + ctx + "." + key + "\" must be a number");
    return it->get<double>();
}

std::int64_t get_int(const ordered_json& obj, const std::string& ctx, const char* key,
                     std::int64_t dflt) {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_number_integer())
        throw ParseError("key \"" + ctx + "." + key + "\" must be an integer");
    return it->get<std::int64_t>();
}

std::string get_str(const ordered_json& obj, const std::string& ctx, const char* key,
                    const std::string& dflt) {
    auto it = obj.find(key);
    if (it == obj.end()) return dflt;
    if (!it->is_string())
        throw ParseError("key \"" + ctx + "." + key + "\" must be a string");
    return it->get<std::string>();
}

void require_range(bool ok, const std::string& field, const std::string& range,
                   double got) {
    if (ok) return;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", got);
    throw ValidationError(field + " must be " + range + ", got " + buf);
}

Grid3 parse_grid(const ordered_json& obj, const std::string& ctx, const Grid3& dflt) {
    check_keys(obj, ctx, {"n_base", "n_fiber"});
    std::int64_t nb = get_int(obj, ctx, "n_base", dflt.n_base);
    std::int64_t nf = get_int(obj, ctx, "n_fiber", dflt.n_fiber);
    require_range(nb >= 8, ctx + ".n_base", ">= 8", static_cast<double>(nb));
    require_range(nf >= 8, ctx + ".n_fiber", ">= 8", static_cast<double>(nf));
    return Grid3{static_cast<int>(nb), static_cast<int>(nf)};
}

SystemSpec parse_system(const ordered_json& obj) {
    check_keys(obj, "system", {"base", "fiber", "modulations"});
    SystemSpec spec;
    if (auto it = obj.find("base"); it != obj.end()) {
        const auto& m = *it;
        if (!m.is_array() || m.size() != 2 || !m[0].is_array() || m[0].size() != 2 ||
            !m[1].is_array() || m[1].size() != 2)
            throw ParseError("system.base must be a 2x2 integer matrix [[a,b],[c,d]]");
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                if (!m[r][c].is_number_integer())
                    throw ParseError("system.base entries must be integers");
        spec.a = m[0][0].get<std::int64_t>();
        spec.b = m[0][1].get<std::int64_t>();
        spec.c = m[1][0].get<std::int64_t>();
        spec.d = m[1][1].get<std::int64_t>();
    }
    if (const ordered_json* f = child(obj, "fiber")) {
        check_keys(*f, "system.fiber", {"c0", "coeffs"});
        spec.c0 = get_num(*f, "system.fiber", "c0", 0.0);
        if (auto it = f->find("coeffs"); it != f->end()) {
            if (!it->is_array()) throw ParseError("system.fiber.coeffs must be an array");
            for (const auto& c : *it) {
                if (!c.is_object())
                    throw ParseError("system.fiber.coeffs entries must be objects");
                check_keys(c, "system.fiber.coeffs[]", {"k", "a", "b"});
                FourierCoeff fc;
                std::int64_t k = get_int(c, "system.fiber.coeffs[]", "k", 0);
                require_range(k >= 1, "system.fiber.coeffs[].k", ">= 1",
                              static_cast<double>(k));
                fc.k = static_cast<int>(k);
                fc.a = get_num(c, "system.fiber.coeffs[]", "a", 0.0);
                fc.b = get_num(c, "system.fiber.coeffs[]", "b", 0.0);
                spec.coeffs.push_back(fc);
            }
        }
    }
    if (auto it = obj.find("modulations"); it != obj.end()) {
        if (!it->is_array()) throw ParseError("system.modulations must be an array");
        for (const auto& m : *it) {
            if (!m.is_object())
                throw ParseError("system.modulations entries must be objects");
            check_keys(m, "system.modulations[]",
                       {"target", "harmonic", "m1", "m2", "amp", "phase"});
            Modulation mod;
            std::string target = get_str(m, "system.modulations[]", "target", "c0");
            if (target == "c0")
                mod.target.kind = ModulationTarget::Kind::c0;
            else if (target == "a")
                mod.target.kind = ModulationTarget::Kind::a;
            else if (target == "b")
                mod.target.kind = ModulationTarget::Kind::b;
            else
                throw ValidationError(
                    "system.modulations[].target must be \"c0\", \"a\" or \"b\", got \"" +
                    target + "\"");
            std::int64_t harm = get_int(m, "system.modulations[]", "harmonic", 0);
            if (mod.target.kind != ModulationTarget::Kind::c0)
                require_range(harm >= 1, "system.modulations[].harmonic", ">= 1",
                              static_cast<double>(harm));
            mod.target.harmonic = static_cast<int>(harm);
            mod.m1 = static_cast<int>(get_int(m, "system.modulations[]", "m1", 0));
            mod.m2 = static_cast<int>(get_int(m, "system.modulations[]", "m2", 0));
            mod.amp = get_num(m, "system.modulations[]", "amp", 0.0);
            mod.phase = get_num(m, "system.modulations[]", "phase", 0.0);
            spec.modulations.push_back(mod);
        }
    }
    return spec;
}

ordered_json system_json(const SystemSpec& s) {
    ordered_json j;
    j["base"] = {{s.a, s.b}, {s.c, s.d}};
    ordered_json fiber;
    fiber["c0"] = s.c0;
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : s.coeffs) coeffs.push_back({{"k", c.k}, {"a", c.a}, {"b", c.b}});
    fiber["coeffs"] = coeffs;
    j["fiber"] = fiber;
    ordered_json mods = ordered_json::array();
    for (const auto& m : s.modulations) {
        const char* target = m.target.kind == ModulationTarget::Kind::c0  ? "c0"
                             : m.target.kind == ModulationTarget::Kind::a ? "a"
                                                                          : "b";
        mods.push_back({{"target", target},
                        {"harmonic", m.target.harmonic},
                        {"m1", m.m1},
                        {"m2", m.m2},
                        {"amp", m.amp},
                        {"phase", m.phase}});
    }
    j["modulations"] = mods;
    return j;
}

}  // namespace

bool operator==(const SystemSpec& x, const SystemSpec& y) {
    if (x.a != y.a || x.b != y.b || x.c != y.c || x.d != y.d || x.c0 != y.c0) return false;
    if (x.coeffs.size() != y.coeffs.size() || x.modulations.size() != y.modulations.size())
        return false;
    for (std::size_t i = 0; i < x.coeffs.size(); ++i)
        if (x.coeffs[i].k != y.coeffs[i].k || x.coeffs[i].a != y.coeffs[i].a ||
            x.coeffs[i].b != y.coeffs[i].b)
            return false;
    for (std::size_t i = 0; i < x.modulations.size(); ++i) {
        const Modulation &m = x.modulations[i], &n = y.modulations[i];
        if (m.target.kind != n.target.kind || m.target.harmonic != n.target.harmonic ||
            m.m1 != n.m1 || m.m2 != n.m2 || m.amp != n.amp || m.phase != n.phase)
            return false;
    }
    return true;
}

bool operator==(const RunConfig& x, const RunConfig& y) {
    return serialize_config(x) == serialize_config(y);
}

SkewProduct build_system(const SystemSpec& spec) {
    ToralAutomorphism base(spec.a, spec.b, spec.c, spec.d);
    CircleMap tmpl(spec.c0, spec.coeffs);
    FiberFamily fibers(tmpl, spec.modulations);
    return SkewProduct(std::move(base), std::move(fibers));
}

RunConfig parse_config_text(const std::string& text) {
    ordered_json root;
    try {
        root = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("config is not valid JSON: ") + err.what());
    }
    if (!root.is_object()) throw ParseError("config root must be a JSON object");
    check_keys(root, "config",
               {"system", "grid", "nw_grid", "attractor", "stability", "saturation",
                "closure", "nonwander", "nw_n_steps", "thresholds", "seed", "exec", "out"});

    RunConfig cfg;
    ExperimentConfig& e = cfg.experiment;

    if (const ordered_json* s = child(root, "system")) cfg.system = parse_system(*s);
    if (const ordered_json* g = child(root, "grid")) e.grid = parse_grid(*g, "grid", e.grid);
    if (const ordered_json* g = child(root, "nw_grid"))
        e.nw_grid = parse_grid(*g, "nw_grid", e.nw_grid);

    if (const ordered_json* a = child(root, "attractor")) {
        check_keys(*a, "attractor",
                   {"n_samples", "n_steps", "burn_in", "theta", "tail_fraction"});
        std::int64_t ns = get_int(*a, "attractor", "n_samples", e.attractor.n_samples);
        require_range(ns >= 16, "attractor.n_samples", ">= 16", static_cast<double>(ns));
        e.attractor.n_samples = static_cast<int>(ns);
        e.attractor.n_steps = get_int(*a, "attractor", "n_steps", e.attractor.n_steps);
        require_range(e.attractor.n_steps >= 1, "attractor.n_steps", ">= 1",
                      static_cast<double>(e.attractor.n_steps));
        e.attractor.burn_in = get_int(*a, "attractor", "burn_in", e.attractor.burn_in);
        require_range(e.attractor.burn_in >= 0, "attractor.burn_in", ">= 0",
                      static_cast<double>(e.attractor.burn_in));
        e.attractor.theta = get_num(*a, "attractor", "theta", e.attractor.theta);
        require_range(e.attractor.theta > 0.0 && e.attractor.theta < 1.0,
                      "attractor.theta", "in (0, 1)", e.attractor.theta);
        e.attractor.tail_fraction =
            get_num(*a, "attractor", "tail_fraction", e.attractor.tail_fraction);
        require_range(e.attractor.tail_fraction > 0.0 && e.attractor.tail_fraction <= 1.0,
                      "attractor.tail_fraction", "in (0, 1]", e.attractor.tail_fraction);
    }

    if (const ordered_json* s = child(root, "stability")) {
        check_keys(*s, "stability",
                   {"eps_list", "n_steps", "n_boundary_samples", "delta_floor",
                    "fine_factor"});
        if (auto it = s->find("eps_list"); it != s->end()) {
            if (!it->is_array() || it->empty())
                throw ParseError("stability.eps_list must be a non-empty array");
            e.stability.eps_list.clear();
            for (const auto& v : *it) {
                if (!v.is_number())
                    throw ParseError("stability.eps_list entries must be numbers");
                double eps = v.get<double>();
                require_range(eps > 0.0 && eps <= 0.5, "stability.eps_list[]", "in (0, 0.5]",
                              eps);
                e.stability.eps_list.push_back(eps);
            }
        }
        e.stability.n_steps = get_int(*s, "stability", "n_steps", e.stability.n_steps);
        require_range(e.stability.n_steps >= 1, "stability.n_steps", ">= 1",
                      static_cast<double>(e.stability.n_steps));
        std::int64_t nbs = get_int(*s, "stability", "n_boundary_samples",
                                   e.stability.n_boundary_samples);
        require_range(nbs >= 1, "stability.n_boundary_samples", ">= 1",
                      static_cast<double>(nbs));
        e.stability.n_boundary_samples = static_cast<int>(nbs);
        e.stability.delta_floor =
            get_num(*s, "stability", "delta_floor", e.stability.delta_floor);
        require_range(e.stability.delta_floor > 0.0, "stability.delta_floor", "> 0",
                      e.stability.delta_floor);
        std::int64_t ff = get_int(*s, "stability", "fine_factor", e.stability.fine_factor);
        require_range(ff >= 1, "stability.fine_factor", ">= 1", static_cast<double>(ff));
        e.stability.fine_factor = static_cast<int>(ff);
    }

    if (const ordered_json* s = child(root, "saturation")) {
        check_keys(*s, "saturation",
                   {"n_probe", "leaf_radius", "fatten", "max_seg", "n_back", "node_tol"});
        std::int64_t np = get_int(*s, "saturation", "n_probe", e.saturation.n_probe);
        require_range(np >= 1, "saturation.n_probe", ">= 1", static_cast<double>(np));
        e.saturation.n_probe = static_cast<int>(np);
        e.saturation.leaf_radius =
            get_num(*s, "saturation", "leaf_radius", e.saturation.leaf_radius);
        require_range(e.saturation.leaf_radius > 0.0, "saturation.leaf_radius", "> 0",
                      e.saturation.leaf_radius);
        std::int64_t ft = get_int(*s, "saturation", "fatten", e.saturation.fatten);
        require_range(ft >= 0, "saturation.fatten", ">= 0", static_cast<double>(ft));
        e.saturation.fatten = static_cast<int>(ft);
        e.saturation.max_seg = get_num(*s, "saturation", "max_seg", e.saturation.max_seg);
        require_range(e.saturation.max_seg >= 0.0, "saturation.max_seg", ">= 0",
                      e.saturation.max_seg);
        std::int64_t nb = get_int(*s, "saturation", "n_back", e.saturation.n_back);
        require_range(nb >= 1, "saturation.n_back", ">= 1", static_cast<double>(nb));
        e.saturation.n_back = static_cast<int>(nb);
        e.saturation.node_tol = get_num(*s, "saturation", "node_tol", e.saturation.node_tol);
        require_range(e.saturation.node_tol > 0.0, "saturation.node_tol", "> 0",
                      e.saturation.node_tol);
    }

    if (const ordered_json* c = child(root, "closure")) {
        check_keys(*c, "closure",
                   {"stall_length", "radius_budget", "max_seg", "n_back", "node_tol"});
        e.closure.stall_length =
            get_num(*c, "closure", "stall_length", e.closure.stall_length);
        require_range(e.closure.stall_length >= 0.0, "closure.stall_length", ">= 0",
                      e.closure.stall_length);
        e.closure.radius_budget =
            get_num(*c, "closure", "radius_budget", e.closure.radius_budget);
        require_range(e.closure.radius_budget > 0.0, "closure.radius_budget", "> 0",
                      e.closure.radius_budget);
        e.closure.max_seg = get_num(*c, "closure", "max_seg", e.closure.max_seg);
        require_range(e.closure.max_seg >= 0.0, "closure.max_seg", ">= 0", e.closure.max_seg);
        std::int64_t nb = get_int(*c, "closure", "n_back", e.closure.n_back);
        require_range(nb >= 1, "closure.n_back", ">= 1", static_cast<double>(nb));
        e.closure.n_back = static_cast<int>(nb);
        e.closure.node_tol = get_num(*c, "closure", "node_tol", e.closure.node_tol);
        require_range(e.closure.node_tol > 0.0, "closure.node_tol", "> 0",
                      e.closure.node_tol);
    }

    if (const ordered_json* n = child(root, "nonwander")) {
        check_keys(*n, "nonwander", {"steps_per_cell", "horizon"});
        e.nonwander.steps_per_cell =
            get_int(*n, "nonwander", "steps_per_cell", e.nonwander.steps_per_cell);
        require_range(e.nonwander.steps_per_cell >= 1, "nonwander.steps_per_cell", ">= 1",
                      static_cast<double>(e.nonwander.steps_per_cell));
        e.nonwander.horizon = get_int(*n, "nonwander", "horizon", e.nonwander.horizon);
        require_range(e.nonwander.horizon >= 1, "nonwander.horizon", ">= 1",
                      static_cast<double>(e.nonwander.horizon));
    }

    e.nw_n_steps = get_int(root, "config", "nw_n_steps", e.nw_n_steps);
    require_range(e.nw_n_steps >= 1, "nw_n_steps", ">= 1",
                  static_cast<double>(e.nw_n_steps));

    if (const ordered_json* t = child(root, "thresholds")) {
        check_keys(*t, "thresholds",
                   {"coincidence_tol", "shrink_min", "full_min", "nw_max", "dense_min",
                    "repeller_margin", "slack", "stability_ratio"});
        Thresholds& th = e.thresholds;
        th.coincidence_tol =
            get_num(*t, "thresholds", "coincidence_tol", th.coincidence_tol);
        require_range(th.coincidence_tol >= 0.0, "thresholds.coincidence_tol", ">= 0",
                      th.coincidence_tol);
        th.shrink_min = get_num(*t, "thresholds", "shrink_min", th.shrink_min);
        require_range(th.shrink_min > 1.0, "thresholds.shrink_min", "> 1", th.shrink_min);
        th.full_min = get_num(*t, "thresholds", "full_min", th.full_min);
        require_range(th.full_min > 0.0 && th.full_min <= 1.0, "thresholds.full_min",
                      "in (0, 1]", th.full_min);
        th.nw_max = get_num(*t, "thresholds", "nw_max", th.nw_max);
        require_range(th.nw_max > 0.0 && th.nw_max <= 1.0, "thresholds.nw_max", "in (0, 1]",
                      th.nw_max);
        th.dense_min = get_num(*t, "thresholds", "dense_min", th.dense_min);
        require_range(th.dense_min > 0.0 && th.dense_min <= 1.0, "thresholds.dense_min",
                      "in (0, 1]", th.dense_min);
        th.repeller_margin = get_num(*t, "thresholds", "repeller_margin", th.repeller_margin);
        require_range(th.repeller_margin > 0.0, "thresholds.repeller_margin", "> 0",
                      th.repeller_margin);
        th.slack = get_num(*t, "thresholds", "slack", th.slack);
        require_range(th.slack >= 0.0, "thresholds.slack", ">= 0", th.slack);
        th.stability_ratio = get_num(*t, "thresholds", "stability_ratio", th.stability_ratio);
        require_range(th.stability_ratio >= 1.0, "thresholds.stability_ratio", ">= 1",
                      th.stability_ratio);
    }

    if (auto it = root.find("seed"); it != root.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw ParseError("key \"seed\" must be an integer");
        if (it->is_number_integer() && it->get<std::int64_t>() < 0)
            throw ValidationError("seed must be >= 0");
        e.seed = it->get<std::uint64_t>();
    }

    std::string exec = get_str(root, "config", "exec", "openmp");
    if (exec == "serial")
        e.exec = ExecMode::serial;
    else if (exec == "openmp")
        e.exec = ExecMode::openmp;
    else
        throw ValidationError("exec must be \"serial\" or \"openmp\", got \"" + exec + "\"");

    cfg.out = get_str(root, "config", "out", "");
    e.propagate();
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config_text(buf.str());
    } catch (const ParseError& err) {
        throw ParseError(path + ": " + err.what());
    } catch (const ValidationError& err) {
        throw ValidationError(path + ": " + err.what());
    }
}

std::string serialize_config(const RunConfig& config) {
    const ExperimentConfig& e = config.experiment;
    ordered_json j;
    j["system"] = system_json(config.system);
    j["grid"] = {{"n_base", e.grid.n_base}, {"n_fiber", e.grid.n_fiber}};
    j["nw_grid"] = {{"n_base", e.nw_grid.n_base}, {"n_fiber", e.nw_grid.n_fiber}};
    j["attractor"] = {{"n_samples", e.attractor.n_samples},
                      {"n_steps", e.attractor.n_steps},
                      {"burn_in", e.attractor.burn_in},
                      {"theta", e.attractor.theta},
                      {"tail_fraction", e.attractor.tail_fraction}};
    j["stability"] = {{"eps_list", e.stability.eps_list},
                      {"n_steps", e.stability.n_steps},
                      {"n_boundary_samples", e.stability.n_boundary_samples},
                      {"delta_floor", e.stability.delta_floor},
                      {"fine_factor", e.stability.fine_factor}};
    j["saturation"] = {{"n_probe", e.saturation.n_probe},
                       {"leaf_radius", e.saturation.leaf_radius},
                       {"fatten", e.saturation.fatten},
                       {"max_seg", e.saturation.max_seg},
                       {"n_back", e.saturation.n_back},
                       {"node_tol", e.saturation.node_tol}};
    j["closure"] = {{"stall_length", e.closure.stall_length},
                    {"radius_budget", e.closure.radius_budget},
                    {"max_seg", e.closure.max_seg},
                    {"n_back", e.closure.n_back},
                    {"node_tol", e.closure.node_tol}};
    j["nonwander"] = {{"steps_per_cell", e.nonwander.steps_per_cell},
                      {"horizon", e.nonwander.horizon}};
    j["nw_n_steps"] = e.nw_n_steps;
    j["thresholds"] = {{"coincidence_tol", e.thresholds.coincidence_tol},
                       {"shrink_min", e.thresholds.shrink_min},
                       {"full_min", e.thresholds.full_min},
                       {"nw_max", e.thresholds.nw_max},
                       {"dense_min", e.thresholds.dense_min},
                       {"repeller_margin", e.thresholds.repeller_margin},
                       {"slack", e.thresholds.slack},
                       {"stability_ratio", e.thresholds.stability_ratio}};
    j["seed"] = e.seed;
    j["exec"] = e.exec == ExecMode::serial ? "serial" : "openmp";
    j["out"] = config.out;
    return j.dump(2) + "\n";
}

std::string config_hash(const RunConfig& config) {
    std::string text = serialize_config(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace attractorlab
