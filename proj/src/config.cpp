#include "fissflow/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "fissflow/errors.hpp"
#include "fissflow/rng.hpp"

namespace fissflow {

using nlohmann::json;

double unit_to_si(const std::string& unit) {
    // factor to multiply a value in `unit` by to obtain SI
    static const std::map<std::string, double> table = {
        // length
        {"m", 1.0},
        {"dm", 0.1},
        {"cm", 0.01},
        {"mm", 1e-3},
        // density
        {"kg/m^3", 1.0},
        {"g/cm^3", 1000.0},
        // acceleration
        {"m/s^2", 1.0},
        {"cm/s^2", 0.01},
        // pressure
        {"Pa", 1.0},
        {"hPa", 100.0},
        {"kPa", 1000.0},
        {"barye", 0.1},
        {"kgf/m^2", 9.80665},
        // flow resistance (pressure * time / length^2)
        {"Pa*s/m^2", 1.0},
        {"kg/(m^3*s)", 1.0},
        {"g/(cm^3*s)", 1000.0},
        {"kgf*s/m^4", 9.80665},
        {"Pa*s/dm^2", 100.0},
        {"Pa*s/cm^2", 1e4},
        // time
        {"s", 1.0},
        // dimensionless
        {"", 1.0},
        {"1", 1.0},
    };
    const auto it = table.find(unit);
    if (it == table.end()) throw ConfigError("units: unknown unit '" + unit + "'");
    return it->second;
}

double Quantity::si() const { return value * unit_to_si(unit); }

FluidParams FluidSpec::to_si() const {
    FluidParams p;
    p.a = a.si();
    p.rho = rho.si();
    p.g = g.si();
    p.depth = depth.si();
    p.gamma = gamma;
    p.validate();
    return p;
}

void ExperimentConfig::validate() const {
    if (surface.preset.empty() && surface.file.empty())
        throw ConfigError("config: surface needs a preset name or a mesh file");
    if (!surface.from_file()) {
        if (mesh.target_elements < 1)
            throw ConfigError("config: random meshing needs mesh.target_elements >= 1");
    }
    if (pressure.kind != "none" && pressure.kind != "log-well" && pressure.kind != "file")
        throw ConfigError("config: unknown pressure kind '" + pressure.kind + "'");
    if (pressure.kind == "file" && pressure.file.empty())
        throw ConfigError("config: pressure kind 'file' needs a path");
    fluid.to_si();  // validates values and unit strings
    for (double t : times.values)
        if (t < 0.0) throw ConfigError("config: survival-curve times must be non-negative");
}

namespace {

Quantity quantity_from(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), ""};
    if (!j.is_object() || !j.contains("value"))
        throw ConfigError(std::string("config: ") + what + " must be a number or {value, unit}");
    return {j.at("value").get<double>(), j.value("unit", "")};
}

json quantity_to(const Quantity& q) { return json{{"value", q.value}, {"unit", q.unit}}; }

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    try {
        ExperimentConfig cfg;
        cfg.experiment = j.value("experiment", "experiment");

        const json& s = j.at("surface");
        if (s.is_string()) {
            cfg.surface.preset = s.get<std::string>();
        } else if (s.is_object() && s.contains("file")) {
            cfg.surface.file = s.at("file").get<std::string>();
        } else {
            throw ConfigError("config: surface must be a preset name or {file: path}");
        }

        if (j.contains("pressure")) {
            const json& p = j.at("pressure");
            cfg.pressure.kind = p.value("kind", "none");
            if (cfg.pressure.kind == "log-well") {
                cfg.pressure.strength = quantity_from(p.at("strength"), "pressure.strength");
                const auto c = p.at("center");
                cfg.pressure.center = {c.at(0).get<double>(), c.at(1).get<double>()};
            } else if (cfg.pressure.kind == "file") {
                cfg.pressure.file = p.at("file").get<std::string>();
            }
        }

        if (j.contains("fluid")) {
            const json& f = j.at("fluid");
            if (f.contains("a")) cfg.fluid.a = quantity_from(f.at("a"), "fluid.a");
            if (f.contains("rho")) cfg.fluid.rho = quantity_from(f.at("rho"), "fluid.rho");
            if (f.contains("g")) cfg.fluid.g = quantity_from(f.at("g"), "fluid.g");
            if (f.contains("depth")) cfg.fluid.depth = quantity_from(f.at("depth"), "fluid.depth");
            cfg.fluid.gamma = f.value("gamma", 0.0);
        }

        if (j.contains("mesh")) {
            cfg.mesh.target_elements = j.at("mesh").value("target_elements", 0);
            cfg.mesh.seed = j.at("mesh").value("seed", std::uint64_t{0});
        }

        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            cfg.outputs.directory = o.value("directory", "out");
            cfg.outputs.vtk = o.value("vtk", true);
            cfg.outputs.fields_csv = o.value("fields_csv", true);
            cfg.outputs.psi_csv = o.value("psi_csv", true);
            cfg.outputs.phi_csv = o.value("phi_csv", true);
            cfg.outputs.report_csv = o.value("report_csv", true);
        }

        if (j.contains("times")) {
            const json& tm = j.at("times");
            cfg.times.values = tm.value("values", std::vector<double>{});
            cfg.times.elements = tm.value("elements", std::vector<int>{});
        }

        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    json j;
    j["experiment"] = cfg.experiment;
    if (cfg.surface.from_file())
        j["surface"] = json{{"file", cfg.surface.file}};
    else
        j["surface"] = cfg.surface.preset;

    json p{{"kind", cfg.pressure.kind}};
    if (cfg.pressure.kind == "log-well") {
        p["strength"] = quantity_to(cfg.pressure.strength);
        p["center"] = {cfg.pressure.center.x, cfg.pressure.center.y};
    } else if (cfg.pressure.kind == "file") {
        p["file"] = cfg.pressure.file;
    }
    j["pressure"] = p;

    j["fluid"] = json{{"a", quantity_to(cfg.fluid.a)},
                      {"rho", quantity_to(cfg.fluid.rho)},
                      {"g", quantity_to(cfg.fluid.g)},
                      {"depth", quantity_to(cfg.fluid.depth)},
                      {"gamma", cfg.fluid.gamma}};
    j["mesh"] = json{{"target_elements", cfg.mesh.target_elements}, {"seed", cfg.mesh.seed}};
    j["outputs"] = json{{"directory", cfg.outputs.directory},
                        {"vtk", cfg.outputs.vtk},
                        {"fields_csv", cfg.outputs.fields_csv},
                        {"psi_csv", cfg.outputs.psi_csv},
                        {"phi_csv", cfg.outputs.phi_csv},
                        {"report_csv", cfg.outputs.report_csv}};
    j["times"] = json{{"values", cfg.times.values}, {"elements", cfg.times.elements}};
    return j.dump(2) + "\n";
}

namespace {

bool quantity_eq(const Quantity& a, const Quantity& b) {
    return a.value == b.value && a.unit == b.unit;
}

}  // namespace

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return a.experiment == b.experiment && a.surface.preset == b.surface.preset &&
           a.surface.file == b.surface.file && a.pressure.kind == b.pressure.kind &&
           quantity_eq(a.pressure.strength, b.pressure.strength) &&
           a.pressure.center == b.pressure.center && a.pressure.file == b.pressure.file &&
           quantity_eq(a.fluid.a, b.fluid.a) && quantity_eq(a.fluid.rho, b.fluid.rho) &&
           quantity_eq(a.fluid.g, b.fluid.g) && quantity_eq(a.fluid.depth, b.fluid.depth) &&
           a.fluid.gamma == b.fluid.gamma && a.mesh.target_elements == b.mesh.target_elements &&
           a.mesh.seed == b.mesh.seed && a.outputs.directory == b.outputs.directory &&
           a.outputs.vtk == b.outputs.vtk && a.outputs.fields_csv == b.outputs.fields_csv &&
           a.outputs.psi_csv == b.outputs.psi_csv && a.outputs.phi_csv == b.outputs.phi_csv &&
           a.outputs.report_csv == b.outputs.report_csv && a.times.values == b.times.values &&
           a.times.elements == b.times.elements;
}

double surface_preset(const std::string& name, const Vec2& p) {
    constexpr double pi = std::numbers::pi;
    if (name == "flat") return 0.0;
    if (name == "example1")
        return 0.8 * (std::sin(2.0 * pi * p.x) * std::exp(-2.0 * pi * p.y) + p.y);
    if (name == "example2")
        return 0.5 * p.x * std::sin(2.0 * pi * p.x) + 0.5 * p.x + 0.075 * std::sin(6.0 * pi * p.y);
    if (name.rfind("plane(", 0) == 0 && name.back() == ')') {
        const std::string args = name.substr(6, name.size() - 7);
        const auto comma = args.find(',');
        if (comma != std::string::npos) {
            try {
                const double sx = std::stod(args.substr(0, comma));
                const double sy = std::stod(args.substr(comma + 1));
                return sx * p.x + sy * p.y;
            } catch (const std::exception&) {
                throw ConfigError("surface: bad plane slopes in '" + name + "'");
            }
        }
        throw ConfigError("surface: plane preset needs two slopes, got '" + name + "'");
    }
    throw ConfigError("surface: unknown preset '" + name + "'");
}

double pressure_preset(const PressureSpec& spec, const Vec2& p) {
    if (spec.kind == "none") return 0.0;
    if (spec.kind == "log-well") {
        const double dx = p.x - spec.center.x;
        const double dy = p.y - spec.center.y;
        return spec.strength.value * std::log(dx * dx + dy * dy);
    }
    throw ConfigError("pressure: preset evaluation not defined for kind '" + spec.kind + "'");
}

std::vector<Vec2> random_points(int count, std::uint64_t seed) {
    if (count < 4) throw InvalidInputError("random_points: need at least the 4 corners");

    std::vector<Vec2> pts{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    if (count == 4) return pts;

    // evenly spaced boundary ring so the convex hull stays the unit square
    int per_side = static_cast<int>(std::floor(std::sqrt(static_cast<double>(count)) / 2.0));
    per_side = std::min(per_side, (count - 4) / 4);
    for (int side = 0; side < 4; ++side) {
        for (int i = 1; i <= per_side; ++i) {
            const double s = static_cast<double>(i) / (per_side + 1);
            switch (side) {
                case 0: pts.push_back({s, 0.0}); break;
                case 1: pts.push_back({1.0, s}); break;
                case 2: pts.push_back({1.0 - s, 1.0}); break;
                default: pts.push_back({0.0, 1.0 - s}); break;
            }
        }
    }

    // interior points with a minimum separation, by seeded rejection
    const int n_interior = count - static_cast<int>(pts.size());
    const double min_dist = 0.5 / std::sqrt(static_cast<double>(count));
    SplitMix64 rng = SplitMix64::substream(seed, 0);
    for (int i = 0; i < n_interior; ++i) {
        Vec2 cand;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            cand = {min_dist + (1.0 - 2.0 * min_dist) * rng.next_double(),
                    min_dist + (1.0 - 2.0 * min_dist) * rng.next_double()};
            bool ok = true;
            for (const Vec2& q : pts) {
                if ((q - cand).squared_norm() < min_dist * min_dist) {
                    ok = false;
                    break;
                }
            }
            if (ok) break;
        }
        pts.push_back(cand);
    }
    return pts;
}

int count_for_target_elements(int target) {
    if (target < 1) throw InvalidInputError("count_for_target_elements: target must be positive");
    // Euler relation on a triangulated convex polygon: T = 2 V_int + V_bdry - 2
    int count = std::max(4, target);
    for (int iter = 0; iter < 32; ++iter) {
        int per_side = static_cast<int>(std::floor(std::sqrt(static_cast<double>(count)) / 2.0));
        per_side = std::min(per_side, std::max(0, (count - 4) / 4));
        const int n_bdry = 4 + 4 * per_side;
        const int n_int = std::max(0, (target + 2 - n_bdry) / 2);
        const int next = n_bdry + n_int;
        if (next == count) break;
        count = next;
    }
    return count;
}

ExperimentConfig example_config(int example, bool with_well, std::uint64_t seed) {
    if (example != 1 && example != 2) throw ConfigError("example_config: example must be 1 or 2");

    ExperimentConfig cfg;
    cfg.experiment = "example" + std::to_string(example) + (with_well ? "-well" : "-gravity");
    cfg.surface.preset = "example" + std::to_string(example);
    cfg.mesh.target_elements = example == 1 ? 322 : 1046;
    cfg.mesh.seed = seed;

    // published values; the resistance and well-strength unit readings follow
    // the calibration discussed in the README (the source declarations conflict)
    cfg.fluid.a = {1.3071e3, "kgf*s/m^4"};
    cfg.fluid.rho = {100.0, "kg/m^3"};
    cfg.fluid.g = {9.81, "m/s^2"};
    cfg.fluid.depth = {0.01, "m"};
    cfg.fluid.gamma = 0.03;

    if (with_well) {
        cfg.pressure.kind = "log-well";
        cfg.pressure.strength = {4000.0, "hPa"};
        // the first well sits beyond the upper-left corner, the second beyond
        // the upper-right one
        cfg.pressure.center = example == 1 ? Vec2{-110.0, 10.0} : Vec2{110.0, 110.0};
    }

    cfg.times.values = {1.0, 2.0, 5.0, 10.0, 20.0, 50.0};
    cfg.times.elements = {0, 1, 2};
    return cfg;
}

}  // namespace fissflow
