#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fissflow/darcy.hpp"
#include "fissflow/mesh.hpp"

namespace fissflow {

// A physical quantity carried with its declared unit string; `si()` converts
// through the unit table (unknown units are a config error).
struct Quantity {
    double value = 0.0;
    std::string unit;

    double si() const;
};

// Conversion factor to SI for a supported unit string.
double unit_to_si(const std::string& unit);

struct SurfaceSpec {
    // preset name ("example1", "example2", "flat", "plane(sx,sy)") or a mesh file
    std::string preset;
    std::string file;

    bool from_file() const { return !file.empty(); }
};

struct PressureSpec {
    std::string kind = "none";  // "none" | "log-well" | "file"
    Quantity strength{0.0, "Pa"};
    Vec2 center;
    std::string file;
};

struct FluidSpec {
    Quantity a{1.0, "Pa*s/m^2"};
    Quantity rho{1000.0, "kg/m^3"};
    Quantity g{9.81, "m/s^2"};
    Quantity depth{1.0, "m"};
    double gamma = 0.0;

    FluidParams to_si() const;
};

struct MeshSpec {
    int target_elements = 0;       // random meshing when > 0
    std::uint64_t seed = 0;
};

struct OutputSpec {
    std::string directory = "out";
    bool vtk = true;
    bool fields_csv = true;
    bool psi_csv = true;
    bool phi_csv = true;
    bool report_csv = true;
};

struct TimesSpec {
    std::vector<double> values;    // survival-curve export grid
    std::vector<int> elements;     // element subset for the phi columns
};

struct ExperimentConfig {
    std::string experiment = "experiment";
    SurfaceSpec surface;
    PressureSpec pressure;
    FluidSpec fluid;
    MeshSpec mesh;
    OutputSpec outputs;
    TimesSpec times;

    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Surface elevation presets evaluated exactly.
double surface_preset(const std::string& name, const Vec2& point);

// External pressure presets, in the preset's own declared unit.
double pressure_preset(const PressureSpec& spec, const Vec2& point);

// Seeded sample-point generator on the unit square: 4 corners, an evenly
// spaced boundary ring, then uniformly random well-separated interior points.
std::vector<Vec2> random_points(int count, std::uint64_t seed);

// Point count whose Delaunay triangulation hits the requested element count
// (exact via the Euler relation when the parity works out).
int count_for_target_elements(int target);

// Ready-made configurations of the two published experiments.
ExperimentConfig example_config(int example, bool with_well, std::uint64_t seed);

}  // namespace fissflow
