#pragma once

#include <string>
#include <vector>

#include "fissflow/config.hpp"
#include "fissflow/lifting.hpp"
#include "fissflow/observables.hpp"
#include "fissflow/projection.hpp"
#include "fissflow/transport.hpp"

namespace fissflow {

// Everything the stages produce, kept alive for inspection and testing.
struct PipelineResult {
    Triangulation mesh;
    LiftedGeometry geometry;
    NodalScalarField zeta;
    NodalScalarField pressure_potential;  // SI
    PressureSolution pressure;
    ElementField2 v0;       // primary field
    ElementField2 v;        // master conservative field
    ElementField3 u;        // global lifted field
    StreamlineData streamlines;
    Generator gen;
    JumpChain jumps;
    ForestCheck forest;
    ExitTimes exit_times;
    EnergyReport report;
    std::vector<std::string> written_files;
};

// Runs every stage and writes the configured outputs. On failure the partial
// outputs are removed and the error is rethrown tagged with the stage name.
PipelineResult run_pipeline(const ExperimentConfig& cfg, bool write_outputs = true);

}  // namespace fissflow
