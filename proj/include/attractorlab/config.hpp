#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "attractorlab/circle_map.hpp"
#include "attractorlab/experiments.hpp"
#include "attractorlab/skew.hpp"

namespace attractorlab {

// Declarative system description as it appears in config files.
struct SystemSpec {
    std::int64_t a = 2, b = 1, c = 1, d = 1;  // base matrix rows [[a,b],[c,d]]
    double c0 = 0.0;
    std::vector<FourierCoeff> coeffs;
    std::vector<Modulation> modulations;
};

// Everything a run needs: the system, the experiment parameters, and the
// output root.  Parsing fills defaults, rejects unknown keys (with a
// nearest-key suggestion) and validates ranges; serialization writes every
// field explicitly so parse(serialize(cfg)) == cfg.
struct RunConfig {
    SystemSpec system;
    ExperimentConfig experiment;
    std::string out;  // output root directory ("" = no artifacts)
};

bool operator==(const SystemSpec& a, const SystemSpec& b);
bool operator==(const RunConfig& a, const RunConfig& b);

SkewProduct build_system(const SystemSpec& spec);

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::string& path);

std::string serialize_config(const RunConfig& config);

// FNV-1a hash of the serialized config, as 16 hex digits; names run
// directories so identical configs land in identical places.
std::string config_hash(const RunConfig& config);

}  // namespace attractorlab
