#pragma once

#include <string>
#include <vector>

#include "attractorlab/experiments.hpp"
#include "attractorlab/grid.hpp"
#include "attractorlab/manifolds.hpp"
#include "attractorlab/skew.hpp"

namespace attractorlab {

// Writes content to path through a temporary file plus rename, so a crashed
// run never leaves a partial file behind.
void atomic_write(const std::string& path, const std::string& content);

// Cell-index triples, one line per member cell.
std::string csv_cells(const CellSet& s);

// Leaf graph nodes as "t,x1,x2,y" rows.
std::string csv_leaf(const LeafGraph& g);

// Orbit points as "x1,x2,y" rows.
std::string csv_orbit(const std::vector<PointX>& pts);

// Perturbation scan as "b,z_hat" rows.
std::string csv_scan(const std::vector<PerturbationPoint>& pts);

// Binary 8-bit PPM (header "P5\n<w> <h>\n255\n", then row-major bytes):
// fiber-occupancy counts per base cell, scaled to the busiest cell.  Row 0
// is the top of the image (largest x2); columns follow x1.
std::string ppm_heatmap(const CellSet& s);

// Deterministic JSON serializations: insertion-ordered keys, no timestamps,
// nonfinite numbers rendered as strings.
std::string report_json(const SuiteReport& rep, const std::string& config_echo);
std::string probe_json(const StabilityProbeReport& rep);
std::string certificate_json(const HyperbolicityCertificate& cert);

}  // namespace attractorlab
