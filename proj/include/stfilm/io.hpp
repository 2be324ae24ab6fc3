#pragma once

/// @file io.hpp
/// @brief CSV persistence: trajectory diagnostics and field snapshots, in
///        full round-trip decimal precision.

#include <string>
#include <vector>

#include "stfilm/diagnostics.hpp"
#include "stfilm/grid.hpp"

namespace stfilm {

/// Shortest decimal string that round-trips the double ("%.17g").
std::string format_full(double v);

/// Column order (header row mandatory):
///   t, mass, energy_J, entropy, min_u, max_u, sup_dev, cum_dissipation, cum_d2
void write_trajectory_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

/// Inverse of write_trajectory_csv. Throws IoError on malformed input.
std::vector<DiagnosticsRecord> read_trajectory_csv(const std::string& path);

/// Self-describing snapshot: header lines `# L=`, `# n=`, `# t=`,
/// `# epsilon=`, a column line `x,u`, then one `x,u` row per node.
void write_snapshot(const std::string& path, const Field& u, double t, double epsilon);

struct Snapshot {
    double L = 0.0;
    int n = 0;
    double t = 0.0;
    double epsilon = 0.0;
    std::vector<double> x;
    std::vector<double> u;
};

/// Inverse of write_snapshot. Throws IoError on malformed input.
Snapshot read_snapshot(const std::string& path);

} // namespace stfilm
