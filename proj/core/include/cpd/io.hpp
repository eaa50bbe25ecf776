#pragma once

// Serializers: CSV for time series, JSON for reports. Floats are written
// with 17 significant digits so round-off-level energy errors survive a
// round trip. Output is deterministic for a given record.

#include <string>

#include "cpd/harness.hpp"

namespace cpd {

/// Header `t,x1,x2,x3,v1,v2,v3,aux,H,modified_energy,rel_energy_err`, one
/// row per recorded step (the t=0 row included), metadata as `#`-prefixed
/// comments. Throws IoError naming the path on failure.
void write_trajectory_csv(const TrajectoryRecord& rec, const std::string& path);

/// Parses a file produced by write_trajectory_csv (data columns and
/// metadata comments). Round-trips values bit-exactly.
TrajectoryRecord read_trajectory_csv(const std::string& path);

void write_trajectory_json(const TrajectoryRecord& rec, const std::string& path);

void write_report_json(const ConvergenceReport& rep, const std::string& path);
void write_report_json(const TimingReport& rep, const std::string& path);

/// Several convergence cells (scheme x eps sweep) in one document under a
/// stable `cells` key.
void write_report_json(const std::vector<ConvergenceReport>& reports,
                       const std::string& path);

}  // namespace cpd
