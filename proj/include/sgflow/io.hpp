#ifndef SGFLOW_IO_HPP
#define SGFLOW_IO_HPP

#include <cstdint>
#include <map>
#include <string>

#include "sgflow/diagnostics.hpp"
#include "sgflow/dynamics.hpp"

namespace sgflow {

inline constexpr const char* kArtifactVersion = "0.1.0";

// .sgt trajectory format: a versioned header line
//   SGT1 <dimension> <snapshot count> <atom count>
// then per snapshot a time line, one line per atom (coordinates and
// weight), and a diagnostics line; finally a CRC32 line over all
// preceding bytes. Floats carry 17 significant digits, so the round
// trip is exact for binary64 and rewriting a read file reproduces it
// byte for byte.
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

// CRC32 (IEEE 802.3) of a byte string.
std::uint32_t crc32(const std::string& bytes);

// Study reports: line-delimited JSON records (one per grid point or
// snapshot, plus a summary record). The companion *_table functions
// render the human-readable view the CLI prints.
void write_rate_report(const RateFit& fit, const std::string& study,
                       const std::string& path);
void write_eps_report(const EpsGapReport& report, const std::string& path);
void write_energy_report(const EnergyReport& report, const std::string& path);
void write_joint_report(const JointReport& report, const std::string& path);

std::string rate_table(const RateFit& fit, const std::string& study);
std::string eps_table(const EpsGapReport& report);
std::string energy_table(const EnergyReport& report);
std::string joint_table(const JointReport& report);

// Joint-study schedule: one row per line, four whitespace-separated
// columns (epsilon, tau, atom count, seed), `#` comments allowed.
std::vector<JointScheduleRow> load_schedule(const std::string& path);

// Run manifest: the resolved configuration (every effective parameter),
// derived theory bounds, artifact version, wall-clock per stage, and the
// produced files.
void write_manifest(const SimulationConfig& config, const TheoryBounds& bounds,
                    const std::map<std::string, double>& timings_ms,
                    const std::vector<std::string>& outputs, const std::string& path);

} // namespace sgflow

#endif
