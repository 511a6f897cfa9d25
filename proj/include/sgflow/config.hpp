#ifndef SGFLOW_CONFIG_HPP
#define SGFLOW_CONFIG_HPP

#include <string>

#include "sgflow/dynamics.hpp"

namespace sgflow {

// Flat key=value text, `#` starts a comment, matrices are row-major comma
// lists, the literal drift value "J" expands to the rotation block.
// Unknown and duplicate keys are rejected. Defaults: sinkhorn.tol 1e-9,
// sinkhorn.max_iter 50000, warm_start true, snapshot_stride 1, seeds 0.
SimulationConfig parse_config(const std::string& text);
SimulationConfig load_config(const std::string& path);

// Replaces the quantization seeds of both measures (alpha0 gets `seed`,
// mu0 gets `seed + 1` so the clouds stay distinct); measures loaded from
// files are unaffected.
void override_seeds(SimulationConfig& config, std::uint64_t seed);

// One atom per line: d coordinates then the weight, whitespace separated,
// `#` comments allowed.
DiscreteMeasure load_measure(const std::string& path, int expected_dim);

} // namespace sgflow

#endif
