#pragma once

#include <string>
#include <string_view>

#include "omtube/harness.hpp"

namespace omtube {

/// Parses the JSON experiment description:
///   {"drift": {"preset": "double-well"} | {"coeffs": [a0, a1, ...]},
///    "c": 1.0, "l": 5.0, "x0": -1.0, "xf": 1.0, "kappa": 0.5,
///    "sim": {"dt": 1e-4, "horizon": 1.5, "seed": 1},
///    "experiment": {"n_paths": 30000, "bin_edges": [0, 0.25, ...]}}
/// Missing keys take the double-well defaults. Throws InvalidInput on
/// malformed documents; the system itself is not validated here.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& filename);

/// Only the drift object, e.g. {"preset": "ou", "theta": 2}.
DriftModel parse_drift(std::string_view json_text);

}  // namespace omtube
