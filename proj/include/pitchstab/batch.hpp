#pragma once

#include "pitchstab/harness.hpp"

#include <vector>

namespace pitchstab {

// Runs independent scenarios across OpenMP threads. Results are in input order and
// identical to run_batch_serial, since every run carries its own seed.
std::vector<SimTrace> run_batch(const std::vector<ScenarioConfig>& configs);

std::vector<SimTrace> run_batch_serial(const std::vector<ScenarioConfig>& configs);

// Thread count for run_batch: PITCHSTAB_THREADS if set and positive, else the OpenMP default.
int batch_threads();

}  // namespace pitchstab
