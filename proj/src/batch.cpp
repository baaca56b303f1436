#include "pitchstab/batch.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace pitchstab {

int batch_threads() {
    if (const char* env = std::getenv("PITCHSTAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

std::vector<SimTrace> run_batch_serial(const std::vector<ScenarioConfig>& configs) {
    std::vector<SimTrace> out;
    out.reserve(configs.size());
    for (const auto& c : configs) out.push_back(run_scenario(c));
    return out;
}

std::vector<SimTrace> run_batch(const std::vector<ScenarioConfig>& configs) {
    const auto n = static_cast<long>(configs.size());
    std::vector<SimTrace> out(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
#pragma omp parallel for schedule(dynamic) num_threads(batch_threads())
    for (long i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = run_scenario(configs[static_cast<std::size_t>(i)]);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace pitchstab
