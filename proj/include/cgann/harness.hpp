#pragma once

#include "cgann/config.hpp"
#include "cgann/report.hpp"
#include "cgann/search.hpp"

namespace cgann {

// The full 5x2 cross-validation benchmark: loads the dataset, builds the
// split plan, runs the nested search once per (mode, replication, fold),
// and assembles the report. Per-fold seeds derive from the master seed.
RunReport run_benchmark(const HarnessConfig& cfg, const ProgressSink& sink = {});

}  // namespace cgann
