#include "cgann/harness.hpp"

#include <chrono>

#include "cgann/dataset.hpp"

namespace cgann {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunReport run_benchmark(const HarnessConfig& cfg, const ProgressSink& sink) {
    validate_harness_config(cfg);
    const TableData table = load_dataset(cfg.dataset);
    const SplitPlan plan = split_5x2(table, cfg.search.seed);

    RunReport report;
    report.config_snapshot = config_snapshot(cfg);
    report.seed = cfg.search.seed;
    const auto bench_start = std::chrono::steady_clock::now();

    const RngKey master = RngKey::root(cfg.search.seed);
    for (const UpdateMode mode : cfg.modes) {
        for (int rep = 0; rep < 5; ++rep) {
            for (int fold = 0; fold < 2; ++fold) {
                SearchConfig scfg = cfg.search;
                scfg.mode = mode;
                scfg.seed = master.fold(1000 + rep * 2 + fold).value();
                const DataSplit split =
                    materialize_fold(table, plan.replications[rep][fold], cfg.scale_features);
                const auto t0 = std::chrono::steady_clock::now();
                const SearchResult result = run_search(scfg, split, sink);
                const double wall = seconds_since(t0);
                for (const AlgorithmResult& alg : result.algorithms) {
                    RunRecord record;
                    record.dataset = table.name;
                    record.method = to_string(mode);
                    record.algorithm = alg.algorithm;
                    record.replication = rep + 1;
                    record.fold = fold + 1;
                    record.train_mse = alg.train_mse;
                    record.validation_mse = alg.validation_mse;
                    record.test_mse = alg.test_mse;
                    record.arch = alg.arch;
                    record.rule = alg.rule;
                    record.wall_seconds = wall;
                    record.seed = scfg.seed;
                    report.records.push_back(std::move(record));
                }
            }
        }
    }
    report.wall_seconds = seconds_since(bench_start);
    return report;
}

}  // namespace cgann
