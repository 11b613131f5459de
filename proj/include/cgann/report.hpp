#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cgann/genome_ops.hpp"
#include "cgann/network.hpp"

namespace cgann {

// One completed (dataset, method, algorithm, replication, fold) search.
struct RunRecord {
    std::string dataset;
    std::string method;  // update-mode label
    LearnAlg algorithm = LearnAlg::Bp;
    int replication = 0;  // 1..5
    int fold = 0;         // 1..2
    double train_mse = 0.0;
    double validation_mse = 0.0;
    double test_mse = 0.0;
    ArchGenome arch;
    RuleGenome rule;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;

    bool operator==(const RunRecord&) const = default;
};

struct RunReport {
    std::vector<std::pair<std::string, std::string>> config_snapshot;
    std::vector<RunRecord> records;
    double wall_seconds = 0.0;
    std::uint64_t seed = 0;
};

// Serialized record formats (stable):
//  - records.jsonl: one JSON object per line, full double precision
//  - summary.txt:   mean and sample standard deviation of the test MSE(%)
//                   per (dataset, method, algorithm)
//  - ftests.txt:    pairwise combined 5x2cv f tests between methods sharing
//                   a dataset and algorithm (written when >= 2 methods)
//  - meta.json:     config snapshot, master seed, wall clock
void emit_report(const RunReport& report, const std::string& out_dir);

std::string record_to_json_line(const RunRecord& record);
RunRecord record_from_json_line(const std::string& line);
std::vector<RunRecord> read_records(const std::string& path);

std::string summary_table(const std::vector<RunRecord>& records);
// empty string when fewer than two methods are present
std::string f_test_table(const std::vector<RunRecord>& records);

}  // namespace cgann
