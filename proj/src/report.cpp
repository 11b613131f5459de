#include "cgann/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "cgann/ftest.hpp"

namespace cgann {

namespace {

using nlohmann::json;

json arch_to_json(const ArchGenome& arch) {
    json layers = json::array();
    for (const HiddenLayer& layer : arch.layers)
        layers.push_back({{"size", layer.size}, {"act", to_string(layer.act)}});
    return layers;
}

ArchGenome arch_from_json(const json& j) {
    ArchGenome arch;
    for (const json& layer : j)
        arch.layers.push_back(
            {layer.at("size").get<int>(), activation_from_string(layer.at("act"))});
    return arch;
}

}  // namespace

std::string record_to_json_line(const RunRecord& r) {
    json j;
    j["dataset"] = r.dataset;
    j["method"] = r.method;
    j["algorithm"] = to_string(r.algorithm);
    j["replication"] = r.replication;
    j["fold"] = r.fold;
    j["train_mse"] = r.train_mse;
    j["validation_mse"] = r.validation_mse;
    j["test_mse"] = r.test_mse;
    j["hidden"] = arch_to_json(r.arch);
    j["rule"] = {r.rule.params[0], r.rule.params[1]};
    j["wall_seconds"] = r.wall_seconds;
    j["seed"] = r.seed;
    return j.dump();
}

RunRecord record_from_json_line(const std::string& line) {
    const json j = json::parse(line);
    RunRecord r;
    r.dataset = j.at("dataset");
    r.method = j.at("method");
    r.algorithm = learn_alg_from_string(j.at("algorithm"));
    r.replication = j.at("replication");
    r.fold = j.at("fold");
    r.train_mse = j.at("train_mse");
    r.validation_mse = j.at("validation_mse");
    r.test_mse = j.at("test_mse");
    r.arch = arch_from_json(j.at("hidden"));
    r.rule.algorithm = r.algorithm;
    r.rule.params[0] = j.at("rule").at(0);
    r.rule.params[1] = j.at("rule").at(1);
    r.wall_seconds = j.at("wall_seconds");
    r.seed = j.at("seed");
    return r;
}

std::vector<RunRecord> read_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file: " + path);
    std::vector<RunRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        records.push_back(record_from_json_line(line));
    }
    return records;
}

namespace {

struct GroupKey {
    std::string dataset;
    std::string method;
    LearnAlg algorithm;
    bool operator<(const GroupKey& o) const {
        if (dataset != o.dataset) return dataset < o.dataset;
        if (method != o.method) return method < o.method;
        return static_cast<int>(algorithm) < static_cast<int>(o.algorithm);
    }
};

std::map<GroupKey, std::vector<const RunRecord*>> group_records(
    const std::vector<RunRecord>& records) {
    std::map<GroupKey, std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records)
        groups[{r.dataset, r.method, r.algorithm}].push_back(&r);
    return groups;
}

// 10 test errors ordered (replication 1 fold 1, ..., replication 5 fold 2),
// or empty when the group is not a complete 5x2.
std::vector<double> ordered_errors(const std::vector<const RunRecord*>& group) {
    if (group.size() != 10) return {};
    std::vector<double> out(10, 0.0);
    std::vector<bool> seen(10, false);
    for (const RunRecord* r : group) {
        if (r->replication < 1 || r->replication > 5 || r->fold < 1 || r->fold > 2) return {};
        const int slot = (r->replication - 1) * 2 + (r->fold - 1);
        if (seen[slot]) return {};
        seen[slot] = true;
        out[slot] = r->test_mse;
    }
    return out;
}

}  // namespace

std::string summary_table(const std::vector<RunRecord>& records) {
    std::ostringstream out;
    out << "Test MSE (%) per (dataset, method, algorithm); mean and sample std over folds\n\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-16s %-14s %-5s %4s %10s %10s\n", "dataset", "method",
                  "alg", "n", "mean", "std");
    out << line;
    for (const auto& [key, group] : group_records(records)) {
        double mean = 0.0;
        for (const RunRecord* r : group) mean += r->test_mse;
        mean /= static_cast<double>(group.size());
        double var = 0.0;
        for (const RunRecord* r : group) var += (r->test_mse - mean) * (r->test_mse - mean);
        const double std_dev =
            group.size() > 1 ? std::sqrt(var / static_cast<double>(group.size() - 1)) : 0.0;
        std::snprintf(line, sizeof(line), "%-16s %-14s %-5s %4zu %10.4f %10.4f\n",
                      key.dataset.c_str(), key.method.c_str(), to_string(key.algorithm),
                      group.size(), mean, std_dev);
        out << line;
    }
    return out.str();
}

std::string f_test_table(const std::vector<RunRecord>& records) {
    const auto groups = group_records(records);
    std::vector<std::string> methods;
    for (const auto& [key, group] : groups)
        if (std::find(methods.begin(), methods.end(), key.method) == methods.end())
            methods.push_back(key.method);
    if (methods.size() < 2) return "";

    std::ostringstream out;
    out << "Combined 5x2cv f tests between methods (> means F > "
        << kFTestRejectThreshold << ", reject equal error rates at 0.05)\n\n";
    char line[256];
    bool any = false;
    for (const auto& [key, group] : groups) {
        for (const auto& [other_key, other_group] : groups) {
            if (key.dataset != other_key.dataset || key.algorithm != other_key.algorithm)
                continue;
            if (key.method >= other_key.method) continue;  // each unordered pair once
            const std::vector<double> a = ordered_errors(group);
            const std::vector<double> b = ordered_errors(other_group);
            if (a.empty() || b.empty()) continue;
            const FTestResult res = f_test_5x2(a, b);
            std::snprintf(line, sizeof(line), "%-16s %-5s %-14s vs %-14s F=%-10.4g %s%s\n",
                          key.dataset.c_str(), to_string(key.algorithm), key.method.c_str(),
                          other_key.method.c_str(), res.statistic, res.reject ? ">" : "<",
                          res.degenerate ? " (degenerate)" : "");
            out << line;
            any = true;
        }
    }
    return any ? out.str() : "";
}

void emit_report(const RunReport& report, const std::string& out_dir) {
    if (report.records.empty())
        throw std::invalid_argument("emit_report: no completed runs, nothing to write");
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + out_dir);

    {
        std::ofstream out(dir / "records.jsonl");
        if (!out) throw std::runtime_error("cannot write " + (dir / "records.jsonl").string());
        for (const RunRecord& r : report.records) out << record_to_json_line(r) << '\n';
    }
    {
        std::ofstream out(dir / "summary.txt");
        if (!out) throw std::runtime_error("cannot write " + (dir / "summary.txt").string());
        out << summary_table(report.records);
    }
    const std::string ftests = f_test_table(report.records);
    if (!ftests.empty()) {
        std::ofstream out(dir / "ftests.txt");
        if (!out) throw std::runtime_error("cannot write " + (dir / "ftests.txt").string());
        out << ftests;
    }
    {
        json meta;
        meta["seed"] = report.seed;
        meta["wall_seconds"] = report.wall_seconds;
        json cfg = json::object();
        for (const auto& [k, v] : report.config_snapshot) cfg[k] = v;
        meta["config"] = cfg;
        std::ofstream out(dir / "meta.json");
        if (!out) throw std::runtime_error("cannot write " + (dir / "meta.json").string());
        out << meta.dump(2) << '\n';
    }
}

}  // namespace cgann
