#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "cgann/config.hpp"
#include "cgann/dataset.hpp"
#include "cgann/ftest.hpp"
#include "cgann/report.hpp"

using namespace cgann;

namespace {

// Independent oracle: the combined 5x2cv f statistic evaluated step by step
// from its definition, accumulated in long double.
struct BruteForceF {
    long double statistic;
    bool defined;
};

BruteForceF brute_force_f(const std::vector<double>& a, const std::vector<double>& b) {
    long double num = 0.0L;
    long double den = 0.0L;
    for (int i = 0; i < 5; ++i) {
        const long double p1 = static_cast<long double>(a[2 * i]) - b[2 * i];
        const long double p2 = static_cast<long double>(a[2 * i + 1]) - b[2 * i + 1];
        const long double pbar = (p1 + p2) / 2.0L;
        num += p1 * p1 + p2 * p2;
        den += (p1 - pbar) * (p1 - pbar) + (p2 - pbar) * (p2 - pbar);
    }
    den *= 2.0L;
    if (den == 0.0L) return {0.0L, false};
    return {num / den, true};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("load_dataset") {
    SUBCASE("three string labels become a 3-wide one-hot encoding") {
        const std::string path = temp_path("cgann_abc.csv");
        write_file(path, "1.0,2.0,a\n2.0,1.0,b\n0.5,0.5,c\n1.5,2.5,a\n");
        const TableData t = load_dataset({"abc", path, 2, 3, 4});
        CHECK(t.examples() == 4);
        CHECK(t.classes() == 3);
        CHECK(t.class_names == std::vector<std::string>{"a", "b", "c"});
        CHECK(t.labels == std::vector<int>{0, 1, 2, 0});
        const Matrix targets = one_hot(t.labels, 3);
        CHECK(targets(0, 0) == 1.0);
        CHECK(targets(1, 1) == 1.0);
        CHECK(targets(2, 2) == 1.0);
        for (int r = 0; r < 4; ++r) {
            double sum = 0.0;
            for (int c = 0; c < 3; ++c) sum += targets(r, c);
            CHECK(sum == 1.0);
        }
    }

    SUBCASE("declared example count must match the file") {
        const std::string path = temp_path("cgann_count.csv");
        write_file(path, "1,0,x\n2,1,y\n");
        CHECK_THROWS_WITH_AS(load_dataset({"count", path, 2, 2, 3}),
                             doctest::Contains("declared 3 examples, file has 2"),
                             std::runtime_error);
    }

    SUBCASE("a non-numeric attribute is diagnosed with its line number") {
        const std::string path = temp_path("cgann_nan.csv");
        write_file(path, "1,2,x\n1,?,y\n");
        CHECK_THROWS_WITH_AS(load_dataset({"nan", path, 2, 2, 0}), doctest::Contains(":2:"),
                             std::runtime_error);
    }

    SUBCASE("a wrong-width row is diagnosed") {
        const std::string path = temp_path("cgann_width.csv");
        write_file(path, "1,2,x\n1,2,3,y\n");
        CHECK_THROWS_WITH_AS(load_dataset({"width", path, 2, 2, 0}),
                             doctest::Contains("expected 3 fields"), std::runtime_error);
    }

    SUBCASE("an unexpected extra class label is diagnosed") {
        const std::string path = temp_path("cgann_label.csv");
        write_file(path, "1,2,x\n2,3,y\n4,5,z\n");
        CHECK_THROWS_WITH_AS(load_dataset({"label", path, 2, 2, 0}),
                             doctest::Contains("unknown class label 'z'"), std::runtime_error);
    }

    SUBCASE("missing file is an error") {
        CHECK_THROWS(load_dataset({"gone", temp_path("cgann_gone.csv"), 2, 2, 0}));
    }
}

TEST_CASE("normalize (min-max on the fitting half only)") {
    Matrix fit(2, 3);
    fit(0, 0) = 0.0;
    fit(1, 0) = 10.0;
    fit(0, 1) = 4.0;  // constant column
    fit(1, 1) = 4.0;
    fit(0, 2) = -1.0;
    fit(1, 2) = 1.0;
    Matrix other(1, 3);
    other(0, 0) = 5.0;
    other(0, 1) = 99.0;
    other(0, 2) = -2.0;

    const auto [fit_scaled, other_scaled] = normalize(fit, other);
    CHECK(other_scaled(0, 0) == doctest::Approx(0.5));
    CHECK(other_scaled(0, 1) == 0.0);                       // constant column maps to 0
    CHECK(other_scaled(0, 2) == doctest::Approx(-0.5));     // outside the range, no clamp
    CHECK(fit_scaled(0, 0) == 0.0);
    CHECK(fit_scaled(1, 0) == 1.0);
    CHECK(fit_scaled(0, 1) == 0.0);

    Matrix below(1, 3);
    below(0, 0) = -2.0;
    below(0, 1) = 4.0;
    below(0, 2) = 0.0;
    const auto [_, below_scaled] = normalize(fit, below);
    CHECK(below_scaled(0, 0) == doctest::Approx(-0.2));
}

TEST_CASE("split_5x2") {
    // a base shaped like the breast-cancer benchmark: 699 examples, 458 + 241
    SynthSpec spec;
    spec.examples = 699;
    spec.classes = 2;
    spec.features = 5;
    spec.seed = 13;
    spec.class_counts = {458, 241};
    const TableData table = gen_synth(spec);

    SUBCASE("fold sizes for a 699-example base with classes 458/241") {
        const SplitPlan plan = split_5x2(table, 2024);
        for (int rep = 0; rep < 5; ++rep) {
            const FoldAssignment& f1 = plan.replications[rep][0];
            CHECK(f1.train.size() == 244);
            CHECK(f1.validation.size() == 105);
            CHECK(f1.test.size() == 350);
            const FoldAssignment& f2 = plan.replications[rep][1];
            CHECK(f2.train.size() == 245);
            CHECK(f2.validation.size() == 105);
            CHECK(f2.test.size() == 349);
        }
    }

    SUBCASE("every example lands in exactly one half per replication") {
        const SplitPlan plan = split_5x2(table, 7);
        for (int rep = 0; rep < 5; ++rep) {
            const FoldAssignment& f = plan.replications[rep][0];
            std::set<int> seen;
            for (const auto* part : {&f.train, &f.validation, &f.test})
                for (const int idx : *part) {
                    CHECK(seen.insert(idx).second);  // disjoint
                    CHECK(idx >= 0);
                    CHECK(idx < 699);
                }
            CHECK(seen.size() == 699);  // exhaustive
            // fold 2 swaps the halves of the same replication
            const FoldAssignment& g = plan.replications[rep][1];
            std::set<int> fit1(f.train.begin(), f.train.end());
            fit1.insert(f.validation.begin(), f.validation.end());
            std::set<int> test2(g.test.begin(), g.test.end());
            CHECK(fit1 == test2);
        }
    }

    SUBCASE("stratification keeps per-class proportions within one example") {
        const SplitPlan plan = split_5x2(table, 99);
        for (int rep = 0; rep < 5; ++rep) {
            const FoldAssignment& f = plan.replications[rep][0];
            int benign_fit = 0, malign_fit = 0;
            for (const auto* part : {&f.train, &f.validation})
                for (const int idx : *part) (table.labels[idx] == 0 ? benign_fit : malign_fit)++;
            CHECK(benign_fit == 229);  // 458 / 2
            CHECK(malign_fit == 120);  // 241 / 2, extra example to D2
        }
    }

    SUBCASE("same seed, same plan; different seeds differ") {
        const SplitPlan a = split_5x2(table, 5);
        const SplitPlan b = split_5x2(table, 5);
        const SplitPlan c = split_5x2(table, 6);
        CHECK(a.replications[0][0].train == b.replications[0][0].train);
        CHECK(a.replications[4][1].test == b.replications[4][1].test);
        CHECK(a.replications[0][0].train != c.replications[0][0].train);
    }

    SUBCASE("a class with fewer than two examples cannot be stratified") {
        TableData tiny;
        tiny.name = "tiny";
        tiny.features = Matrix(12, 1);
        tiny.labels = std::vector<int>(12, 0);
        tiny.labels[3] = 1;  // singleton class
        tiny.class_names = {"a", "b"};
        CHECK_THROWS(split_5x2(tiny, 1));
    }

    SUBCASE("materialized folds carry scaled features and one-hot targets") {
        const SplitPlan plan = split_5x2(table, 11);
        const DataSplit split = materialize_fold(table, plan.replications[0][0], true);
        CHECK(split.train.x.rows() == 244);
        CHECK(split.validation.x.rows() == 105);
        CHECK(split.test.x.rows() == 350);
        CHECK(split.train.t.cols() == 2);
        for (int r = 0; r < split.train.x.rows(); ++r)
            for (int c = 0; c < split.train.x.cols(); ++c) {
                CHECK(split.train.x(r, c) >= 0.0);
                CHECK(split.train.x(r, c) <= 1.0);
            }
        for (int r = 0; r < split.train.t.rows(); ++r)
            CHECK(split.train.t(r, 0) + split.train.t(r, 1) == 1.0);
    }
}

TEST_CASE("combined 5x2cv f test") {
    SUBCASE("identical methods are degenerate and never rejected") {
        const std::vector<double> e{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const FTestResult res = f_test_5x2(e, e);
        CHECK(res.degenerate);
        CHECK(!res.reject);
        CHECK(res.statistic == 0.0);
    }

    SUBCASE("a constant nonzero offset is degenerate with rejection") {
        std::vector<double> a{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        std::vector<double> b = a;
        for (double& v : b) v += 0.25;  // all p_ij = -0.25, s_i^2 = 0
        const FTestResult res = f_test_5x2(a, b);
        CHECK(res.degenerate);
        CHECK(res.reject);
    }

    SUBCASE("matches the brute-force evaluation on random vectors") {
        RngStream rng(2718);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> a(10), b(10);
            for (int i = 0; i < 10; ++i) {
                a[i] = rng.uniform(0.0, 30.0);
                b[i] = rng.uniform(0.0, 30.0);
            }
            const FTestResult res = f_test_5x2(a, b);
            const BruteForceF oracle = brute_force_f(a, b);
            REQUIRE(oracle.defined);
            CHECK(std::fabs(res.statistic - static_cast<double>(oracle.statistic)) <=
                  1e-12 * std::max(1.0, std::fabs(res.statistic)));
            CHECK(res.reject == (res.statistic > 4.74));
        }
    }

    SUBCASE("swapping the methods leaves the statistic unchanged") {
        RngStream rng(3141);
        std::vector<double> a(10), b(10);
        for (int i = 0; i < 10; ++i) {
            a[i] = rng.uniform(0.0, 25.0);
            b[i] = rng.uniform(0.0, 25.0);
        }
        CHECK(f_test_5x2(a, b).statistic == f_test_5x2(b, a).statistic);
    }

    SUBCASE("wrong-length inputs are rejected") {
        const std::vector<double> nine(9, 1.0), ten(10, 1.0);
        CHECK_THROWS(f_test_5x2(nine, ten));
        CHECK_THROWS(f_test_5x2(ten, nine));
    }
}

TEST_CASE("report records") {
    auto sample_records = [] {
        std::vector<RunRecord> records;
        RngStream rng(505);
        for (const std::string& method : {std::string("sync"), std::string("async-uniform")})
            for (int rep = 1; rep <= 5; ++rep)
                for (int fold = 1; fold <= 2; ++fold) {
                    RunRecord r;
                    r.dataset = "synth";
                    r.method = method;
                    r.algorithm = LearnAlg::Scg;
                    r.replication = rep;
                    r.fold = fold;
                    r.train_mse = rng.uniform(0.0, 10.0);
                    r.validation_mse = rng.uniform(0.0, 10.0);
                    r.test_mse = rng.uniform(0.0, 10.0);
                    r.arch.layers = {{3, ActivationKind::Tanh}, {5, ActivationKind::Logistic}};
                    r.rule = {LearnAlg::Scg, {rng.uniform(0.0, 1e-4), rng.uniform(0.0, 1e-6)}};
                    r.wall_seconds = rng.uniform(0.1, 2.0);
                    r.seed = rng.next_u64();
                    records.push_back(r);
                }
        return records;
    };

    SUBCASE("jsonl round-trip reproduces the records exactly") {
        const std::vector<RunRecord> records = sample_records();
        for (const RunRecord& r : records)
            CHECK(record_from_json_line(record_to_json_line(r)) == r);
    }

    SUBCASE("emit_report writes the full file set and records re-read identically") {
        const std::string dir = temp_path("cgann_report");
        std::filesystem::remove_all(dir);
        RunReport report;
        report.records = sample_records();
        report.seed = 42;
        report.wall_seconds = 1.5;
        report.config_snapshot = {{"seed", "42"}};
        emit_report(report, dir);
        CHECK(std::filesystem::exists(dir + "/records.jsonl"));
        CHECK(std::filesystem::exists(dir + "/summary.txt"));
        CHECK(std::filesystem::exists(dir + "/ftests.txt"));  // two methods present
        CHECK(std::filesystem::exists(dir + "/meta.json"));
        CHECK(read_records(dir + "/records.jsonl") == report.records);
    }

    SUBCASE("summary holds the mean and sample standard deviation") {
        std::vector<RunRecord> records;
        for (int i = 0; i < 10; ++i) {
            RunRecord r;
            r.dataset = "d";
            r.method = "sync";
            r.algorithm = LearnAlg::Bp;
            r.replication = i / 2 + 1;
            r.fold = i % 2 + 1;
            r.test_mse = 2.0 + i * 0.1;
            r.arch.layers = {{1, ActivationKind::Linear}};
            records.push_back(r);
        }
        const std::string table = summary_table(records);
        // mean 2.45, sample std ~0.3028
        CHECK(table.find("2.4500") != std::string::npos);
        CHECK(table.find("0.3028") != std::string::npos);
    }

    SUBCASE("f-test table marks > exactly when F exceeds the threshold") {
        std::vector<RunRecord> records;
        for (const std::string& method : {std::string("sync"), std::string("async-sweep")})
            for (int i = 0; i < 10; ++i) {
                RunRecord r;
                r.dataset = "d";
                r.method = method;
                r.algorithm = LearnAlg::Scg;
                r.replication = i / 2 + 1;
                r.fold = i % 2 + 1;
                // alternating differences: clearly below the threshold
                r.test_mse = method == "sync" ? 10.0 + (i % 2) : 10.5 - (i % 2);
                r.arch.layers = {{1, ActivationKind::Linear}};
                records.push_back(r);
            }
        std::vector<double> a(10), b(10);
        for (int i = 0; i < 10; ++i) {
            a[i] = 10.0 + (i % 2);
            b[i] = 10.5 - (i % 2);
        }
        const FTestResult expected = f_test_5x2(b, a);  // methods sorted: async < sync
        const std::string table = f_test_table(records);
        CHECK(table.find(expected.reject ? " >" : " <") != std::string::npos);
        CHECK(f_test_table(std::vector<RunRecord>(records.begin(), records.begin() + 10)) ==
              "");  // one method only
    }

    SUBCASE("empty results refuse to write") {
        RunReport empty;
        CHECK_THROWS(emit_report(empty, temp_path("cgann_empty_report")));
    }
}

TEST_CASE("config parsing") {
    SUBCASE("defaults plus overrides") {
        const HarnessConfig cfg = parse_config_text("seed = 9\n"
                                                    "mode = sync, async-uniform\n"
                                                    "ppi_pop = 16\n"
                                                    "dataset = data.csv\n"
                                                    "attributes = 4\n"
                                                    "classes = 2\n"
                                                    "# comment line\n"
                                                    "examples = 100\n",
                                                    "test");
        CHECK(cfg.search.seed == 9);
        CHECK(cfg.modes == std::vector<UpdateMode>{UpdateMode::Sync, UpdateMode::AsyncUniform});
        CHECK(cfg.search.ppi_pop == 16);
        CHECK(cfg.search.pra_pop == 4);  // desk default
        CHECK(cfg.dataset.name == "data");
        CHECK(cfg.search.max_epochs == 50);
        CHECK(cfg.scale_features);
    }

    SUBCASE("unknown keys, duplicates and bad values are line-numbered errors") {
        CHECK_THROWS_WITH_AS(parse_config_text("bogus = 1\n", "t"),
                             doctest::Contains("t:1: unknown key 'bogus'"), std::runtime_error);
        CHECK_THROWS_WITH_AS(parse_config_text("seed = 1\nseed = 2\n", "t"),
                             doctest::Contains("t:2: duplicate key"), std::runtime_error);
        CHECK_THROWS_WITH_AS(parse_config_text("ppi_pop = many\n", "t"),
                             doctest::Contains("expected an integer"), std::runtime_error);
        CHECK_THROWS_WITH_AS(parse_config_text("mode = sometimes\n", "t"),
                             doctest::Contains("unknown update mode"), std::runtime_error);
    }

    SUBCASE("validation requires a dataset and square populations") {
        HarnessConfig cfg = parse_config_text(
            "dataset = d.csv\nattributes = 3\nclasses = 2\n", "t");
        CHECK_NOTHROW(validate_harness_config(cfg));
        cfg.search.paf_pop = 7;
        CHECK_THROWS(validate_harness_config(cfg));
        HarnessConfig no_data = parse_config_text("seed = 1\n", "t");
        CHECK_THROWS(validate_harness_config(no_data));
    }

    SUBCASE("snapshot covers every documented key") {
        const HarnessConfig cfg = parse_config_text(
            "dataset = d.csv\nattributes = 3\nclasses = 2\n", "t");
        const auto snap = config_snapshot(cfg);
        std::set<std::string> keys;
        for (const auto& [k, v] : snap) keys.insert(k);
        for (const std::string expected :
             {"seed", "mode", "neighborhood", "algorithms", "pra_pop", "paf_pop", "ppi_pop",
              "gens_bera", "gens_beafa", "gens_bep", "probs", "mutation_rate", "fx_low",
              "fx_high", "arqval_low", "arqval_high", "max_epochs", "patience", "ppi_fitness",
              "threads", "dataset", "dataset_name", "attributes", "classes", "examples",
              "scale_features", "out_dir"})
            CHECK(keys.count(expected) == 1);
    }
}

TEST_CASE("gen_synth") {
    SUBCASE("deterministic and honors explicit class counts") {
        SynthSpec spec;
        spec.examples = 100;
        spec.classes = 3;
        spec.features = 4;
        spec.seed = 77;
        spec.class_counts = {50, 30, 20};
        const TableData a = gen_synth(spec);
        const TableData b = gen_synth(spec);
        CHECK(a.features == b.features);
        CHECK(a.labels == b.labels);
        int counts[3] = {0, 0, 0};
        for (const int label : a.labels) ++counts[label];
        CHECK(counts[0] == 50);
        CHECK(counts[1] == 30);
        CHECK(counts[2] == 20);
    }

    SUBCASE("csv write/load round trip preserves shape and labels") {
        SynthSpec spec;
        spec.examples = 60;
        spec.seed = 5;
        const TableData table = gen_synth(spec);
        const std::string path = temp_path("cgann_synth_rt.csv");
        write_csv(table, path);
        const TableData loaded = load_dataset({"synth", path, spec.features, spec.classes, 60});
        CHECK(loaded.examples() == 60);
        CHECK(loaded.features == table.features);  // %.17g round-trips doubles
        // class order follows first appearance in the file
        for (int r = 0; r < 60; ++r)
            CHECK(loaded.class_names[loaded.labels[r]] == table.class_names[table.labels[r]]);
    }

    SUBCASE("count mismatches are rejected") {
        SynthSpec bad;
        bad.examples = 10;
        bad.class_counts = {7, 4};
        CHECK_THROWS(gen_synth(bad));
    }
}
