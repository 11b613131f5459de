#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cgann/config.hpp"
#include "cgann/dataset.hpp"
#include "cgann/ftest.hpp"
#include "cgann/harness.hpp"
#include "cgann/report.hpp"

namespace {

std::vector<double> read_error_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    double v;
    while (in >> v) values.push_back(v);
    if (!in.eof()) throw std::runtime_error(path + ": non-numeric entry");
    return values;
}

int cmd_run(const std::string& config_path, const std::string& out_override, bool quiet) {
    cgann::HarnessConfig cfg = cgann::parse_config_file(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    cgann::validate_harness_config(cfg);

    cgann::ProgressSink sink;
    if (!quiet) {
        sink = [](const cgann::ProgressEvent& e) {
            if (e.level != cgann::Level::Bera) return;
            std::cerr << "[" << cgann::to_string(e.algorithm) << " " << cgann::to_string(e.level)
                      << " gen " << e.generation << "] best fitness " << e.best_fitness << "\n";
        };
    }
    const cgann::RunReport report = cgann::run_benchmark(cfg, sink);
    cgann::emit_report(report, cfg.out_dir);
    std::cout << cgann::summary_table(report.records);
    const std::string ftable = cgann::f_test_table(report.records);
    if (!ftable.empty()) std::cout << '\n' << ftable;
    std::cout << "\nreport written to " << cfg.out_dir << " ("
              << report.records.size() << " records, " << report.wall_seconds << " s)\n";
    return 0;
}

int cmd_ftest(const std::string& path_a, const std::string& path_b) {
    const std::vector<double> a = read_error_file(path_a);
    const std::vector<double> b = read_error_file(path_b);
    const cgann::FTestResult res = cgann::f_test_5x2(a, b);
    std::cout << "F = " << res.statistic << "\n"
              << "degenerate: " << (res.degenerate ? "yes" : "no") << "\n"
              << "reject equal error rates (F > " << cgann::kFTestRejectThreshold
              << "): " << (res.reject ? "yes" : "no") << "\n";
    return 0;
}

int cmd_gen_synth(const cgann::SynthSpec& spec, const std::string& out_path) {
    const cgann::TableData table = cgann::gen_synth(spec);
    cgann::write_csv(table, out_path);
    std::cout << "wrote " << table.examples() << " examples, " << table.features.cols()
              << " features, " << table.classes() << " classes to " << out_path << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const cgann::HarnessConfig cfg = cgann::parse_config_file(config_path);
    cgann::validate_harness_config(cfg);
    const cgann::TableData table = cgann::load_dataset(cfg.dataset);
    // stratification is checked here too, so a run cannot fail later
    cgann::split_5x2(table, cfg.search.seed);
    std::cout << "config OK: dataset '" << table.name << "' with " << table.examples()
              << " examples, " << table.features.cols() << " attributes, " << table.classes()
              << " classes\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cellular genetic algorithm neuroevolution for MLP classifiers"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    bool quiet = false;
    CLI::App* run = app.add_subcommand("run", "full 5x2cv benchmark from a config file");
    run->add_option("--config", config_path, "flat key=value config file")->required();
    run->add_option("--out", out_override, "override the report directory");
    run->add_flag("--quiet", quiet, "suppress progress lines");

    std::string ftest_a, ftest_b;
    CLI::App* ftest =
        app.add_subcommand("ftest", "combined 5x2cv f test over two 10-value error files");
    ftest->add_option("file_a", ftest_a, "first error vector (10 values)")->required();
    ftest->add_option("file_b", ftest_b, "second error vector (10 values)")->required();

    cgann::SynthSpec synth;
    std::string synth_out = "synth.csv";
    std::vector<int> synth_counts;
    CLI::App* gen = app.add_subcommand("gen-synth", "seeded synthetic Gaussian-mixture CSV");
    gen->add_option("--classes", synth.classes, "number of classes")->capture_default_str();
    gen->add_option("--n", synth.examples, "number of examples")->capture_default_str();
    gen->add_option("--features", synth.features, "number of features")->capture_default_str();
    gen->add_option("--separation", synth.separation, "class-mean spread")
        ->capture_default_str();
    gen->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
    gen->add_option("--counts", synth_counts, "explicit per-class example counts");
    gen->add_option("--out", synth_out, "output CSV path")->capture_default_str();

    std::string validate_config;
    CLI::App* validate = app.add_subcommand("validate", "config and dataset sanity check");
    validate->add_option("--config", validate_config, "config file to check")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_override, quiet);
        if (ftest->parsed()) return cmd_ftest(ftest_a, ftest_b);
        if (gen->parsed()) {
            synth.class_counts = synth_counts;
            return cmd_gen_synth(synth, synth_out);
        }
        if (validate->parsed()) return cmd_validate(validate_config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
