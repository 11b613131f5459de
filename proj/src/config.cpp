#include "cgann/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cgann/lattice.hpp"

namespace cgann {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

long long parse_int(const std::string& origin, int line, const std::string& key,
                    const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size() || errno != 0)
        fail(origin, line, key + ": expected an integer, got '" + value + "'");
    return v;
}

double parse_real(const std::string& origin, int line, const std::string& key,
                  const std::string& value) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size() || errno != 0)
        fail(origin, line, key + ": expected a number, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& origin, int line, const std::string& key,
                const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    fail(origin, line, key + ": expected true/false, got '" + value + "'");
}

}  // namespace

HarnessConfig parse_config_text(const std::string& text, const std::string& origin) {
    HarnessConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, line_no, "empty key");
        if (!seen.insert(key).second) fail(origin, line_no, "duplicate key '" + key + "'");

        try {
            if (key == "seed") {
                cfg.search.seed = static_cast<std::uint64_t>(
                    std::strtoull(value.c_str(), nullptr, 10));
            } else if (key == "mode") {
                cfg.modes.clear();
                for (const std::string& item : split_list(value))
                    cfg.modes.push_back(update_mode_from_string(item));
                if (cfg.modes.empty()) fail(origin, line_no, "mode: empty list");
            } else if (key == "neighborhood") {
                cfg.search.neighborhood.kind = neighborhood_from_string(value);
            } else if (key == "algorithms") {
                cfg.search.algorithms.clear();
                for (const std::string& item : split_list(value))
                    cfg.search.algorithms.push_back(learn_alg_from_string(item));
            } else if (key == "pra_pop") {
                cfg.search.pra_pop = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "paf_pop") {
                cfg.search.paf_pop = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "ppi_pop") {
                cfg.search.ppi_pop = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "gens_bera") {
                cfg.search.gens.bera = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "gens_beafa") {
                cfg.search.gens.beafa = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "gens_bep") {
                cfg.search.gens.bep = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "probs") {
                cfg.search.operators.probs = parse_real(origin, line_no, key, value);
            } else if (key == "mutation_rate") {
                cfg.search.operators.mutation_rate = parse_real(origin, line_no, key, value);
            } else if (key == "fx_low") {
                cfg.search.operators.fx_low = parse_real(origin, line_no, key, value);
            } else if (key == "fx_high") {
                cfg.search.operators.fx_high = parse_real(origin, line_no, key, value);
            } else if (key == "arqval_low") {
                cfg.search.operators.arqval_low =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "arqval_high") {
                cfg.search.operators.arqval_high =
                    static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "max_epochs") {
                cfg.search.max_epochs = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "patience") {
                cfg.search.patience = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "ppi_fitness") {
                if (value == "trained") cfg.search.fitness_after_training = true;
                else if (value == "untrained") cfg.search.fitness_after_training = false;
                else fail(origin, line_no, "ppi_fitness: expected trained or untrained");
            } else if (key == "threads") {
                cfg.search.threads = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "dataset") {
                cfg.dataset.path = value;
            } else if (key == "dataset_name") {
                cfg.dataset.name = value;
            } else if (key == "attributes") {
                cfg.dataset.attributes = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "classes") {
                cfg.dataset.classes = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "examples") {
                cfg.dataset.examples = static_cast<int>(parse_int(origin, line_no, key, value));
            } else if (key == "scale_features") {
                cfg.scale_features = parse_bool(origin, line_no, key, value);
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else {
                fail(origin, line_no, "unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            fail(origin, line_no, e.what());
        }
    }
    if (cfg.dataset.name.empty() && !cfg.dataset.path.empty()) {
        auto slash = cfg.dataset.path.find_last_of("/\\");
        std::string stem = slash == std::string::npos ? cfg.dataset.path
                                                      : cfg.dataset.path.substr(slash + 1);
        const auto dot = stem.find_last_of('.');
        if (dot != std::string::npos && dot > 0) stem.erase(dot);
        cfg.dataset.name = stem;
    }
    return cfg;
}

HarnessConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

void validate_harness_config(const HarnessConfig& cfg) {
    validate_search_config(cfg.search);
    if (cfg.modes.empty()) throw std::invalid_argument("config: no update mode selected");
    for (std::size_t i = 0; i < cfg.modes.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.modes.size(); ++j)
            if (cfg.modes[i] == cfg.modes[j])
                throw std::invalid_argument("config: duplicate update mode");
    if (cfg.dataset.path.empty()) throw std::invalid_argument("config: dataset path missing");
    if (cfg.dataset.attributes < 1)
        throw std::invalid_argument("config: attributes must be >= 1");
    if (cfg.dataset.classes < 2) throw std::invalid_argument("config: classes must be >= 2");
    if (cfg.out_dir.empty()) throw std::invalid_argument("config: out_dir missing");
}

std::vector<std::pair<std::string, std::string>> config_snapshot(const HarnessConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> snap;
    auto add = [&](const std::string& k, const std::string& v) { snap.emplace_back(k, v); };
    add("seed", std::to_string(cfg.search.seed));
    std::string modes;
    for (const UpdateMode m : cfg.modes) {
        if (!modes.empty()) modes += ",";
        modes += to_string(m);
    }
    add("mode", modes);
    add("neighborhood", to_string(cfg.search.neighborhood.kind));
    std::string algs;
    for (const LearnAlg a : cfg.search.algorithms) {
        if (!algs.empty()) algs += ",";
        algs += to_string(a);
    }
    add("algorithms", algs);
    add("pra_pop", std::to_string(cfg.search.pra_pop));
    add("paf_pop", std::to_string(cfg.search.paf_pop));
    add("ppi_pop", std::to_string(cfg.search.ppi_pop));
    add("gens_bera", std::to_string(cfg.search.gens.bera));
    add("gens_beafa", std::to_string(cfg.search.gens.beafa));
    add("gens_bep", std::to_string(cfg.search.gens.bep));
    add("probs", std::to_string(cfg.search.operators.probs));
    add("mutation_rate", std::to_string(cfg.search.operators.mutation_rate));
    add("fx_low", std::to_string(cfg.search.operators.fx_low));
    add("fx_high", std::to_string(cfg.search.operators.fx_high));
    add("arqval_low", std::to_string(cfg.search.operators.arqval_low));
    add("arqval_high", std::to_string(cfg.search.operators.arqval_high));
    add("max_epochs", std::to_string(cfg.search.max_epochs));
    add("patience", std::to_string(cfg.search.patience));
    add("ppi_fitness", cfg.search.fitness_after_training ? "trained" : "untrained");
    add("threads", std::to_string(cfg.search.threads));
    add("dataset", cfg.dataset.path);
    add("dataset_name", cfg.dataset.name);
    add("attributes", std::to_string(cfg.dataset.attributes));
    add("classes", std::to_string(cfg.dataset.classes));
    add("examples", std::to_string(cfg.dataset.examples));
    add("scale_features", cfg.scale_features ? "true" : "false");
    add("out_dir", cfg.out_dir);
    return snap;
}

}  // namespace cgann
