#include "cgann/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cgann {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

TableData load_dataset(const DatasetSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw std::runtime_error(spec.name + ": cannot open " + spec.path);
    if (spec.attributes < 1)
        throw std::invalid_argument(spec.name + ": attribute count must be >= 1");
    if (spec.classes < 2) throw std::invalid_argument(spec.name + ": class count must be >= 2");

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (static_cast<int>(fields.size()) != spec.attributes + 1)
            throw std::runtime_error(spec.name + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(spec.attributes + 1) + " fields, got " +
                                     std::to_string(fields.size()));
        std::vector<double> row(spec.attributes);
        for (int a = 0; a < spec.attributes; ++a) {
            const std::string& tok = fields[a];
            char* end = nullptr;
            row[a] = std::strtod(tok.c_str(), &end);
            if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(row[a]))
                throw std::runtime_error(spec.name + ":" + std::to_string(line_no) +
                                         ": non-numeric attribute '" + tok + "'");
        }
        const std::string& label = fields.back();
        if (label.empty())
            throw std::runtime_error(spec.name + ":" + std::to_string(line_no) +
                                     ": empty class label");
        auto it = std::find(class_names.begin(), class_names.end(), label);
        if (it == class_names.end()) {
            if (static_cast<int>(class_names.size()) == spec.classes)
                throw std::runtime_error(spec.name + ":" + std::to_string(line_no) +
                                         ": unknown class label '" + label + "' (already saw " +
                                         std::to_string(spec.classes) + " classes)");
            class_names.push_back(label);
            it = class_names.end() - 1;
        }
        labels.push_back(static_cast<int>(it - class_names.begin()));
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw std::runtime_error(spec.name + ": no data rows");
    if (static_cast<int>(class_names.size()) != spec.classes)
        throw std::runtime_error(spec.name + ": declared " + std::to_string(spec.classes) +
                                 " classes, file has " + std::to_string(class_names.size()));
    if (spec.examples > 0 && static_cast<int>(rows.size()) != spec.examples)
        throw std::runtime_error(spec.name + ": declared " + std::to_string(spec.examples) +
                                 " examples, file has " + std::to_string(rows.size()));

    TableData table;
    table.name = spec.name.empty() ? spec.path : spec.name;
    table.features = Matrix(static_cast<int>(rows.size()), spec.attributes);
    for (int r = 0; r < table.features.rows(); ++r)
        for (int c = 0; c < spec.attributes; ++c) table.features(r, c) = rows[r][c];
    table.labels = std::move(labels);
    table.class_names = std::move(class_names);
    return table;
}

Matrix one_hot(const std::vector<int>& labels, int classes) {
    Matrix t(static_cast<int>(labels.size()), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) t(static_cast<int>(i), labels[i]) = 1.0;
    return t;
}

MinMaxScale MinMaxScale::fit(const Matrix& m) {
    if (m.rows() == 0) throw std::invalid_argument("MinMaxScale: empty fitting block");
    MinMaxScale s;
    s.lo.assign(m.cols(), 0.0);
    s.span.assign(m.cols(), 0.0);
    for (int c = 0; c < m.cols(); ++c) {
        double lo = m(0, c), hi = m(0, c);
        for (int r = 1; r < m.rows(); ++r) {
            lo = std::min(lo, m(r, c));
            hi = std::max(hi, m(r, c));
        }
        s.lo[c] = lo;
        s.span[c] = hi - lo;
    }
    return s;
}

Matrix MinMaxScale::apply(const Matrix& m) const {
    Matrix out(m.rows(), m.cols());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            out(r, c) = span[c] == 0.0 ? 0.0 : (m(r, c) - lo[c]) / span[c];
    return out;
}

std::pair<Matrix, Matrix> normalize(const Matrix& fit_half, const Matrix& other_half) {
    const MinMaxScale scale = MinMaxScale::fit(fit_half);
    return {scale.apply(fit_half), scale.apply(other_half)};
}

namespace {

// floor(x + 0.5); products are formed as (m * n) / 100 style upstream
int round_half_up(double x) { return static_cast<int>(std::floor(x + 0.5)); }

}  // namespace

SplitPlan split_5x2(const TableData& table, std::uint64_t seed) {
    if (table.examples() < 10) throw std::invalid_argument("split_5x2: need at least 10 examples");
    const int classes = table.classes();
    std::vector<std::vector<int>> by_class(classes);
    for (int r = 0; r < table.examples(); ++r) by_class[table.labels[r]].push_back(r);
    for (int c = 0; c < classes; ++c)
        if (by_class[c].size() < 2)
            throw std::invalid_argument("split_5x2: class '" + table.class_names[c] +
                                        "' has fewer than 2 examples; cannot stratify");

    const RngKey root = RngKey::root(seed);
    SplitPlan plan;
    for (int rep = 0; rep < 5; ++rep) {
        RngStream rng = root.fold(rep).stream();
        std::vector<std::vector<int>> d_half[2];
        d_half[0].resize(classes);
        d_half[1].resize(classes);
        bool extra_to_d2 = true;
        for (int c = 0; c < classes; ++c) {
            std::vector<int> idx = by_class[c];
            for (std::size_t i = idx.size(); i > 1; --i)
                std::swap(idx[i - 1], idx[rng.index(i)]);
            const int n = static_cast<int>(idx.size());
            int d1_take = n / 2;
            if (n % 2 != 0) {
                if (!extra_to_d2) ++d1_take;
                extra_to_d2 = !extra_to_d2;
            }
            d_half[0][c].assign(idx.begin(), idx.begin() + d1_take);
            d_half[1][c].assign(idx.begin() + d1_take, idx.end());
        }
        for (int fold = 0; fold < 2; ++fold) {
            const auto& fit = d_half[fold];
            const auto& test = d_half[1 - fold];
            FoldAssignment fa;
            for (int c = 0; c < classes; ++c) {
                const int train_take = round_half_up(0.7 * static_cast<double>(fit[c].size()));
                fa.train.insert(fa.train.end(), fit[c].begin(), fit[c].begin() + train_take);
                fa.validation.insert(fa.validation.end(), fit[c].begin() + train_take,
                                     fit[c].end());
                fa.test.insert(fa.test.end(), test[c].begin(), test[c].end());
            }
            plan.replications[rep][fold] = std::move(fa);
        }
    }
    return plan;
}

namespace {

Batch gather(const TableData& table, const std::vector<int>& rows, const Matrix& targets) {
    Batch b;
    b.x = Matrix(static_cast<int>(rows.size()), table.features.cols());
    b.t = Matrix(static_cast<int>(rows.size()), targets.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const int r = rows[i];
        for (int c = 0; c < b.x.cols(); ++c) b.x(static_cast<int>(i), c) = table.features(r, c);
        for (int c = 0; c < b.t.cols(); ++c) b.t(static_cast<int>(i), c) = targets(r, c);
    }
    return b;
}

}  // namespace

DataSplit materialize_fold(const TableData& table, const FoldAssignment& fold, bool scale) {
    const Matrix targets = one_hot(table.labels, table.classes());
    DataSplit split;
    split.train = gather(table, fold.train, targets);
    split.validation = gather(table, fold.validation, targets);
    split.test = gather(table, fold.test, targets);
    if (scale) {
        // statistics from the fitting half (train + validation) only
        Matrix fit_block(split.train.x.rows() + split.validation.x.rows(), table.features.cols());
        for (int r = 0; r < split.train.x.rows(); ++r)
            for (int c = 0; c < fit_block.cols(); ++c) fit_block(r, c) = split.train.x(r, c);
        for (int r = 0; r < split.validation.x.rows(); ++r)
            for (int c = 0; c < fit_block.cols(); ++c)
                fit_block(split.train.x.rows() + r, c) = split.validation.x(r, c);
        const MinMaxScale scaler = MinMaxScale::fit(fit_block);
        split.train.x = scaler.apply(split.train.x);
        split.validation.x = scaler.apply(split.validation.x);
        split.test.x = scaler.apply(split.test.x);
    }
    return split;
}

TableData gen_synth(const SynthSpec& spec) {
    if (spec.classes < 2) throw std::invalid_argument("gen-synth: need at least 2 classes");
    if (spec.features < 1) throw std::invalid_argument("gen-synth: need at least 1 feature");
    if (spec.examples < spec.classes)
        throw std::invalid_argument("gen-synth: need at least one example per class");
    std::vector<int> counts = spec.class_counts;
    if (counts.empty()) {
        counts.assign(spec.classes, spec.examples / spec.classes);
        for (int c = 0; c < spec.examples % spec.classes; ++c) ++counts[c];
    }
    if (static_cast<int>(counts.size()) != spec.classes ||
        std::accumulate(counts.begin(), counts.end(), 0) != spec.examples)
        throw std::invalid_argument("gen-synth: class counts must sum to the example count");

    const RngKey root = RngKey::root(spec.seed);
    RngStream mean_rng = root.fold(0).stream();
    std::vector<std::vector<double>> means(spec.classes, std::vector<double>(spec.features));
    for (int c = 0; c < spec.classes; ++c)
        for (int f = 0; f < spec.features; ++f)
            means[c][f] = mean_rng.uniform(-spec.separation, spec.separation);

    auto normal = [](RngStream& rng) {
        const double u1 = 1.0 - rng.canonical();  // (0, 1]
        const double u2 = rng.canonical();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    };

    TableData table;
    table.name = "synth";
    table.features = Matrix(spec.examples, spec.features);
    table.labels.resize(spec.examples);
    for (int c = 0; c < spec.classes; ++c) table.class_names.push_back(std::to_string(c));

    RngStream sample_rng = root.fold(1).stream();
    int row = 0;
    for (int c = 0; c < spec.classes; ++c) {
        for (int i = 0; i < counts[c]; ++i, ++row) {
            for (int f = 0; f < spec.features; ++f)
                table.features(row, f) = means[c][f] + normal(sample_rng);
            table.labels[row] = c;
        }
    }

    // deterministic row shuffle so class blocks do not survive into folds
    RngStream shuffle_rng = root.fold(2).stream();
    std::vector<int> order(spec.examples);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.index(i)]);
    Matrix shuffled(spec.examples, spec.features);
    std::vector<int> shuffled_labels(spec.examples);
    for (int r = 0; r < spec.examples; ++r) {
        for (int f = 0; f < spec.features; ++f) shuffled(r, f) = table.features(order[r], f);
        shuffled_labels[r] = table.labels[order[r]];
    }
    table.features = std::move(shuffled);
    table.labels = std::move(shuffled_labels);
    return table;
}

void write_csv(const TableData& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    char buf[64];
    for (int r = 0; r < table.features.rows(); ++r) {
        for (int c = 0; c < table.features.cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", table.features(r, c));
            out << buf << ',';
        }
        out << table.class_names[table.labels[r]] << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace cgann
