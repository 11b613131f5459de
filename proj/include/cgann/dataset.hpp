#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cgann/matrix.hpp"
#include "cgann/network.hpp"
#include "cgann/rng.hpp"

namespace cgann {

// Declared description of a CSV classification base: numeric attributes,
// class label in the final column.
struct DatasetSpec {
    std::string name;
    std::string path;
    int attributes = 0;
    int classes = 0;
    int examples = 0;  // declared row count; 0 skips the check
};

// A loaded base: features by row, class index per row (first-appearance
// order of the labels in the file).
struct TableData {
    std::string name;
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    int examples() const { return features.rows(); }
    int classes() const { return static_cast<int>(class_names.size()); }
};

TableData load_dataset(const DatasetSpec& spec);

Matrix one_hot(const std::vector<int>& labels, int classes);

// Min-max scaling to [0,1] with statistics from the fitting rows only;
// constant columns map to 0. Values outside the fitted range extrapolate
// (no clamping).
struct MinMaxScale {
    std::vector<double> lo;
    std::vector<double> span;  // 0 marks a constant column

    static MinMaxScale fit(const Matrix& m);
    Matrix apply(const Matrix& m) const;
};

std::pair<Matrix, Matrix> normalize(const Matrix& fit_half, const Matrix& other_half);

// Row indices of one 5x2cv fold: the fitting half split 70/30 into
// train/validation (stratified, train size rounded half-up per class), the
// other half used as test.
struct FoldAssignment {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;
};

struct SplitPlan {
    std::array<std::array<FoldAssignment, 2>, 5> replications;
};

// Five independent stratified halvings; per replication, fold 0 fits on D1
// and tests on D2, fold 1 the reverse. Odd per-class counts alternate their
// extra example starting with D2, so D1 is never the larger half. Throws
// when a class has fewer than two examples.
SplitPlan split_5x2(const TableData& table, std::uint64_t seed);

// Builds the matrices of one fold; with `scale`, features are min-max
// scaled with statistics from the fitting half (train + validation rows).
DataSplit materialize_fold(const TableData& table, const FoldAssignment& fold, bool scale);

// Seeded Gaussian-mixture classification base for desk-scale testing.
struct SynthSpec {
    int classes = 2;
    int features = 8;
    int examples = 400;
    double separation = 2.5;
    std::uint64_t seed = 0;
    std::vector<int> class_counts;  // optional; must sum to `examples`
};

TableData gen_synth(const SynthSpec& spec);

// CSV with full round-trip precision; one row per example, label last.
void write_csv(const TableData& table, const std::string& path);

}  // namespace cgann
