#pragma once

#include <string>
#include <vector>

#include "cgann/matrix.hpp"
#include "cgann/rng.hpp"

namespace cgann {

// Transfer functions available to the evolutionary search. The output layer
// is always Linear.
enum class ActivationKind { Linear, Tanh, Logistic };

const char* to_string(ActivationKind kind);
ActivationKind activation_from_string(const std::string& name);

struct HiddenLayer {
    int size = 1;
    ActivationKind act = ActivationKind::Linear;
    bool operator==(const HiddenLayer&) const = default;
};

inline constexpr int kMinHiddenLayers = 1;
inline constexpr int kMaxHiddenLayers = 3;
inline constexpr int kMinLayerSize = 1;
inline constexpr int kMaxLayerSize = 12;

// Fully connected feedforward MLP shape: 1..3 hidden layers of 1..12 units.
struct Architecture {
    int input_dim = 0;
    int output_dim = 0;
    std::vector<HiddenLayer> hidden;
};

void validate_architecture(const Architecture& arch);

// Unit counts along the network: input, hidden sizes, output.
std::vector<int> layer_sizes(const Architecture& arch);

// Weight matrices of one network. Matrix i maps layer i to layer i+1 and has
// shape (fan_in + 1) x fan_out; the final row is the bias row applied to an
// implicit constant-1 input.
struct WeightGenome {
    std::vector<Matrix> matrices;
    bool operator==(const WeightGenome&) const = default;
};

bool shapes_match(const Architecture& arch, const WeightGenome& genome);
void require_shapes(const Architecture& arch, const WeightGenome& genome);
std::size_t parameter_count(const Architecture& arch);

inline constexpr double kInitWeightLow = -0.05;
inline constexpr double kInitWeightHigh = 0.05;

// i.i.d. uniform initial weights on [-0.05, 0.05], bias rows included.
WeightGenome init_weights(const Architecture& arch, RngStream& rng);

enum class LearnAlg { Bp, Scg };

const char* to_string(LearnAlg alg);
LearnAlg learn_alg_from_string(const std::string& name);

struct TrainConfig {
    LearnAlg algorithm = LearnAlg::Scg;
    double bp_rate = 0.05;
    double bp_momentum = 0.05;
    double scg_sigma = 1.0e-4;
    double scg_lambda = 1.0e-6;
    int max_epochs = 50;
    int patience = 5;
};

// One labelled block of data: features by row, one-hot targets by row.
struct Batch {
    Matrix x;
    Matrix t;
};

struct DataSplit {
    Batch train;
    Batch validation;
    Batch test;
};

// Batch forward pass; layer t applies act_t(augment(prev) * W_t), the final
// layer is Linear.
Matrix forward(const Architecture& arch, const WeightGenome& genome, const Matrix& x);

// 100 * mean over (examples x output units) of squared (output - target).
double mse_percent(const Architecture& arch, const WeightGenome& genome, const Batch& batch);

// Exact gradient of the un-percented MSE w.r.t. every weight and bias,
// shaped like the genome.
WeightGenome gradient(const Architecture& arch, const WeightGenome& genome, const Batch& batch);

struct EpochStats {
    int epoch = 0;
    double train_mse = 0.0;
    double validation_mse = 0.0;
};

struct TrainResult {
    WeightGenome weights;  // best-validation weights seen
    std::vector<EpochStats> history;
    int best_epoch = 0;
    double best_validation_mse = 0.0;
    bool diverged = false;
    std::string diagnostic;
};

// Full-batch gradient descent with momentum. Stops at max_epochs or when
// validation MSE fails to improve for `patience` consecutive epochs; always
// returns the weights with the best validation MSE seen (epoch 0 included).
TrainResult train_bp(const Architecture& arch, const WeightGenome& start, const DataSplit& split,
                     const TrainConfig& cfg);

// Moller's scaled conjugate gradient over the full batch, seeded with
// cfg.scg_sigma / cfg.scg_lambda. Same early-stopping and best-validation
// contract as train_bp.
TrainResult train_scg(const Architecture& arch, const WeightGenome& start, const DataSplit& split,
                      const TrainConfig& cfg);

}  // namespace cgann
