#include "cgann/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cgann {

const char* to_string(ActivationKind kind) {
    switch (kind) {
        case ActivationKind::Linear: return "linear";
        case ActivationKind::Tanh: return "tanh";
        case ActivationKind::Logistic: return "logistic";
    }
    return "?";
}

ActivationKind activation_from_string(const std::string& name) {
    if (name == "linear") return ActivationKind::Linear;
    if (name == "tanh") return ActivationKind::Tanh;
    if (name == "logistic") return ActivationKind::Logistic;
    throw std::invalid_argument("unknown activation: " + name);
}

const char* to_string(LearnAlg alg) {
    return alg == LearnAlg::Bp ? "bp" : "scg";
}

LearnAlg learn_alg_from_string(const std::string& name) {
    if (name == "bp") return LearnAlg::Bp;
    if (name == "scg") return LearnAlg::Scg;
    throw std::invalid_argument("unknown learning algorithm: " + name);
}

void validate_architecture(const Architecture& arch) {
    if (arch.input_dim < 1) throw std::invalid_argument("architecture: input_dim must be >= 1");
    if (arch.output_dim < 1) throw std::invalid_argument("architecture: output_dim must be >= 1");
    const int h = static_cast<int>(arch.hidden.size());
    if (h < kMinHiddenLayers || h > kMaxHiddenLayers)
        throw std::invalid_argument("architecture: hidden layer count " + std::to_string(h) +
                                    " outside [1,3]");
    for (const HiddenLayer& layer : arch.hidden)
        if (layer.size < kMinLayerSize || layer.size > kMaxLayerSize)
            throw std::invalid_argument("architecture: layer size " + std::to_string(layer.size) +
                                        " outside [1,12]");
}

std::vector<int> layer_sizes(const Architecture& arch) {
    std::vector<int> sizes;
    sizes.reserve(arch.hidden.size() + 2);
    sizes.push_back(arch.input_dim);
    for (const HiddenLayer& layer : arch.hidden) sizes.push_back(layer.size);
    sizes.push_back(arch.output_dim);
    return sizes;
}

bool shapes_match(const Architecture& arch, const WeightGenome& genome) {
    const std::vector<int> sizes = layer_sizes(arch);
    if (genome.matrices.size() + 1 != sizes.size()) return false;
    for (std::size_t i = 0; i < genome.matrices.size(); ++i) {
        if (genome.matrices[i].rows() != sizes[i] + 1) return false;
        if (genome.matrices[i].cols() != sizes[i + 1]) return false;
    }
    return true;
}

void require_shapes(const Architecture& arch, const WeightGenome& genome) {
    if (!shapes_match(arch, genome))
        throw std::invalid_argument("weight genome shapes do not match architecture");
}

std::size_t parameter_count(const Architecture& arch) {
    const std::vector<int> sizes = layer_sizes(arch);
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
        n += static_cast<std::size_t>(sizes[i] + 1) * sizes[i + 1];
    return n;
}

WeightGenome init_weights(const Architecture& arch, RngStream& rng) {
    validate_architecture(arch);
    const std::vector<int> sizes = layer_sizes(arch);
    WeightGenome genome;
    genome.matrices.reserve(sizes.size() - 1);
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        Matrix w(sizes[i] + 1, sizes[i + 1]);
        for (int r = 0; r < w.rows(); ++r)
            for (int c = 0; c < w.cols(); ++c)
                w(r, c) = rng.uniform(kInitWeightLow, kInitWeightHigh);
        genome.matrices.push_back(std::move(w));
    }
    return genome;
}

namespace {

ActivationKind layer_activation(const Architecture& arch, std::size_t layer) {
    return layer < arch.hidden.size() ? arch.hidden[layer].act : ActivationKind::Linear;
}

void apply_activation(Matrix& z, ActivationKind kind) {
    double* p = z.data();
    const std::size_t n = z.size();
    switch (kind) {
        case ActivationKind::Linear:
            return;
        case ActivationKind::Tanh:
            for (std::size_t i = 0; i < n; ++i) p[i] = std::tanh(p[i]);
            return;
        case ActivationKind::Logistic:
            for (std::size_t i = 0; i < n; ++i) p[i] = 1.0 / (1.0 + std::exp(-p[i]));
            return;
    }
}

// z = augment(a) * w, with the bias row of w applied to the implicit 1.
Matrix affine(const Matrix& a, const Matrix& w) {
    if (a.cols() + 1 != w.rows())
        throw std::invalid_argument("layer input width " + std::to_string(a.cols()) +
                                    " does not match weight matrix " + w.shape_str());
    Matrix z(a.rows(), w.cols());
    const double* bias = w.row(w.rows() - 1);
    for (int i = 0; i < a.rows(); ++i) {
        double* zrow = z.row(i);
        for (int j = 0; j < w.cols(); ++j) zrow[j] = bias[j];
        const double* arow = a.row(i);
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            const double* wrow = w.row(k);
            for (int j = 0; j < w.cols(); ++j) zrow[j] += aik * wrow[j];
        }
    }
    return z;
}

std::vector<Matrix> forward_all(const Architecture& arch, const WeightGenome& genome,
                                const Matrix& x) {
    require_shapes(arch, genome);
    if (x.cols() != arch.input_dim)
        throw std::invalid_argument("input width " + std::to_string(x.cols()) +
                                    " does not match input_dim " +
                                    std::to_string(arch.input_dim));
    std::vector<Matrix> acts;
    acts.reserve(genome.matrices.size() + 1);
    acts.push_back(x);
    for (std::size_t layer = 0; layer < genome.matrices.size(); ++layer) {
        Matrix z = affine(acts.back(), genome.matrices[layer]);
        apply_activation(z, layer_activation(arch, layer));
        acts.push_back(std::move(z));
    }
    return acts;
}

double mse_fraction(const Matrix& y, const Matrix& t) {
    double sum = 0.0;
    const double* py = y.data();
    const double* pt = t.data();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = py[i] - pt[i];
        sum += d * d;
    }
    return sum / static_cast<double>(y.size());
}

}  // namespace

Matrix forward(const Architecture& arch, const WeightGenome& genome, const Matrix& x) {
    return forward_all(arch, genome, x).back();
}

double mse_percent(const Architecture& arch, const WeightGenome& genome, const Batch& batch) {
    if (batch.x.rows() == 0) throw std::invalid_argument("mse: empty dataset part");
    if (batch.x.rows() != batch.t.rows())
        throw std::invalid_argument("mse: feature/target row mismatch");
    return 100.0 * mse_fraction(forward(arch, genome, batch.x), batch.t);
}

WeightGenome gradient(const Architecture& arch, const WeightGenome& genome, const Batch& batch) {
    const std::vector<Matrix> acts = forward_all(arch, genome, batch.x);
    const Matrix& y = acts.back();
    const int n_examples = batch.x.rows();
    const int n_outputs = arch.output_dim;
    if (batch.t.rows() != n_examples || batch.t.cols() != n_outputs)
        throw std::invalid_argument("gradient: target shape mismatch");

    // dL/dZ at the output; the output activation is Linear.
    const double scale = 2.0 / (static_cast<double>(n_examples) * n_outputs);
    Matrix delta(n_examples, n_outputs);
    for (std::size_t i = 0; i < delta.size(); ++i)
        delta.data()[i] = scale * (y.data()[i] - batch.t.data()[i]);

    WeightGenome grad;
    grad.matrices.resize(genome.matrices.size());
    for (std::size_t layer = genome.matrices.size(); layer-- > 0;) {
        const Matrix& a = acts[layer];  // input to this layer, pre-augmentation
        const Matrix& w = genome.matrices[layer];
        Matrix gw(w.rows(), w.cols());
        // weight rows: a^T * delta; bias row: column sums of delta
        for (int i = 0; i < a.rows(); ++i) {
            const double* arow = a.row(i);
            const double* drow = delta.row(i);
            for (int k = 0; k < a.cols(); ++k) {
                double* grow = gw.row(k);
                const double aik = arow[k];
                for (int j = 0; j < gw.cols(); ++j) grow[j] += aik * drow[j];
            }
            double* brow = gw.row(gw.rows() - 1);
            for (int j = 0; j < gw.cols(); ++j) brow[j] += drow[j];
        }
        grad.matrices[layer] = std::move(gw);

        if (layer == 0) break;
        // propagate: delta_prev = (delta * W^T without bias row) .* act'(a)
        Matrix prev(n_examples, a.cols());
        for (int i = 0; i < n_examples; ++i) {
            const double* drow = delta.row(i);
            double* prow = prev.row(i);
            for (int k = 0; k < a.cols(); ++k) {
                const double* wrow = w.row(k);
                double s = 0.0;
                for (int j = 0; j < w.cols(); ++j) s += drow[j] * wrow[j];
                prow[k] = s;
            }
        }
        const ActivationKind kind = layer_activation(arch, layer - 1);
        if (kind != ActivationKind::Linear) {
            const double* arow = a.data();
            double* prow = prev.data();
            for (std::size_t i = 0; i < prev.size(); ++i) {
                const double v = arow[i];
                prow[i] *= kind == ActivationKind::Tanh ? 1.0 - v * v : v * (1.0 - v);
            }
        }
        delta = std::move(prev);
    }
    return grad;
}

namespace {

// Shared early-stopping bookkeeping: tracks the best validation MSE and the
// weights that achieved it, and signals a stop after `patience` epochs
// without strict improvement.
class EarlyStopper {
  public:
    EarlyStopper(const WeightGenome& start, double initial_validation, int patience)
        : best_weights_(start),
          best_validation_(initial_validation),
          patience_(patience) {}

    // returns true when training should stop
    bool observe(int epoch, double validation_mse, const WeightGenome& weights) {
        if (validation_mse < best_validation_) {
            best_validation_ = validation_mse;
            best_weights_ = weights;
            best_epoch_ = epoch;
            streak_ = 0;
        } else if (++streak_ >= patience_) {
            return true;
        }
        return false;
    }

    const WeightGenome& best_weights() const { return best_weights_; }
    double best_validation() const { return best_validation_; }
    int best_epoch() const { return best_epoch_; }

  private:
    WeightGenome best_weights_;
    double best_validation_;
    int patience_;
    int best_epoch_ = 0;
    int streak_ = 0;
};

TrainResult finish(const EarlyStopper& stop, std::vector<EpochStats> history, bool diverged,
                   std::string diagnostic) {
    TrainResult result;
    result.weights = stop.best_weights();
    result.history = std::move(history);
    result.best_epoch = stop.best_epoch();
    result.best_validation_mse = stop.best_validation();
    result.diverged = diverged;
    result.diagnostic = std::move(diagnostic);
    return result;
}

void validate_train_inputs(const Architecture& arch, const WeightGenome& start,
                           const DataSplit& split, const TrainConfig& cfg) {
    require_shapes(arch, start);
    if (split.train.x.rows() == 0) throw std::invalid_argument("train: empty training set");
    if (split.validation.x.rows() == 0)
        throw std::invalid_argument("train: empty validation set");
    if (cfg.max_epochs < 0) throw std::invalid_argument("train: negative epoch cap");
    if (cfg.patience < 1) throw std::invalid_argument("train: patience must be >= 1");
}

// ---- flat views over a genome for the SCG vector arithmetic ----

std::vector<double> flatten(const WeightGenome& genome) {
    std::vector<double> v;
    for (const Matrix& m : genome.matrices) v.insert(v.end(), m.data(), m.data() + m.size());
    return v;
}

void unflatten(const std::vector<double>& v, WeightGenome& genome) {
    std::size_t off = 0;
    for (Matrix& m : genome.matrices) {
        std::copy(v.begin() + off, v.begin() + off + m.size(), m.data());
        off += m.size();
    }
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TrainResult train_bp(const Architecture& arch, const WeightGenome& start, const DataSplit& split,
                     const TrainConfig& cfg) {
    validate_train_inputs(arch, start, split, cfg);

    WeightGenome weights = start;
    WeightGenome velocity = start;
    for (Matrix& m : velocity.matrices) std::fill(m.data(), m.data() + m.size(), 0.0);

    std::vector<EpochStats> history;
    const double val0 = mse_percent(arch, weights, split.validation);
    history.push_back({0, mse_percent(arch, weights, split.train), val0});
    EarlyStopper stop(weights, val0, cfg.patience);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const WeightGenome grad = gradient(arch, weights, split.train);
        for (std::size_t i = 0; i < weights.matrices.size(); ++i) {
            Matrix& w = weights.matrices[i];
            Matrix& v = velocity.matrices[i];
            const Matrix& g = grad.matrices[i];
            for (std::size_t k = 0; k < w.size(); ++k) {
                v.data()[k] = cfg.bp_momentum * v.data()[k] - cfg.bp_rate * g.data()[k];
                w.data()[k] += v.data()[k];
            }
        }
        const double train_mse = mse_percent(arch, weights, split.train);
        const double val_mse = mse_percent(arch, weights, split.validation);
        history.push_back({epoch, train_mse, val_mse});
        if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
            return finish(stop, std::move(history), true,
                          "bp: non-finite loss at epoch " + std::to_string(epoch));
        if (stop.observe(epoch, val_mse, weights)) break;
    }
    return finish(stop, std::move(history), false, "");
}

TrainResult train_scg(const Architecture& arch, const WeightGenome& start, const DataSplit& split,
                      const TrainConfig& cfg) {
    validate_train_inputs(arch, start, split, cfg);

    // the admissible sigma range starts at 0; the directional second-derivative
    // step needs a strictly positive scale.
    const double sigma0 = std::max(cfg.scg_sigma, 1.0e-10);
    double lambda = std::max(cfg.scg_lambda, 0.0);
    double lambda_bar = 0.0;

    WeightGenome genome = start;
    const std::size_t n = parameter_count(arch);

    auto error_at = [&](const std::vector<double>& w) {
        unflatten(w, genome);
        return mse_percent(arch, genome, split.train) / 100.0;
    };
    auto gradient_at = [&](const std::vector<double>& w) {
        unflatten(w, genome);
        return flatten(gradient(arch, genome, split.train));
    };

    std::vector<double> w = flatten(start);
    std::vector<double> grad = gradient_at(w);       // E'(w)
    std::vector<double> r(n), p(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = p[i] = -grad[i];
    bool success = true;
    double delta = 0.0, norm_p2 = 0.0;

    std::vector<EpochStats> history;
    unflatten(w, genome);
    const double val0 = mse_percent(arch, genome, split.validation);
    history.push_back({0, mse_percent(arch, genome, split.train), val0});
    EarlyStopper stop(genome, val0, cfg.patience);

    std::vector<double> scratch(n), s(n);
    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (success) {
            norm_p2 = dot(p, p);
            if (norm_p2 == 0.0) break;  // stationary point
            const double sigma_k = sigma0 / std::sqrt(norm_p2);
            for (std::size_t i = 0; i < n; ++i) scratch[i] = w[i] + sigma_k * p[i];
            const std::vector<double> grad_probe = gradient_at(scratch);
            for (std::size_t i = 0; i < n; ++i) s[i] = (grad_probe[i] - grad[i]) / sigma_k;
            delta = dot(p, s);
        }
        delta += (lambda - lambda_bar) * norm_p2;
        if (delta <= 0.0) {  // make the Hessian approximation positive definite
            lambda_bar = 2.0 * (lambda - delta / norm_p2);
            delta = -delta + lambda * norm_p2;
            lambda = lambda_bar;
        }
        const double mu = dot(p, r);
        const double alpha = mu / delta;
        const double err_old = error_at(w);
        for (std::size_t i = 0; i < n; ++i) scratch[i] = w[i] + alpha * p[i];
        const double err_new = error_at(scratch);
        const double comparison =
            std::isfinite(err_new) ? 2.0 * delta * (err_old - err_new) / (mu * mu) : -1.0;

        if (comparison >= 0.0) {
            w.swap(scratch);
            const std::vector<double> grad_new = gradient_at(w);
            lambda_bar = 0.0;
            success = true;
            if (epoch % static_cast<int>(n) == 0) {
                for (std::size_t i = 0; i < n; ++i) p[i] = -grad_new[i];  // restart
            } else {
                double rr = 0.0, r_old_dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    rr += grad_new[i] * grad_new[i];
                    r_old_dot += grad_new[i] * r[i];
                }
                const double beta = (rr + r_old_dot) / mu;  // r_new = -grad_new
                for (std::size_t i = 0; i < n; ++i) p[i] = -grad_new[i] + beta * p[i];
            }
            for (std::size_t i = 0; i < n; ++i) r[i] = -grad_new[i];
            grad = grad_new;
            if (comparison >= 0.75) lambda *= 0.25;
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if (comparison < 0.25) lambda += delta * (1.0 - comparison) / norm_p2;
        lambda = std::min(lambda, 1.0e100);

        unflatten(w, genome);
        const double train_mse = mse_percent(arch, genome, split.train);
        const double val_mse = mse_percent(arch, genome, split.validation);
        history.push_back({epoch, train_mse, val_mse});
        if (!std::isfinite(train_mse) || !std::isfinite(val_mse))
            return finish(stop, std::move(history), true,
                          "scg: non-finite loss at epoch " + std::to_string(epoch));
        if (stop.observe(epoch, val_mse, genome)) break;
        if (dot(r, r) < 1.0e-24) break;  // gradient vanished
    }
    return finish(stop, std::move(history), false, "");
}

}  // namespace cgann
