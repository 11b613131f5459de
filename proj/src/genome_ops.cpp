#include "cgann/genome_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cgann {

void validate_arch_genome(const ArchGenome& g) {
    const int h = static_cast<int>(g.layers.size());
    if (h < kMinHiddenLayers || h > kMaxHiddenLayers)
        throw std::invalid_argument("arch genome: layer count outside [1,3]");
    for (const HiddenLayer& layer : g.layers)
        if (layer.size < kMinLayerSize || layer.size > kMaxLayerSize)
            throw std::invalid_argument("arch genome: layer size outside [1,12]");
}

namespace {

HiddenLayer random_layer(RngStream& rng) {
    HiddenLayer layer;
    layer.size = static_cast<int>(rng.uniform_int(kMinLayerSize, kMaxLayerSize));
    switch (rng.index(3)) {
        case 0: layer.act = ActivationKind::Linear; break;
        case 1: layer.act = ActivationKind::Tanh; break;
        default: layer.act = ActivationKind::Logistic; break;
    }
    return layer;
}

int clamp_size(int size) { return std::clamp(size, kMinLayerSize, kMaxLayerSize); }

double clamp_param(LearnAlg alg, std::size_t i, double v) {
    const ParamRange range = rule_param_range(alg, i);
    return std::clamp(v, range.lo, range.hi);
}

}  // namespace

ArchGenome random_arch_genome(RngStream& rng) {
    ArchGenome g;
    const int layers = static_cast<int>(rng.uniform_int(kMinHiddenLayers, kMaxHiddenLayers));
    g.layers.reserve(layers);
    for (int i = 0; i < layers; ++i) g.layers.push_back(random_layer(rng));
    return g;
}

Architecture make_architecture(int input_dim, int output_dim, const ArchGenome& g) {
    Architecture arch;
    arch.input_dim = input_dim;
    arch.output_dim = output_dim;
    arch.hidden = g.layers;
    validate_architecture(arch);
    return arch;
}

bool structurally_equal(const ArchGenome& a, const ArchGenome& b) {
    if (a.layers.size() != b.layers.size()) return false;
    for (std::size_t i = 0; i < a.layers.size(); ++i)
        if (a.layers[i].size != b.layers[i].size) return false;
    return true;
}

ParamRange rule_param_range(LearnAlg alg, std::size_t i) {
    if (alg == LearnAlg::Bp) return {0.05, 0.25};        // rate and momentum share the range
    return i == 0 ? ParamRange{0.0, 1.0e-4}              // sigma
                  : ParamRange{0.0, 1.0e-6};             // lambda
}

RuleGenome random_rule_genome(LearnAlg alg, RngStream& rng) {
    RuleGenome g;
    g.algorithm = alg;
    for (std::size_t i = 0; i < g.params.size(); ++i) {
        const ParamRange range = rule_param_range(alg, i);
        g.params[i] = rng.uniform(range.lo, range.hi);
    }
    return g;
}

void validate_rule_genome(const RuleGenome& g) {
    for (std::size_t i = 0; i < g.params.size(); ++i) {
        const ParamRange range = rule_param_range(g.algorithm, i);
        if (g.params[i] < range.lo || g.params[i] > range.hi)
            throw std::invalid_argument("rule genome: parameter out of range");
    }
}

void validate_operator_config(const OperatorConfig& cfg) {
    if (cfg.probs < 0.0 || cfg.probs > 1.0)
        throw std::invalid_argument("operators: probs outside [0,1]");
    if (cfg.mutation_rate < 0.0 || cfg.mutation_rate > 100.0)
        throw std::invalid_argument("operators: mutation rate outside [0,100]");
    if (cfg.fx_low > cfg.fx_high) throw std::invalid_argument("operators: empty fx range");
    if (cfg.arqval_low > cfg.arqval_high)
        throw std::invalid_argument("operators: empty arqval range");
}

std::size_t mutation_count(std::size_t n, double m_percent) {
    // (m * n) / 100 keeps exact-representable products exact (e.g. 10 * 20).
    return static_cast<std::size_t>(
        std::floor(m_percent * static_cast<double>(n) / 100.0 + 0.5));
}

std::size_t mutated_entry_count(std::size_t total, double m_percent) {
    return static_cast<std::size_t>(
        std::ceil(m_percent * static_cast<double>(total) / 100.0));
}

std::vector<std::size_t> select_mutation_targets(std::size_t n, double m_percent,
                                                 RngStream& rng) {
    const std::size_t want = std::min(mutation_count(n, m_percent), n);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> picked;
    picked.reserve(want);
    for (std::size_t k = 0; k < want; ++k) {
        const std::size_t j = k + rng.index(n - k);
        std::swap(pool[k], pool[j]);
        picked.push_back(pool[k]);
    }
    return picked;
}

namespace {

// Split point so the top block holds ceil(rows/2).
int half_split(int rows) { return (rows + 1) / 2; }

Matrix slice2(const Matrix& a, const Matrix& b, bool a_on_top) {
    const int cut = half_split(a.rows());
    Matrix child(a.rows(), a.cols());
    const Matrix& top = a_on_top ? a : b;
    const Matrix& bot = a_on_top ? b : a;
    for (int r = 0; r < a.rows(); ++r) {
        const double* src = (r < cut ? top : bot).row(r);
        std::copy(src, src + a.cols(), child.row(r));
    }
    return child;
}

Matrix slice3(const Matrix& a, const Matrix& b, bool a_outer) {
    // earlier thirds take the remainder rows
    const int rows = a.rows();
    const int base = rows / 3;
    const int rem = rows % 3;
    const int cut1 = base + (rem > 0 ? 1 : 0);
    const int cut2 = cut1 + base + (rem > 1 ? 1 : 0);
    const Matrix& outer = a_outer ? a : b;
    const Matrix& mid = a_outer ? b : a;
    Matrix child(rows, a.cols());
    for (int r = 0; r < rows; ++r) {
        const double* src = (r < cut1 || r >= cut2 ? outer : mid).row(r);
        std::copy(src, src + a.cols(), child.row(r));
    }
    return child;
}

}  // namespace

WeightGenome crossover_ppi(const WeightGenome& a, const WeightGenome& b,
                           const OperatorConfig& cfg, RngStream& rng) {
    if (a.matrices.size() != b.matrices.size())
        throw std::invalid_argument("crossover_ppi: parents have different matrix counts");
    WeightGenome child;
    child.matrices.reserve(a.matrices.size());
    for (std::size_t i = 0; i < a.matrices.size(); ++i) {
        const Matrix& ma = a.matrices[i];
        const Matrix& mb = b.matrices[i];
        if (!ma.same_shape(mb))
            throw std::invalid_argument("crossover_ppi: shape mismatch at matrix " +
                                        std::to_string(i) + " (" + ma.shape_str() + " vs " +
                                        mb.shape_str() + ")");
        const bool two_slices = rng.canonical() > cfg.probs;
        const bool a_first = rng.canonical() < 0.5;
        child.matrices.push_back(two_slices ? slice2(ma, mb, a_first)
                                            : slice3(ma, mb, a_first));
    }
    return child;
}

void mutate_ppi(std::vector<WeightGenome>& children, const OperatorConfig& cfg, RngStream& rng) {
    for (const std::size_t idx : select_mutation_targets(children.size(), cfg.mutation_rate, rng)) {
        for (Matrix& m : children[idx].matrices) {
            const std::size_t total = m.size();
            const std::size_t hits = std::min(mutated_entry_count(total, cfg.mutation_rate), total);
            // sparse additive matrix: `hits` distinct positions, rest zero
            std::vector<std::size_t> pos(total);
            std::iota(pos.begin(), pos.end(), std::size_t{0});
            for (std::size_t k = 0; k < hits; ++k) {
                const std::size_t j = k + rng.index(total - k);
                std::swap(pos[k], pos[j]);
                m.data()[pos[k]] += rng.uniform(cfg.fx_low, cfg.fx_high);
            }
        }
    }
}

ArchGenome crossover_paf(const ArchGenome& a, const ArchGenome& b, const OperatorConfig& cfg,
                         RngStream& rng) {
    const int total = static_cast<int>(a.layers.size() + b.layers.size());
    const bool round_up = rng.canonical() > cfg.probs;
    int count = round_up ? (total + 1) / 2 : total / 2;
    count = std::clamp(count, kMinHiddenLayers, kMaxHiddenLayers);

    std::vector<HiddenLayer> pool;
    pool.reserve(a.layers.size() + b.layers.size());
    pool.insert(pool.end(), a.layers.begin(), a.layers.end());
    pool.insert(pool.end(), b.layers.begin(), b.layers.end());

    ArchGenome child;
    child.layers.reserve(count);
    for (int i = 0; i < count; ++i) child.layers.push_back(pool[rng.index(pool.size())]);
    return child;
}

void perturb_arch(ArchGenome& g, const OperatorConfig& cfg, RngStream& rng) {
    for (HiddenLayer& layer : g.layers)
        layer.size = clamp_size(layer.size +
                                static_cast<int>(rng.uniform_int(cfg.arqval_low, cfg.arqval_high)));
}

namespace {

void resize_layer_count(ArchGenome& g, int target, RngStream& rng) {
    const int current = static_cast<int>(g.layers.size());
    if (target < current) {
        g.layers.resize(target);  // first layers survive
    } else {
        for (int i = current; i < target; ++i) g.layers.push_back(random_layer(rng));
    }
}

}  // namespace

void mutate_paf(std::vector<ArchGenome>& children, const OperatorConfig& cfg, RngStream& rng) {
    for (const std::size_t idx : select_mutation_targets(children.size(), cfg.mutation_rate, rng)) {
        ArchGenome& child = children[idx];
        const double p = rng.canonical();
        const int layers = static_cast<int>(child.layers.size());
        // biased toward more layers (and implicitly fewer nodes per layer)
        if (layers == 1) {
            if (p >= 0.6) resize_layer_count(child, 3, rng);
            else if (p >= 0.5) resize_layer_count(child, 2, rng);
            else perturb_arch(child, cfg, rng);
        } else if (layers == 2) {
            if (p >= 0.6) resize_layer_count(child, 3, rng);
            else if (p >= 0.5) resize_layer_count(child, 1, rng);
            else perturb_arch(child, cfg, rng);
        } else {
            if (p >= 0.6) resize_layer_count(child, 2, rng);
            else if (p >= 0.5) resize_layer_count(child, 1, rng);
            else perturb_arch(child, cfg, rng);
        }
    }
}

RuleGenome crossover_pra(const RuleGenome& a, const RuleGenome& b, RngStream& rng) {
    if (a.algorithm != b.algorithm)
        throw std::invalid_argument("crossover_pra: parents use different learning algorithms");
    RuleGenome child;
    child.algorithm = a.algorithm;
    for (std::size_t i = 0; i < child.params.size(); ++i) {
        const double lo = std::min(a.params[i], b.params[i]);
        const double hi = std::max(a.params[i], b.params[i]);
        child.params[i] = rng.uniform(lo, hi);
    }
    return child;
}

RuleGenome mutate_pra(const RuleGenome& g, const OperatorConfig& cfg, RngStream& rng) {
    RuleGenome out = g;
    const double factor = cfg.mutation_rate / 100.0;
    for (std::size_t i = 0; i < out.params.size(); ++i) {
        const double step = factor * out.params[i];
        out.params[i] = clamp_param(out.algorithm, i,
                                    rng.coin() ? out.params[i] + step : out.params[i] - step);
    }
    return out;
}

}  // namespace cgann
