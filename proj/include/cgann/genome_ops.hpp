#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

#include "cgann/lattice.hpp"
#include "cgann/network.hpp"
#include "cgann/rng.hpp"

namespace cgann {

// Evolvable architecture: the hidden layers only (input/output widths come
// from the problem).
struct ArchGenome {
    std::vector<HiddenLayer> layers;
    bool operator==(const ArchGenome&) const = default;
};

void validate_arch_genome(const ArchGenome& g);
ArchGenome random_arch_genome(RngStream& rng);
Architecture make_architecture(int input_dim, int output_dim, const ArchGenome& g);

// Same layer count and per-layer sizes; activation functions not compared.
bool structurally_equal(const ArchGenome& a, const ArchGenome& b);

// Learning-rule parameters: BP carries (rate, momentum), SCG carries
// (sigma, lambda). Both live in the params array so interval crossover and
// percentage mutation treat them uniformly.
struct RuleGenome {
    LearnAlg algorithm = LearnAlg::Scg;
    std::array<double, 2> params = {0.0, 0.0};

    double rate() const { return params[0]; }
    double momentum() const { return params[1]; }
    double sigma() const { return params[0]; }
    double lambda() const { return params[1]; }

    bool operator==(const RuleGenome&) const = default;
};

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Admissible range for parameter i of the given algorithm: BP rate and
// momentum in [0.05, 0.25], SCG sigma in [0, 1e-4] and lambda in [0, 1e-6].
ParamRange rule_param_range(LearnAlg alg, std::size_t i);
RuleGenome random_rule_genome(LearnAlg alg, RngStream& rng);
void validate_rule_genome(const RuleGenome& g);

struct OperatorConfig {
    double probs = 0.5;          // slice-pattern choice: fatia2 with prob (1 - probs)
    double mutation_rate = 10.0; // m, in percent of individuals and of composition
    double fx_low = -0.5;        // additive weight-mutation value range
    double fx_high = 0.5;
    int arqval_low = -2;         // layer-size perturbation range
    int arqval_high = 5;
};

void validate_operator_config(const OperatorConfig& cfg);

// round-half-up of (m * n / 100): how many of n children mutate.
std::size_t mutation_count(std::size_t n, double m_percent);

// ceil of (m * total / 100): how many entries of a matrix mutate.
std::size_t mutated_entry_count(std::size_t total, double m_percent);

// Distinct indices drawn without replacement, in draw order.
std::vector<std::size_t> select_mutation_targets(std::size_t n, double m_percent, RngStream& rng);

// Row-slice crossover over weight matrices. Per matrix, with probability
// (1 - probs) the child is two half-row blocks ([a_top;b_bot] or
// [b_top;a_bot], chosen uniformly), otherwise three third-row blocks
// ([a_top;b_mid;a_bot] or [b_top;a_mid;b_bot]). Odd row counts give the
// extra row(s) to the earlier slices.
WeightGenome crossover_ppi(const WeightGenome& a, const WeightGenome& b,
                           const OperatorConfig& cfg, RngStream& rng);

// Mutates round-half-up(m% of n) children in place, chosen without
// replacement; each weight matrix of a chosen child receives a sparse
// additive matrix with ceil(m% of entries) nonzeros uniform in
// [fx_low, fx_high].
void mutate_ppi(std::vector<WeightGenome>& children, const OperatorConfig& cfg, RngStream& rng);

// Architecture crossover: the child layer count is ceil((na+nb)/2) with
// probability (1 - probs), floor otherwise, clamped to [1,3]; each child
// layer draws one (size, activation) pair uniformly with replacement from
// the pooled parent layers.
ArchGenome crossover_paf(const ArchGenome& a, const ArchGenome& b, const OperatorConfig& cfg,
                         RngStream& rng);

// Layer-count / layer-size mutation: a draw p >= 0.6 and
// 0.5 <= p < 0.6 move the layer count (biased toward three layers from one
// or two), anything below perturbs every layer size by an integer drawn
// from [arqval_low, arqval_high], clamped to [1,12]. Same target-selection
// rule as mutate_ppi.
void mutate_paf(std::vector<ArchGenome>& children, const OperatorConfig& cfg, RngStream& rng);

// The perturbation branch alone (used by the duplicate-architecture sweep).
void perturb_arch(ArchGenome& g, const OperatorConfig& cfg, RngStream& rng);

// Duplicate-structure sweep over a PAF lattice: while two cells hold
// structurally equal architectures, one of each colliding pair is passed
// through the perturbation path, for at most side*side passes. The cell
// with the best fitness is never the one perturbed, so the lattice best
// survives the sweep; among the remaining twins the later one in row-major
// order is perturbed. Returns the indices of every cell that was modified.
//
// ArchOf: invocable mapping Cell<G>::genome to ArchGenome&.
template <class G, class ArchOf>
std::vector<std::size_t> enforce_paf_uniqueness(Lattice<G>& lat, const OperatorConfig& cfg,
                                                RngKey key, ArchOf&& arch_of);

// Interval crossover: each child parameter uniform on [min(a_i,b_i),
// max(a_i,b_i)]. Throws when the parents carry different algorithms.
RuleGenome crossover_pra(const RuleGenome& a, const RuleGenome& b, RngStream& rng);

// Per parameter, a fair coin adds or subtracts m% of its own value; the
// result is clamped to the parameter's admissible range.
RuleGenome mutate_pra(const RuleGenome& g, const OperatorConfig& cfg, RngStream& rng);

// ---- template implementation ----

template <class G, class ArchOf>
std::vector<std::size_t> enforce_paf_uniqueness(Lattice<G>& lat, const OperatorConfig& cfg,
                                                RngKey key, ArchOf&& arch_of) {
    std::vector<std::size_t> touched;
    const std::size_t n = lat.size();
    for (std::size_t pass = 0; pass < n; ++pass) {
        const std::size_t protected_idx = lat.best_index();
        bool collision = false;
        RngStream rng = key.fold(pass).stream();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                if (!structurally_equal(arch_of(lat.at(i).genome), arch_of(lat.at(j).genome)))
                    continue;
                const std::size_t victim = (j == protected_idx) ? i : j;
                perturb_arch(arch_of(lat.at(victim).genome), cfg, rng);
                touched.push_back(victim);
                collision = true;
            }
        }
        if (!collision) break;
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    return touched;
}

}  // namespace cgann
