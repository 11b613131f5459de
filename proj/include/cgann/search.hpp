#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cgann/genome_ops.hpp"
#include "cgann/lattice.hpp"
#include "cgann/network.hpp"

namespace cgann {

struct GenerationCounts {
    int bera = 2;
    int beafa = 2;
    int bep = 2;
};

enum class UpdateMode { Sync, AsyncUniform, AsyncSweep };

const char* to_string(UpdateMode mode);
UpdateMode update_mode_from_string(const std::string& name);

// Desk-scale defaults; the full paper-scale configuration
// (16/25/25 populations, 16/5/3 generations) is expressible through the
// same fields.
struct SearchConfig {
    int pra_pop = 4;
    int paf_pop = 9;
    int ppi_pop = 9;
    GenerationCounts gens;
    UpdateMode mode = UpdateMode::Sync;
    NeighborhoodSpec neighborhood;
    OperatorConfig operators;
    int max_epochs = 50;
    int patience = 5;
    bool fitness_after_training = true;  // false scores untrained forward MSE
    std::vector<LearnAlg> algorithms = {LearnAlg::Bp, LearnAlg::Scg};
    std::uint64_t seed = 0;
    int threads = 1;
};

// side of the square grid holding `pop` individuals; throws unless pop is a
// perfect square
int lattice_side(int pop);
void validate_search_config(const SearchConfig& cfg);

enum class Level { Bep, Beafa, Bera };
const char* to_string(Level level);

// One best-fitness sample of one nested evolution run. run_id identifies
// the run (it is the run's RNG-key value, so it is stable across thread
// counts); generation 0 is the state before the run's first generation.
struct ProgressEvent {
    LearnAlg algorithm = LearnAlg::Bp;
    Level level = Level::Bep;
    std::uint64_t run_id = 0;
    int generation = 0;
    double best_fitness = 0.0;
    bool operator==(const ProgressEvent&) const = default;
};

using ProgressSink = std::function<void(const ProgressEvent&)>;

struct SearchStats {
    std::uint64_t trainings = 0;            // trainer invocations, total
    std::uint64_t initial_evaluations = 0;  // cells trained while building the hierarchy
    std::uint64_t ppi_children = 0;         // children evaluated by the PPI schedulers
    std::uint64_t ppi_generations = 0;
    std::uint64_t paf_children = 0;
    std::uint64_t pra_children = 0;
    std::uint64_t rebind_cells = 0;       // PPI cells retrained after an architecture change
    std::uint64_t rule_rebase_cells = 0;  // PPI cells retrained after a rule change
    std::uint64_t uniqueness_perturbations = 0;
    std::uint64_t divergences = 0;
};

// ---- nested population containers ----

// PPI individual: the evolvable initial weights plus the trained weights
// cached by the last evaluation.
struct PpiEntry {
    WeightGenome initial;
    WeightGenome trained;
};

// PAF individual: an architecture owning a PPI lattice shaped for it.
struct PafEntry {
    ArchGenome arch;
    Lattice<PpiEntry> ppi;
};

// PRA individual: a learning rule owning a PAF lattice.
struct PraEntry {
    RuleGenome rule;
    Lattice<PafEntry> paf;
};

struct TrainerSettings {
    int max_epochs = 50;
    int patience = 5;
    bool train = true;
};

struct PpiEvaluation {
    double fitness = 0.0;  // training-set MSE(%) of the returned weights
    WeightGenome trained;
    bool diverged = false;
};

TrainConfig rule_to_train_config(const RuleGenome& rule, int max_epochs, int patience);

// Trains from the given initial weights with the rule's algorithm and
// parameters and scores the best-validation weights on the training set.
// Training divergence yields the largest finite fitness instead of failing.
// With settings.train == false the weights are scored as-is.
PpiEvaluation evaluate_ppi(const WeightGenome& initial, const Architecture& arch,
                           const RuleGenome& rule, const DataSplit& split,
                           const TrainerSettings& settings);

// Aggregate fitness of an evaluated sub-lattice: its minimum cell fitness.
double evaluate_paf(const Lattice<PpiEntry>& ppi);
double evaluate_pra(const Lattice<PafEntry>& paf);

// Re-initializes the PPI lattice when its genomes are no longer shaped for
// the cell's architecture; fitnesses are invalidated (set to +infinity)
// until re-evaluated. No-op when the shapes still match. Returns whether a
// re-initialization happened.
bool rebind_ppi(PafEntry& entry, int input_dim, int output_dim, RngKey key);

struct AlgorithmResult {
    LearnAlg algorithm = LearnAlg::Bp;
    RuleGenome rule;
    ArchGenome arch;
    WeightGenome trained;
    double best_fitness = 0.0;  // training-set MSE(%) driving the search
    double train_mse = 0.0;
    double validation_mse = 0.0;
    double test_mse = 0.0;
    SearchStats stats;
    // canonical order: sorted by (run_id, generation)
    std::vector<ProgressEvent> trajectory;
};

struct SearchResult {
    std::vector<AlgorithmResult> algorithms;
};

// The full nested search (BERA over BEAFA over BEP) for every configured
// learning algorithm. Deterministic: the same config and split produce an
// identical result for any thread count.
SearchResult run_search(const SearchConfig& cfg, const DataSplit& split,
                        const ProgressSink& sink = {});

}  // namespace cgann
