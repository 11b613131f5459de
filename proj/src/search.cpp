#include "cgann/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace cgann {

const char* to_string(UpdateMode mode) {
    switch (mode) {
        case UpdateMode::Sync: return "sync";
        case UpdateMode::AsyncUniform: return "async-uniform";
        case UpdateMode::AsyncSweep: return "async-sweep";
    }
    return "?";
}

UpdateMode update_mode_from_string(const std::string& name) {
    if (name == "sync") return UpdateMode::Sync;
    if (name == "async-uniform") return UpdateMode::AsyncUniform;
    if (name == "async-sweep") return UpdateMode::AsyncSweep;
    throw std::invalid_argument("unknown update mode: " + name);
}

const char* to_string(Level level) {
    switch (level) {
        case Level::Bep: return "bep";
        case Level::Beafa: return "beafa";
        case Level::Bera: return "bera";
    }
    return "?";
}

int lattice_side(int pop) {
    if (pop < 4) throw std::invalid_argument("population size must be >= 4");
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(pop))));
    if (side * side != pop)
        throw std::invalid_argument("population size " + std::to_string(pop) +
                                    " is not a perfect square");
    return side;
}

void validate_search_config(const SearchConfig& cfg) {
    lattice_side(cfg.pra_pop);
    lattice_side(cfg.paf_pop);
    lattice_side(cfg.ppi_pop);
    if (cfg.gens.bera < 1 || cfg.gens.beafa < 1 || cfg.gens.bep < 1)
        throw std::invalid_argument("generation counts must be >= 1");
    if (cfg.max_epochs < 0 || cfg.max_epochs > 50)
        throw std::invalid_argument("max_epochs outside [0,50]");
    if (cfg.patience < 1) throw std::invalid_argument("patience must be >= 1");
    if (cfg.threads < 1) throw std::invalid_argument("threads must be >= 1");
    if (cfg.algorithms.empty()) throw std::invalid_argument("no learning algorithm selected");
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.algorithms.size(); ++j)
            if (cfg.algorithms[i] == cfg.algorithms[j])
                throw std::invalid_argument("duplicate learning algorithm in config");
    validate_operator_config(cfg.operators);
}

TrainConfig rule_to_train_config(const RuleGenome& rule, int max_epochs, int patience) {
    TrainConfig tc;
    tc.algorithm = rule.algorithm;
    if (rule.algorithm == LearnAlg::Bp) {
        tc.bp_rate = rule.rate();
        tc.bp_momentum = rule.momentum();
    } else {
        tc.scg_sigma = rule.sigma();
        tc.scg_lambda = rule.lambda();
    }
    tc.max_epochs = max_epochs;
    tc.patience = patience;
    return tc;
}

PpiEvaluation evaluate_ppi(const WeightGenome& initial, const Architecture& arch,
                           const RuleGenome& rule, const DataSplit& split,
                           const TrainerSettings& settings) {
    PpiEvaluation out;
    if (!settings.train) {
        out.trained = initial;
        out.fitness = mse_percent(arch, initial, split.train);
        return out;
    }
    const TrainConfig tc = rule_to_train_config(rule, settings.max_epochs, settings.patience);
    TrainResult tr = rule.algorithm == LearnAlg::Bp ? train_bp(arch, initial, split, tc)
                                                    : train_scg(arch, initial, split, tc);
    out.trained = std::move(tr.weights);
    out.diverged = tr.diverged;
    out.fitness = out.diverged ? std::numeric_limits<double>::max()
                               : mse_percent(arch, out.trained, split.train);
    if (!std::isfinite(out.fitness)) {
        out.fitness = std::numeric_limits<double>::max();
        out.diverged = true;
    }
    return out;
}

double evaluate_paf(const Lattice<PpiEntry>& ppi) { return ppi.best_fitness(); }

double evaluate_pra(const Lattice<PafEntry>& paf) { return paf.best_fitness(); }

bool rebind_ppi(PafEntry& entry, int input_dim, int output_dim, RngKey key) {
    const Architecture arch = make_architecture(input_dim, output_dim, entry.arch);
    bool all_match = true;
    for (std::size_t i = 0; i < entry.ppi.size(); ++i) {
        if (!shapes_match(arch, entry.ppi.at(i).genome.initial)) {
            all_match = false;
            break;
        }
    }
    if (all_match) return false;
    for (std::size_t i = 0; i < entry.ppi.size(); ++i) {
        RngStream rng = key.fold(i).stream();
        Cell<PpiEntry>& cell = entry.ppi.at(i);
        cell.genome.initial = init_weights(arch, rng);
        cell.genome.trained = cell.genome.initial;
        cell.fitness = std::numeric_limits<double>::infinity();
    }
    return true;
}

namespace {

// Nested search for one learning algorithm. RNG keys are folded along the
// path (algorithm, phase, generation, cell, child, ...) so every randomized
// step owns a stream that does not depend on evaluation order.
class Engine {
  public:
    Engine(const SearchConfig& cfg, const DataSplit& split, LearnAlg alg,
           const ProgressSink& sink)
        : cfg_(cfg),
          split_(split),
          alg_(alg),
          sink_(sink),
          pra_side_(lattice_side(cfg.pra_pop)),
          paf_side_(lattice_side(cfg.paf_pop)),
          ppi_side_(lattice_side(cfg.ppi_pop)),
          input_dim_(split.train.x.cols()),
          output_dim_(split.train.t.cols()),
          root_(RngKey::root(cfg.seed).fold(alg == LearnAlg::Bp ? 0 : 1)) {}

    AlgorithmResult run();

  private:
    // ---- evaluation ----

    Architecture architecture_of(const ArchGenome& g) const {
        return make_architecture(input_dim_, output_dim_, g);
    }

    PpiEvaluation eval_weights(const WeightGenome& w, const Architecture& arch,
                               const RuleGenome& rule) {
        TrainerSettings settings{cfg_.max_epochs, cfg_.patience, cfg_.fitness_after_training};
        PpiEvaluation ev = evaluate_ppi(w, arch, rule, split_, settings);
        if (settings.train) trainings_.fetch_add(1, std::memory_order_relaxed);
        if (ev.diverged) divergences_.fetch_add(1, std::memory_order_relaxed);
        return ev;
    }

    // Retrains every cell from its initial weights; used when cached
    // fitnesses no longer reflect the cell's architecture or rule.
    void reevaluate_ppi_lattice(Lattice<PpiEntry>& lat, const Architecture& arch,
                                const RuleGenome& rule, std::atomic<std::uint64_t>& counter) {
        for (std::size_t i = 0; i < lat.size(); ++i) {
            Cell<PpiEntry>& cell = lat.at(i);
            PpiEvaluation ev = eval_weights(cell.genome.initial, arch, rule);
            cell.genome.trained = std::move(ev.trained);
            cell.fitness = ev.fitness;
            counter.fetch_add(1, std::memory_order_relaxed);
        }
    }

    // ---- initial hierarchy: generate everything, then evaluate bottom-up ----

    Cell<PpiEntry> make_ppi_cell(const Architecture& arch, const RuleGenome& rule, RngKey key) {
        RngStream rng = key.stream();
        PpiEntry entry{init_weights(arch, rng), {}};
        PpiEvaluation ev = eval_weights(entry.initial, arch, rule);
        entry.trained = std::move(ev.trained);
        initial_evaluations_.fetch_add(1, std::memory_order_relaxed);
        return {std::move(entry), ev.fitness};
    }

    Lattice<PpiEntry> make_ppi_lattice(const Architecture& arch, const RuleGenome& rule,
                                       RngKey key) {
        const GridDims dims{ppi_side_};
        std::size_t idx = 0;
        return Lattice<PpiEntry>(
            dims, [&](Coord) { return make_ppi_cell(arch, rule, key.fold(idx++)); });
    }

    Cell<PafEntry> make_paf_cell(const RuleGenome& rule, RngKey key) {
        RngStream rng = key.fold(0).stream();
        ArchGenome arch = random_arch_genome(rng);
        Lattice<PpiEntry> ppi = make_ppi_lattice(architecture_of(arch), rule, key.fold(1));
        const double fitness = evaluate_paf(ppi);
        return {PafEntry{std::move(arch), std::move(ppi)}, fitness};
    }

    Lattice<PafEntry> make_paf_lattice(const RuleGenome& rule, RngKey key) {
        const GridDims dims{paf_side_};
        std::size_t idx = 0;
        return Lattice<PafEntry>(dims,
                                 [&](Coord) { return make_paf_cell(rule, key.fold(idx++)); });
    }

    Cell<PraEntry> make_pra_cell(RngKey key) {
        RngStream rng = key.fold(0).stream();
        RuleGenome rule = random_rule_genome(alg_, rng);
        Lattice<PafEntry> paf = make_paf_lattice(rule, key.fold(1));
        const double fitness = evaluate_pra(paf);
        return {PraEntry{std::move(rule), std::move(paf)}, fitness};
    }

    Lattice<PraEntry> make_pra_lattice(RngKey key) {
        const GridDims dims{pra_side_};
        std::size_t idx = 0;
        return Lattice<PraEntry>(dims, [&](Coord) { return make_pra_cell(key.fold(idx++)); });
    }

    // ---- scheduling ----

    template <class G, class Ops>
    Lattice<G> step(Lattice<G> lat, Ops&& ops, RngKey key) {
        switch (cfg_.mode) {
            case UpdateMode::Sync:
                return synchronous_generation(lat, ops, key, cfg_.threads);
            case UpdateMode::AsyncUniform:
                return asynchronous_generation(std::move(lat), ops, AsyncPolicy::UniformChoice,
                                               key);
            case UpdateMode::AsyncSweep:
                return asynchronous_generation(std::move(lat), ops, AsyncPolicy::LineSweep, key);
        }
        throw std::logic_error("unreachable update mode");
    }

    // ---- PPI level (BEP) ----

    auto ppi_ops(const Architecture& arch, const RuleGenome& rule) {
        return [this, &arch, &rule](const Lattice<PpiEntry>& lat, Coord c,
                                    RngKey key) -> std::vector<Cell<PpiEntry>> {
            const std::vector<Coord> nb = neighbors(c, cfg_.neighborhood, lat.dims());
            RngStream ops_rng = key.fold(0).stream();
            std::vector<WeightGenome> kids;
            kids.reserve(nb.size() / 2);
            for (std::size_t i = 0; i + 1 < nb.size(); i += 2)
                kids.push_back(crossover_ppi(lat.at(nb[i]).genome.initial,
                                             lat.at(nb[i + 1]).genome.initial, cfg_.operators,
                                             ops_rng));
            mutate_ppi(kids, cfg_.operators, ops_rng);
            std::vector<Cell<PpiEntry>> out;
            out.reserve(kids.size());
            for (WeightGenome& kid : kids) {
                PpiEvaluation ev = eval_weights(kid, arch, rule);
                ppi_children_.fetch_add(1, std::memory_order_relaxed);
                out.push_back({PpiEntry{std::move(kid), std::move(ev.trained)}, ev.fitness});
            }
            return out;
        };
    }

    void evolve_ppi(Lattice<PpiEntry>& lat, const Architecture& arch, const RuleGenome& rule,
                    RngKey key) {
        emit(Level::Bep, key.value(), 0, lat.best_fitness());
        for (int g = 1; g <= cfg_.gens.bep; ++g) {
            lat = step(std::move(lat), ppi_ops(arch, rule), key.fold(g));
            ppi_generations_.fetch_add(1, std::memory_order_relaxed);
            emit(Level::Bep, key.value(), g, lat.best_fitness());
        }
    }

    // ---- PAF level (BEAFA) ----

    // Makes the entry's cached fitness valid under `rule`, then evolves its
    // PPI lattice; the PAF fitness is the lattice minimum afterwards.
    double score_paf_entry(PafEntry& entry, const RuleGenome& rule, RngKey key,
                           bool fitness_valid) {
        const Architecture arch = architecture_of(entry.arch);
        if (rebind_ppi(entry, input_dim_, output_dim_, key.fold(0)) || !fitness_valid)
            reevaluate_ppi_lattice(entry.ppi, arch, rule, rebind_cells_);
        evolve_ppi(entry.ppi, arch, rule, key.fold(1));
        return evaluate_paf(entry.ppi);
    }

    auto paf_ops(const RuleGenome& rule) {
        return [this, &rule](const Lattice<PafEntry>& lat, Coord c,
                             RngKey key) -> std::vector<Cell<PafEntry>> {
            const std::vector<Coord> nb = neighbors(c, cfg_.neighborhood, lat.dims());
            RngStream ops_rng = key.fold(0).stream();
            std::vector<ArchGenome> kids;
            std::vector<const Cell<PafEntry>*> donors;
            for (std::size_t i = 0; i + 1 < nb.size(); i += 2) {
                const Cell<PafEntry>& pa = lat.at(nb[i]);
                const Cell<PafEntry>& pb = lat.at(nb[i + 1]);
                kids.push_back(
                    crossover_paf(pa.genome.arch, pb.genome.arch, cfg_.operators, ops_rng));
                donors.push_back(pb.fitness < pa.fitness ? &pb : &pa);
            }
            mutate_paf(kids, cfg_.operators, ops_rng);
            std::vector<Cell<PafEntry>> out;
            out.reserve(kids.size());
            for (std::size_t k = 0; k < kids.size(); ++k) {
                const Cell<PafEntry>& donor = *donors[k];
                PafEntry entry{std::move(kids[k]), donor.genome.ppi};
                const bool valid = entry.arch == donor.genome.arch;
                const double fitness = score_paf_entry(entry, rule, key.fold(1 + k), valid);
                paf_children_.fetch_add(1, std::memory_order_relaxed);
                out.push_back({std::move(entry), fitness});
            }
            return out;
        };
    }

    void evolve_paf(Lattice<PafEntry>& lat, const RuleGenome& rule, RngKey key) {
        emit(Level::Beafa, key.value(), 0, lat.best_fitness());
        for (int g = 1; g <= cfg_.gens.beafa; ++g) {
            // duplicate-structure sweep before variation
            const RngKey ekey = key.fold(2 * g);
            const std::vector<std::size_t> touched = enforce_paf_uniqueness(
                lat, cfg_.operators, ekey, [](PafEntry& e) -> ArchGenome& { return e.arch; });
            uniqueness_perturbations_.fetch_add(touched.size(), std::memory_order_relaxed);
            for (const std::size_t idx : touched) {
                Cell<PafEntry>& cell = lat.at(idx);
                const Architecture arch = architecture_of(cell.genome.arch);
                rebind_ppi(cell.genome, input_dim_, output_dim_, ekey.fold(lat.size() + idx));
                reevaluate_ppi_lattice(cell.genome.ppi, arch, rule, rebind_cells_);
                cell.fitness = evaluate_paf(cell.genome.ppi);
            }
            lat = step(std::move(lat), paf_ops(rule), key.fold(2 * g + 1));
            emit(Level::Beafa, key.value(), g, lat.best_fitness());
        }
    }

    // ---- PRA level (BERA) ----

    double score_pra_entry(PraEntry& entry, RngKey key, bool rule_unchanged) {
        if (!rule_unchanged) {
            // the inherited lattice was trained under the donor's rule
            for (std::size_t i = 0; i < entry.paf.size(); ++i) {
                Cell<PafEntry>& cell = entry.paf.at(i);
                reevaluate_ppi_lattice(cell.genome.ppi, architecture_of(cell.genome.arch),
                                       entry.rule, rule_rebase_cells_);
                cell.fitness = evaluate_paf(cell.genome.ppi);
            }
        }
        evolve_paf(entry.paf, entry.rule, key.fold(0));
        return evaluate_pra(entry.paf);
    }

    auto pra_ops() {
        return [this](const Lattice<PraEntry>& lat, Coord c,
                      RngKey key) -> std::vector<Cell<PraEntry>> {
            const std::vector<Coord> nb = neighbors(c, cfg_.neighborhood, lat.dims());
            RngStream ops_rng = key.fold(0).stream();
            std::vector<RuleGenome> kids;
            std::vector<const Cell<PraEntry>*> donors;
            for (std::size_t i = 0; i + 1 < nb.size(); i += 2) {
                const Cell<PraEntry>& pa = lat.at(nb[i]);
                const Cell<PraEntry>& pb = lat.at(nb[i + 1]);
                kids.push_back(crossover_pra(pa.genome.rule, pb.genome.rule, ops_rng));
                donors.push_back(pb.fitness < pa.fitness ? &pb : &pa);
            }
            for (const std::size_t idx :
                 select_mutation_targets(kids.size(), cfg_.operators.mutation_rate, ops_rng))
                kids[idx] = mutate_pra(kids[idx], cfg_.operators, ops_rng);
            std::vector<Cell<PraEntry>> out;
            out.reserve(kids.size());
            for (std::size_t k = 0; k < kids.size(); ++k) {
                const Cell<PraEntry>& donor = *donors[k];
                PraEntry entry{kids[k], donor.genome.paf};
                const bool unchanged = entry.rule == donor.genome.rule;
                const double fitness = score_pra_entry(entry, key.fold(1 + k), unchanged);
                pra_children_.fetch_add(1, std::memory_order_relaxed);
                out.push_back({std::move(entry), fitness});
            }
            return out;
        };
    }

    // ---- top level ----

  public:
    AlgorithmResult run_impl() {
        Lattice<PraEntry> pra = make_pra_lattice(root_.fold(0));
        const RngKey evo = root_.fold(1);
        emit(Level::Bera, evo.value(), 0, pra.best_fitness());
        for (int g = 1; g <= cfg_.gens.bera; ++g) {
            pra = step(std::move(pra), pra_ops(), evo.fold(g));
            emit(Level::Bera, evo.value(), g, pra.best_fitness());
        }
        return extract(pra);
    }

  private:
    // ---- result extraction ----

    AlgorithmResult extract(const Lattice<PraEntry>& pra) {
        const Cell<PraEntry>& best_pra = pra.at(pra.best_index());
        const Lattice<PafEntry>& paf = best_pra.genome.paf;
        const Cell<PafEntry>& best_paf = paf.at(paf.best_index());
        const Lattice<PpiEntry>& ppi = best_paf.genome.ppi;
        const Cell<PpiEntry>& best_ppi = ppi.at(ppi.best_index());

        AlgorithmResult res;
        res.algorithm = alg_;
        res.rule = best_pra.genome.rule;
        res.arch = best_paf.genome.arch;
        res.trained = best_ppi.genome.trained;
        res.best_fitness = best_ppi.fitness;
        const Architecture arch = architecture_of(res.arch);
        res.train_mse = mse_percent(arch, res.trained, split_.train);
        res.validation_mse = mse_percent(arch, res.trained, split_.validation);
        res.test_mse = mse_percent(arch, res.trained, split_.test);

        res.stats.trainings = trainings_.load();
        res.stats.initial_evaluations = initial_evaluations_.load();
        res.stats.ppi_children = ppi_children_.load();
        res.stats.ppi_generations = ppi_generations_.load();
        res.stats.paf_children = paf_children_.load();
        res.stats.pra_children = pra_children_.load();
        res.stats.rebind_cells = rebind_cells_.load();
        res.stats.rule_rebase_cells = rule_rebase_cells_.load();
        res.stats.uniqueness_perturbations = uniqueness_perturbations_.load();
        res.stats.divergences = divergences_.load();

        std::sort(trajectory_.begin(), trajectory_.end(),
                  [](const ProgressEvent& a, const ProgressEvent& b) {
                      return a.run_id != b.run_id ? a.run_id < b.run_id
                                                  : a.generation < b.generation;
                  });
        res.trajectory = std::move(trajectory_);
        return res;
    }

    void emit(Level level, std::uint64_t run_id, int generation, double best) {
        const ProgressEvent event{alg_, level, run_id, generation, best};
        std::lock_guard<std::mutex> lock(emit_mutex_);
        trajectory_.push_back(event);
        if (sink_) sink_(event);
    }

    const SearchConfig& cfg_;
    const DataSplit& split_;
    LearnAlg alg_;
    const ProgressSink& sink_;
    int pra_side_, paf_side_, ppi_side_;
    int input_dim_, output_dim_;
    RngKey root_;

    std::atomic<std::uint64_t> trainings_{0};
    std::atomic<std::uint64_t> initial_evaluations_{0};
    std::atomic<std::uint64_t> ppi_children_{0};
    std::atomic<std::uint64_t> ppi_generations_{0};
    std::atomic<std::uint64_t> paf_children_{0};
    std::atomic<std::uint64_t> pra_children_{0};
    std::atomic<std::uint64_t> rebind_cells_{0};
    std::atomic<std::uint64_t> rule_rebase_cells_{0};
    std::atomic<std::uint64_t> uniqueness_perturbations_{0};
    std::atomic<std::uint64_t> divergences_{0};

    std::mutex emit_mutex_;
    std::vector<ProgressEvent> trajectory_;
};

AlgorithmResult Engine::run() { return run_impl(); }

}  // namespace

SearchResult run_search(const SearchConfig& cfg, const DataSplit& split,
                        const ProgressSink& sink) {
    validate_search_config(cfg);
    if (split.train.x.rows() == 0 || split.validation.x.rows() == 0 ||
        split.test.x.rows() == 0)
        throw std::invalid_argument("run_search: empty data split part");
    if (split.train.x.cols() != split.validation.x.cols() ||
        split.train.x.cols() != split.test.x.cols())
        throw std::invalid_argument("run_search: inconsistent feature widths");
    if (split.train.t.cols() != split.validation.t.cols() ||
        split.train.t.cols() != split.test.t.cols())
        throw std::invalid_argument("run_search: inconsistent target widths");

    SearchResult result;
    for (const LearnAlg alg : cfg.algorithms) {
        Engine engine(cfg, split, alg, sink);
        result.algorithms.push_back(engine.run());
    }
    return result;
}

}  // namespace cgann
