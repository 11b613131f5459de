#pragma once

#include <cstddef>
#include <vector>

namespace cgann {

// One grid position: a genome plus its cached fitness (MSE-based, minimized).
template <class G>
struct Cell {
    G genome;
    double fitness = 0.0;
};

// Index of the winning candidate under the elitist rule, or -1 when the
// incumbent survives. The best candidate wins only on strict improvement;
// ties keep the incumbent. Among equally good candidates the first wins.
template <class G>
long replacer_select(const Cell<G>& incumbent, const std::vector<Cell<G>>& candidates) {
    long winner = -1;
    double best = incumbent.fitness;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i].fitness < best) {
            best = candidates[i].fitness;
            winner = static_cast<long>(i);
        }
    }
    return winner;
}

// Elitist survivor rule: the best candidate displaces the incumbent only on
// strict improvement; an empty candidate list keeps the incumbent.
template <class G>
Cell<G> replacer(const Cell<G>& incumbent, const std::vector<Cell<G>>& candidates) {
    const long sel = replacer_select(incumbent, candidates);
    return sel < 0 ? incumbent : candidates[static_cast<std::size_t>(sel)];
}

}  // namespace cgann
