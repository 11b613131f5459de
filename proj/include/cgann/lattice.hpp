#pragma once

#include <array>
#include <cstddef>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cgann/replacement.hpp"
#include "cgann/rng.hpp"

namespace cgann {

// Square toroidal grid geometry. Population size is always side*side.
struct GridDims {
    int side = 0;
};

inline void validate_dims(const GridDims& dims) {
    if (dims.side < 2) throw std::invalid_argument("grid side must be >= 2");
}

struct Coord {
    int row = 0;
    int col = 0;
    bool operator==(const Coord&) const = default;
};

enum class NeighborhoodKind { News4, Moore8, Linear5 };

const char* to_string(NeighborhoodKind kind);
NeighborhoodKind neighborhood_from_string(const std::string& name);

struct NeighborhoodSpec {
    NeighborhoodKind kind = NeighborhoodKind::News4;
};

inline int neighbor_count(NeighborhoodKind kind) {
    return kind == NeighborhoodKind::Moore8 ? 8 : 4;
}

// Euclidean-style modulo into [0, side) on both axes.
inline Coord wrap(Coord c, const GridDims& dims) {
    const int s = dims.side;
    int r = c.row % s;
    int q = c.col % s;
    if (r < 0) r += s;
    if (q < 0) q += s;
    return {r, q};
}

// Shortest grid-walk distance on the torus: per axis min(|d|, side - |d|).
inline int manhattan_distance(Coord a, Coord b, const GridDims& dims) {
    const int s = dims.side;
    a = wrap(a, dims);
    b = wrap(b, dims);
    int dr = a.row > b.row ? a.row - b.row : b.row - a.row;
    int dc = a.col > b.col ? a.col - b.col : b.col - a.col;
    if (s - dr < dr) dr = s - dr;
    if (s - dc < dc) dc = s - dc;
    return dr + dc;
}

// Radius-1 neighborhoods, center excluded. Order is fixed: N, S, E, W and,
// for Moore8, then NW, NE, SW, SE. Linear5 is the axial cross, so with the
// center excluded it yields the same four cells as News4. On a side-2 grid
// opposite offsets wrap onto the same cell; the list still has the nominal
// length and callers treat it as a pool drawn with replacement.
inline std::vector<Coord> neighbors(Coord c, const NeighborhoodSpec& spec, const GridDims& dims) {
    static constexpr std::array<Coord, 8> offsets = {{
        {-1, 0}, {1, 0}, {0, 1}, {0, -1},      // N S E W
        {-1, -1}, {-1, 1}, {1, -1}, {1, 1},    // NW NE SW SE
    }};
    const int n = neighbor_count(spec.kind);
    std::vector<Coord> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i)
        out.push_back(wrap({c.row + offsets[i].row, c.col + offsets[i].col}, dims));
    return out;
}

// Cellular-automaton population container: every cell occupied, fitness
// cached next to the genome, generation counter advanced by the schedulers.
template <class G>
class Lattice {
  public:
    Lattice(GridDims dims, std::vector<Cell<G>> cells) : dims_(dims), cells_(std::move(cells)) {
        validate_dims(dims_);
        if (cells_.size() != size())
            throw std::invalid_argument("lattice: expected " + std::to_string(size()) +
                                        " cells, got " + std::to_string(cells_.size()));
    }

    template <class Gen>  // Gen: (Coord) -> Cell<G>
    Lattice(GridDims dims, Gen&& gen) : dims_(dims) {
        validate_dims(dims_);
        cells_.reserve(size());
        for (int r = 0; r < dims_.side; ++r)
            for (int c = 0; c < dims_.side; ++c) cells_.push_back(gen(Coord{r, c}));
    }

    const GridDims& dims() const { return dims_; }
    int side() const { return dims_.side; }
    std::size_t size() const { return static_cast<std::size_t>(dims_.side) * dims_.side; }
    long generation() const { return generation_; }
    void set_generation(long g) { generation_ = g; }

    std::size_t index_of(Coord c) const {
        return static_cast<std::size_t>(c.row) * dims_.side + c.col;
    }
    Coord coord_of(std::size_t idx) const {
        return {static_cast<int>(idx) / dims_.side, static_cast<int>(idx) % dims_.side};
    }

    Cell<G>& at(Coord c) { return cells_[index_of(c)]; }
    const Cell<G>& at(Coord c) const { return cells_[index_of(c)]; }
    Cell<G>& at(std::size_t idx) { return cells_[idx]; }
    const Cell<G>& at(std::size_t idx) const { return cells_[idx]; }

    const std::vector<Cell<G>>& cells() const { return cells_; }

    double best_fitness() const {
        double best = cells_.front().fitness;
        for (const auto& cell : cells_)
            if (cell.fitness < best) best = cell.fitness;
        return best;
    }

    std::size_t best_index() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < cells_.size(); ++i)
            if (cells_[i].fitness < cells_[best].fitness) best = i;
        return best;
    }

  private:
    GridDims dims_;
    std::vector<Cell<G>> cells_;
    long generation_ = 0;
};

enum class AsyncPolicy { LineSweep, UniformChoice };

namespace detail {

[[noreturn]] inline void rethrow_with_coord(Coord c, const std::exception& e) {
    throw std::runtime_error("cell (" + std::to_string(c.row) + "," + std::to_string(c.col) +
                             "): " + e.what());
}

}  // namespace detail

// Synchronous generation: every cell of the frozen source
// grid is visited, its candidate children are produced by `ops`, and the
// elitist winner lands in a shadow grid that replaces the source at the
// end. Cell updates are independent; with threads > 1 they run in parallel
// and the result is bitwise identical to the serial order because each cell
// draws only from its own key-derived stream.
//
// CellOps signature: (const Lattice<G>&, Coord, RngKey) -> std::vector<Cell<G>>
// returning the evaluated candidates for that cell.
template <class G, class CellOps>
Lattice<G> synchronous_generation(const Lattice<G>& lat, CellOps&& ops, RngKey key,
                                  int threads = 1) {
    const std::size_t n = lat.size();
    std::vector<Cell<G>> next(lat.cells());
    std::exception_ptr failure = nullptr;

    auto update_one = [&](std::size_t i) {
        const Coord c = lat.coord_of(i);
        try {
            std::vector<Cell<G>> candidates = ops(lat, c, key.fold(i));
            const long sel = replacer_select(lat.at(i), candidates);
            if (sel >= 0) next[i] = std::move(candidates[static_cast<std::size_t>(sel)]);
        } catch (const std::exception& e) {
            detail::rethrow_with_coord(c, e);
        }
    };

#ifdef _OPENMP
    if (threads > 1) {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            if (failure) continue;
            try {
                update_one(static_cast<std::size_t>(i));
            } catch (...) {
#pragma omp critical
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        Lattice<G> out(lat.dims(), std::move(next));
        out.set_generation(lat.generation() + 1);
        return out;
    }
#endif
    (void)failure;
    for (std::size_t i = 0; i < n; ++i) update_one(i);
    Lattice<G> out(lat.dims(), std::move(next));
    out.set_generation(lat.generation() + 1);
    return out;
}

// Asynchronous generation: cells are updated in place, so an
// improvement is immediately visible to later visits. LineSweep walks the
// grid in row-major order; UniformChoice draws side*side cells uniformly
// with replacement. Inherently sequential.
template <class G, class CellOps>
Lattice<G> asynchronous_generation(Lattice<G> lat, CellOps&& ops, AsyncPolicy policy,
                                   RngKey key) {
    const std::size_t n = lat.size();
    RngStream draw = key.fold(0).stream();
    for (std::size_t visit = 0; visit < n; ++visit) {
        const std::size_t i =
            policy == AsyncPolicy::LineSweep ? visit : draw.index(n);
        const Coord c = lat.coord_of(i);
        try {
            std::vector<Cell<G>> candidates = ops(lat, c, key.fold(1 + visit));
            const long sel = replacer_select(lat.at(i), candidates);
            if (sel >= 0) lat.at(i) = std::move(candidates[static_cast<std::size_t>(sel)]);
        } catch (const std::exception& e) {
            detail::rethrow_with_coord(c, e);
        }
    }
    lat.set_generation(lat.generation() + 1);
    return lat;
}

}  // namespace cgann
