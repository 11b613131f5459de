#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <vector>

#include "cgann/lattice.hpp"

using namespace cgann;

namespace {

// Independent oracle: breadth-first shortest grid walk on the torus.
int bfs_torus_distance(Coord a, Coord b, GridDims dims) {
    const int s = dims.side;
    std::vector<int> dist(static_cast<std::size_t>(s) * s, -1);
    std::deque<Coord> queue{wrap(a, dims)};
    dist[static_cast<std::size_t>(queue.front().row) * s + queue.front().col] = 0;
    const Coord target = wrap(b, dims);
    while (!queue.empty()) {
        const Coord c = queue.front();
        queue.pop_front();
        const int d = dist[static_cast<std::size_t>(c.row) * s + c.col];
        if (c == target) return d;
        for (const Coord step : {Coord{-1, 0}, Coord{1, 0}, Coord{0, -1}, Coord{0, 1}}) {
            const Coord n = wrap({c.row + step.row, c.col + step.col}, dims);
            int& slot = dist[static_cast<std::size_t>(n.row) * s + n.col];
            if (slot < 0) {
                slot = d + 1;
                queue.push_back(n);
            }
        }
    }
    return -1;
}

// toy cell ops for the scheduler tests: genome is a plain double
using ToyCell = Cell<double>;
using ToyLattice = Lattice<double>;

ToyLattice uniform_lattice(int side, double value) {
    return ToyLattice(GridDims{side}, [&](Coord) { return ToyCell{value, value}; });
}

}  // namespace

TEST_CASE("wrap reduces coordinates modulo the grid side") {
    CHECK(wrap({-1, 5}, GridDims{5}) == Coord{4, 0});
    CHECK(wrap({2, 3}, GridDims{5}) == Coord{2, 3});
    CHECK(wrap({7, -3}, GridDims{4}) == Coord{3, 1});
    CHECK(wrap({-7, -13}, GridDims{4}) == Coord{1, 3});
}

TEST_CASE("toroidal manhattan distance") {
    // on a grid wide enough that no wrap helps, the plain |dx|+|dy| sum applies
    CHECK(manhattan_distance({1, 2}, {4, 6}, GridDims{9}) == 7);
    CHECK(manhattan_distance({0, 0}, {4, 4}, GridDims{5}) == 2);
    CHECK(manhattan_distance({1, 1}, {3, 4}, GridDims{5}) == 4);

    SUBCASE("matches a breadth-first shortest walk on every pair, sides 2..6") {
        for (int side = 2; side <= 6; ++side) {
            const GridDims dims{side};
            for (int r1 = 0; r1 < side; ++r1)
                for (int c1 = 0; c1 < side; ++c1)
                    for (int r2 = 0; r2 < side; ++r2)
                        for (int c2 = 0; c2 < side; ++c2) {
                            const Coord a{r1, c1}, b{r2, c2};
                            CHECK(manhattan_distance(a, b, dims) ==
                                  bfs_torus_distance(a, b, dims));
                        }
        }
    }
}

TEST_CASE("neighbor lists") {
    const GridDims g3{3};

    SUBCASE("news4 order is N, S, E, W with wrapping") {
        const std::vector<Coord> nb = neighbors({0, 0}, {NeighborhoodKind::News4}, g3);
        CHECK(nb == std::vector<Coord>{{2, 0}, {1, 0}, {0, 1}, {0, 2}});
    }

    SUBCASE("linear5 excludes the center and equals the axial cross") {
        CHECK(neighbors({1, 2}, {NeighborhoodKind::Linear5}, g3) ==
              neighbors({1, 2}, {NeighborhoodKind::News4}, g3));
    }

    SUBCASE("moore8 yields 8 distinct cells within toroidal distance 2") {
        for (int side = 3; side <= 6; ++side) {
            const GridDims dims{side};
            for (int r = 0; r < side; ++r)
                for (int c = 0; c < side; ++c) {
                    const std::vector<Coord> nb =
                        neighbors({r, c}, {NeighborhoodKind::Moore8}, dims);
                    CHECK(nb.size() == 8);
                    std::set<std::pair<int, int>> uniq;
                    for (const Coord n : nb) {
                        uniq.insert({n.row, n.col});
                        CHECK(manhattan_distance({r, c}, n, dims) <= 2);
                        CHECK(!(n == Coord{r, c}));
                    }
                    CHECK(uniq.size() == 8);
                }
        }
    }

    SUBCASE("news4 neighbors sit at toroidal distance exactly 1") {
        for (const Coord n : neighbors({1, 1}, {NeighborhoodKind::News4}, GridDims{5}))
            CHECK(manhattan_distance({1, 1}, n, GridDims{5}) == 1);
    }

    SUBCASE("torus regularity: constant neighbor count, no boundary effects") {
        for (int side = 2; side <= 6; ++side)
            for (const NeighborhoodKind kind :
                 {NeighborhoodKind::News4, NeighborhoodKind::Moore8, NeighborhoodKind::Linear5})
                for (int r = 0; r < side; ++r)
                    for (int c = 0; c < side; ++c)
                        CHECK(static_cast<int>(
                                  neighbors({r, c}, {kind}, GridDims{side}).size()) ==
                              neighbor_count(kind));
    }

    SUBCASE("symmetry: b in N(a) iff a in N(b)") {
        for (int side = 2; side <= 6; ++side)
            for (const NeighborhoodKind kind :
                 {NeighborhoodKind::News4, NeighborhoodKind::Moore8}) {
                const GridDims dims{side};
                auto contains = [&](Coord center, Coord probe) {
                    const auto nb = neighbors(center, {kind}, dims);
                    return std::find(nb.begin(), nb.end(), probe) != nb.end();
                };
                for (int r1 = 0; r1 < side; ++r1)
                    for (int c1 = 0; c1 < side; ++c1)
                        for (int r2 = 0; r2 < side; ++r2)
                            for (int c2 = 0; c2 < side; ++c2)
                                CHECK(contains({r1, c1}, {r2, c2}) ==
                                      contains({r2, c2}, {r1, c1}));
            }
    }
}

TEST_CASE("replacer keeps the incumbent unless a candidate strictly improves") {
    const ToyCell incumbent{1.0, 0.30};
    CHECK(replacer(incumbent, {{2.0, 0.20}, {3.0, 0.25}}).fitness == doctest::Approx(0.20));
    CHECK(replacer(incumbent, {{2.0, 0.30}}).genome == 1.0);  // tie keeps incumbent
    CHECK(replacer(ToyCell{1.0, 0.10}, {{2.0, 0.5}, {3.0, 0.9}}).genome == 1.0);
    CHECK(replacer(incumbent, {}).genome == 1.0);
}

TEST_CASE("synchronous generation") {
    SUBCASE("an optimal grid is never modified") {
        const ToyLattice lat = uniform_lattice(3, 0.0);
        const ToyLattice next = synchronous_generation(
            lat,
            [](const ToyLattice&, Coord, RngKey key) {
                RngStream rng = key.stream();
                return std::vector<ToyCell>{{rng.canonical(), rng.uniform(0.5, 1.0)}};
            },
            RngKey::root(1));
        for (std::size_t i = 0; i < lat.size(); ++i) {
            CHECK(next.at(i).genome == lat.at(i).genome);
            CHECK(next.at(i).fitness == lat.at(i).fitness);
        }
        CHECK(next.generation() == lat.generation() + 1);
    }

    SUBCASE("a strictly better child everywhere replaces every cell at once") {
        const ToyLattice lat = uniform_lattice(4, 5.0);
        const ToyLattice next = synchronous_generation(
            lat,
            [](const ToyLattice&, Coord, RngKey) { return std::vector<ToyCell>{{9.0, 1.0}}; },
            RngKey::root(2));
        for (std::size_t i = 0; i < next.size(); ++i) {
            CHECK(next.at(i).genome == 9.0);
            CHECK(next.at(i).fitness == 1.0);
        }
    }

    SUBCASE("updates read the frozen source grid, not fresh values") {
        // only (0,0) can improve; under synchronous update (0,1) must not see it
        ToyLattice lat = uniform_lattice(2, 1.0);
        auto ops = [](const ToyLattice& src, Coord c, RngKey) -> std::vector<ToyCell> {
            if (c == Coord{0, 0}) return {{0.0, 0.0}};
            const Coord west = wrap({c.row, c.col - 1}, src.dims());
            return {{src.at(west).genome, src.at(west).fitness}};
        };
        const ToyLattice next = synchronous_generation(lat, ops, RngKey::root(3));
        CHECK(next.at(Coord{0, 0}).fitness == 0.0);
        CHECK(next.at(Coord{0, 1}).fitness == 1.0);  // unchanged this generation
    }

    SUBCASE("same seed, two runs, identical grids; serial equals parallel") {
        auto run = [&](int threads) {
            ToyLattice lat = uniform_lattice(5, 10.0);
            for (int g = 0; g < 4; ++g)
                lat = synchronous_generation(
                    lat,
                    [](const ToyLattice& src, Coord c, RngKey key) {
                        RngStream rng = key.stream();
                        std::vector<ToyCell> cands;
                        for (const Coord n :
                             neighbors(c, {NeighborhoodKind::News4}, src.dims())) {
                            const double v =
                                src.at(n).genome * rng.uniform(0.5, 1.5) - rng.canonical();
                            cands.push_back({v, v < 0 ? -v : v});
                        }
                        return cands;
                    },
                    RngKey::root(77).fold(g), threads);
            return lat;
        };
        const ToyLattice a = run(1);
        const ToyLattice b = run(1);
        const ToyLattice c = run(4);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a.at(i).genome == b.at(i).genome);
            CHECK(a.at(i).genome == c.at(i).genome);  // bitwise, any thread count
            CHECK(a.at(i).fitness == c.at(i).fitness);
        }
    }

    SUBCASE("elitist monotonicity under arbitrary candidates") {
        ToyLattice lat(GridDims{4}, [](Coord c) {
            return ToyCell{0.0, 1.0 + 0.1 * (c.row * 4 + c.col)};
        });
        for (int g = 0; g < 6; ++g) {
            const ToyLattice next = synchronous_generation(
                lat,
                [](const ToyLattice&, Coord, RngKey key) {
                    RngStream rng = key.stream();
                    std::vector<ToyCell> cands;
                    for (int k = 0; k < 3; ++k) {
                        const double f = rng.uniform(0.0, 3.0);
                        cands.push_back({f, f});
                    }
                    return cands;
                },
                RngKey::root(9).fold(g));
            for (std::size_t i = 0; i < lat.size(); ++i)
                CHECK(next.at(i).fitness <= lat.at(i).fitness);
            lat = next;
        }
    }

    SUBCASE("a failing cell aborts the generation naming the coordinate") {
        const ToyLattice lat = uniform_lattice(3, 1.0);
        try {
            synchronous_generation(
                lat,
                [](const ToyLattice&, Coord c, RngKey) -> std::vector<ToyCell> {
                    if (c == Coord{1, 2}) throw std::runtime_error("evaluation failed");
                    return {};
                },
                RngKey::root(4));
            FAIL("expected an exception");
        } catch (const std::runtime_error& e) {
            CHECK(std::string(e.what()).find("(1,2)") != std::string::npos);
        }
    }
}

TEST_CASE("asynchronous generation") {
    SUBCASE("line sweep visits cells in row-major order") {
        ToyLattice lat = uniform_lattice(2, 1.0);
        std::vector<Coord> visits;
        asynchronous_generation(
            lat,
            [&](const ToyLattice&, Coord c, RngKey) {
                visits.push_back(c);
                return std::vector<ToyCell>{};
            },
            AsyncPolicy::LineSweep, RngKey::root(5));
        CHECK(visits == std::vector<Coord>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    }

    SUBCASE("uniform choice performs exactly side*side update events") {
        ToyLattice lat = uniform_lattice(4, 1.0);
        int events = 0;
        asynchronous_generation(
            lat,
            [&](const ToyLattice&, Coord, RngKey) {
                ++events;
                return std::vector<ToyCell>{};
            },
            AsyncPolicy::UniformChoice, RngKey::root(6));
        CHECK(events == 16);
    }

    SUBCASE("an improvement is visible to later visits in the same generation") {
        ToyLattice lat = uniform_lattice(2, 1.0);
        auto ops = [](const ToyLattice& src, Coord c, RngKey) -> std::vector<ToyCell> {
            if (c == Coord{0, 0}) return {{0.0, 0.0}};
            const Coord west = wrap({c.row, c.col - 1}, src.dims());
            return {{src.at(west).genome, src.at(west).fitness}};
        };
        const ToyLattice next = asynchronous_generation(std::move(lat), ops,
                                                        AsyncPolicy::LineSweep, RngKey::root(7));
        CHECK(next.at(Coord{0, 0}).fitness == 0.0);
        CHECK(next.at(Coord{0, 1}).fitness == 0.0);  // saw the fresh (0,0)
    }

    SUBCASE("same seed reproduces the uniform-choice draw sequence") {
        auto run = [] {
            ToyLattice lat = uniform_lattice(3, 5.0);
            return asynchronous_generation(
                std::move(lat),
                [](const ToyLattice&, Coord, RngKey key) {
                    RngStream rng = key.stream();
                    const double f = rng.uniform(0.0, 10.0);
                    return std::vector<ToyCell>{{f, f}};
                },
                AsyncPolicy::UniformChoice, RngKey::root(8));
        };
        const ToyLattice a = run();
        const ToyLattice b = run();
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.at(i).genome == b.at(i).genome);
    }
}

TEST_CASE("lattice construction guards") {
    CHECK_THROWS(validate_dims(GridDims{1}));
    CHECK_THROWS(ToyLattice(GridDims{3}, std::vector<ToyCell>(8)));  // 8 != 9
    const ToyLattice lat = uniform_lattice(3, 2.0);
    CHECK(lat.size() == 9);
    CHECK(lat.best_fitness() == 2.0);
}
