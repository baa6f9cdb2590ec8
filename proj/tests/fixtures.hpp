#pragma once

#include <array>
#include <string>
#include <vector>

#include "figlearn/geometry.hpp"
#include "figlearn/rng.hpp"

namespace fixtures {

using figlearn::geom::Half;
using figlearn::geom::Primitive;
using figlearn::geom::Shape;
using figlearn::geom::TriCell;

inline TriCell tc(int x, int y, Half h) { return TriCell{x, y, h}; }

inline Shape shape(std::vector<TriCell> cells) {
    return figlearn::geom::canonicalize(std::move(cells));
}

// Four-triangle primitives used across the tests.
inline Primitive bar() {
    return {"bar", shape({tc(0, 0, Half::NW), tc(0, 0, Half::SE),
                          tc(1, 0, Half::NW), tc(1, 0, Half::SE)})};
}

// 4-fold rotationally symmetric.
inline Primitive diamond() {
    return {"diamond", shape({tc(0, 0, Half::NE), tc(1, 0, Half::NW),
                              tc(0, 1, Half::SE), tc(1, 1, Half::SW)})};
}

inline Primitive bigtri() {
    return {"bigtri", shape({tc(0, 0, Half::NW), tc(0, 0, Half::SE),
                             tc(1, 0, Half::SW), tc(0, 1, Half::SW)})};
}

inline Primitive lean() {
    return {"lean", shape({tc(0, 0, Half::SE), tc(1, 0, Half::NW),
                           tc(1, 0, Half::SE), tc(2, 0, Half::NW)})};
}

inline Primitive wedge() {
    return {"wedge", shape({tc(0, 0, Half::NW), tc(0, 0, Half::SE),
                            tc(1, 0, Half::SW), tc(0, 1, Half::SE)})};
}

inline Primitive stairs() {
    return {"stairs", shape({tc(0, 0, Half::SE), tc(1, 0, Half::NW),
                             tc(1, 1, Half::SE), tc(2, 1, Half::NW)})};
}

inline std::array<Primitive, 4> quad_a() {
    return {bar(), diamond(), bigtri(), lean()};
}

inline std::array<Primitive, 4> quad_b() {
    return {bar(), bigtri(), wedge(), stairs()};
}

// Random edge-connected shape grown by accretion; used for property tests.
inline Shape random_shape(figlearn::Rng& rng, int n_cells) {
    std::vector<TriCell> cells;
    cells.push_back(tc(0, 0, static_cast<Half>(rng.uniform_int(4))));
    int guard = 0;
    while (static_cast<int>(cells.size()) < n_cells && guard < 10000) {
        ++guard;
        const TriCell& seed = cells[rng.uniform_int(cells.size())];
        TriCell cand{seed.x + static_cast<int>(rng.uniform_int(3)) - 1,
                     seed.y + static_cast<int>(rng.uniform_int(3)) - 1,
                     static_cast<Half>(rng.uniform_int(4))};
        bool ok = true;
        bool touches = false;
        for (const TriCell& c : cells) {
            if (figlearn::geom::cells_overlap(c, cand)) {
                ok = false;
                break;
            }
            if (figlearn::geom::cells_share_edge(c, cand)) touches = true;
        }
        if (ok && touches) cells.push_back(cand);
    }
    return figlearn::geom::canonicalize(std::move(cells));
}

} // namespace fixtures
