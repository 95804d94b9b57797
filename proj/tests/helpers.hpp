#pragma once

#include "rgas/kinetics.hpp"
#include "rgas/rng.hpp"
#include "rgas/tree.hpp"

#include <algorithm>
#include <vector>

namespace rgas::testing {

// Random marked tree with geometrically valid (approaching, non-grazing)
// collisions; marker count uniform on {0..max_n}.
inline CollisionTree random_tree(Rng& rng, int max_n, double horizon) {
    CollisionTree t;
    t.root.x = rng.box01();
    t.root.v = rng.gauss3(1.0);
    t.horizon = horizon;

    int n = int(rng.u01() * (max_n + 1));
    std::vector<double> times;
    times.reserve(n);
    for (int i = 0; i < n; ++i) times.push_back(rng.uniform(0.02 * horizon, horizon));
    std::sort(times.begin(), times.end());

    Vec3 v = t.root.v;
    for (double tc : times) {
        CollisionMarker m;
        m.t = tc;
        do {
            m.v_in = rng.gauss3(1.0);
            m.nu = rng.sphere();
        } while (dot(m.nu, v - m.v_in) <= 0.05);
        t.markers.push_back(m);
        v = collide(v, m.v_in, m.nu).first;
    }
    return t;
}

}  // namespace rgas::testing
