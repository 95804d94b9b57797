#pragma once

#include <cstdint>
#include <vector>

#include "rgas/geometry.hpp"

namespace rgas {

// Midpoint lattice on [-R,R]^3, node (i,j,k) at (-R + (i+1/2)h, ...) with
// h = 2R/n. The node set is symmetric under v -> -v and under coordinate
// permutations. With ball_mask set, only nodes with |v| <= R are kept; the
// cube corners carry no Maxwellian mass worth resolving and they dominate
// the stiffness of the collision operator.
struct VelocityGrid {
    double R = 6.0;
    int n = 15;
    double h = 0.8;
    bool ball_mask = true;
    std::vector<std::int32_t> slot_of;  // flat index -> active slot, -1 if masked
    std::vector<std::int32_t> flat_of;  // active slot -> flat index

    static VelocityGrid make(double R, int n, bool ball_mask = true);

    int flat(int i, int j, int k) const { return (i * n + j) * n + k; }
    double axis(int i) const { return -R + (i + 0.5) * h; }
    Vec3 node_of_flat(int f) const {
        return {axis(f / (n * n)), axis((f / n) % n), axis(f % n)};
    }
    int size() const { return int(flat_of.size()); }
    Vec3 node(int slot) const { return node_of_flat(flat_of[slot]); }
    double cell_volume() const { return h * h * h; }

    // Exact per-cell Gaussian masses for M_beta (products of 1D erf
    // differences), normalised to sum to 1 over the active cells.
    std::vector<double> maxwell_cell_masses(double beta) const;
    // Gaussian mass not covered by the active cells (before normalisation).
    double maxwell_tail_mass(double beta) const;

    // Trilinear deposit of a point velocity onto the surrounding nodes.
    // Writes up to 8 (slot, weight) pairs and returns the count; weight
    // aimed at masked or out-of-range nodes is dropped.
    int deposit(const Vec3& v, std::int32_t* slots, double* w) const;

    // Active slot of the cell containing v, or -1 (outside the box or masked).
    std::int32_t cell_of(const Vec3& v) const;
};

// Quotient of the active nodes by the 8-element dihedral group acting on the
// (y,z) index pair: sign flips i -> n-1-i on either axis plus the swap. Any
// solve whose data is invariant under it (x1-aligned Fourier modes, radial
// initial data, the chi_1 cell problem) can run in orbit space.
struct QuotientGrid {
    VelocityGrid grid;
    std::vector<std::int32_t> orbit_of;    // active slot -> orbit id
    std::vector<std::int32_t> rep_slot;    // orbit id -> representative slot
    std::vector<std::int32_t> orbit_size;  // orbit id -> member count

    static QuotientGrid make(VelocityGrid g);

    int orbits() const { return int(rep_slot.size()); }
    Vec3 rep_node(int o) const { return grid.node(rep_slot[o]); }

    // expand an orbit vector to a full active-slot vector
    std::vector<double> expand(const std::vector<double>& q) const;
    // restrict an invariant active-slot vector to orbit space (takes the
    // representative's value; callers assert invariance in tests)
    std::vector<double> restrict_invariant(const std::vector<double>& full) const;
};

}  // namespace rgas
