#pragma once

#include <complex>
#include <vector>

#include "rgas/collision_matrix.hpp"
#include "rgas/density.hpp"

namespace rgas {

// Box masses on nx uniform intervals along x1 times the active cells of a
// velocity lattice, plus one overflow bin per box for mass outside the
// lattice. Common currency between the deterministic solver, the jump-process
// sampler, and the particle runs; l1_distance compares two of them.
struct PhaseHistogram {
    int nx = 1;
    VelocityGrid grid;
    std::vector<double> mass;  // nx rows of (active cells + 1), overflow last

    static PhaseHistogram zeros(int nx, VelocityGrid grid);

    int row() const { return grid.size() + 1; }
    double& at(int box, int slot) { return mass[std::size_t(box) * row() + slot]; }
    double at(int box, int slot) const { return mass[std::size_t(box) * row() + slot]; }
    // bin a sample; the x coordinate is wrapped to [0,1), velocities outside
    // the lattice go to the overflow bin
    void add(double x1, const Vec3& v, double weight);
    double total() const;
};

// sum of absolute box-mass differences (discrete L1; equals 2x total
// variation for probability masses); throws on mismatched shapes
double l1_distance(const PhaseHistogram& a, const PhaseHistogram& b);

// Solution of df/dt + v.grad_x f = c (gain - lambda f) on the torus for
// x1-aligned Fourier modes. State per mode k is h = f_k / mu over dihedral
// orbits of the velocity lattice; transport is the exact phase multiplier,
// collisions are Heun steps of the symmetric operator, composed by Strang
// splitting. Modes never couple, so the mode list is just whatever the
// initial density carries.
struct KineticSolution {
    CollisionOperator op;       // quotient grid, cell masses, rate bound
    std::vector<int> modes;     // k >= 0 along x1; negative modes by conjugacy
    std::vector<double> times;
    // h[time][mode][orbit]
    std::vector<std::vector<std::vector<std::complex<double>>>> h;

    // (x1, v) box masses at an output time
    PhaseHistogram histogram(std::size_t time_index, int nx) const;
};

// rho0_modes[k] is the k-th Fourier coefficient of the initial spatial
// density (index 0 = total mass, must be 1); the initial state is
// f(0,x,v) = rho0(x) f0(v). g0 must be Maxwellian (the collision operator's
// symmetry rests on it). Output horizon is times.back(); requires
// dt * c * max collision rate < 0.5.
KineticSolution grid_boltzmann_solve(const Density& f0, const Density& g0, double c,
                                     const VelocityGrid& grid,
                                     const std::vector<std::complex<double>>& rho0_modes,
                                     double dt, std::vector<double> times);

}  // namespace rgas
