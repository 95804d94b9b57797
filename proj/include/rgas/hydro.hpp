#pragma once

#include <complex>
#include <vector>

#include "rgas/boltzmann_grid.hpp"

namespace rgas {

// Diffusion parameter of the hydrodynamic limit: solve L chi_i = v_i on the
// mean-zero subspace and contract, kappa = (1/3) sum_i <v_i, chi_i>_mu.
struct KappaResult {
    double beta = 1.0;
    double kappa = 0.0;
    double residual = 0.0;     // worst mu-norm residual over the solves
    double tensor[3][3] = {};  // D_ij = <v_i, chi_j>_mu
    // true when all three cell problems were solved on the full lattice; on
    // large grids only chi_1 is solved (in the dihedral quotient) and the
    // tensor is filled by the cubic symmetry that the full-grid path verifies
    bool tensor_full = false;
    double tail_mass = 0.0;    // Gaussian mass outside the lattice
};

KappaResult compute_kappa(double beta, const VelocityGrid& grid);

// Solve L chi = rhs on the mean-zero subspace by conjugate gradients in the
// mu-weighted inner product (constants deflated from both sides). Returns
// the mu-norm residual; chi comes back mu-orthogonal to constants.
double solve_mean_zero(const CollisionOperator& op, const std::vector<double>& rhs,
                       std::vector<double>& chi);
double solve_mean_zero(const FullCollisionOperator& op, const std::vector<double>& rhs,
                       std::vector<double>& chi);

// rho(tau, x) on the torus with x1-aligned modes: coefficient k decays as
// exp(-kappa (2 pi k)^2 tau), nothing else moves. Spectral, so exact.
struct HeatSolution {
    std::vector<std::complex<double>> rho0;  // k = 0, 1, ...; negatives by conjugacy
    double kappa = 0.0;
    std::vector<double> times;

    std::complex<double> mode(std::size_t time_index, int k) const;
    // box masses of rho(tau, .) on nx uniform intervals
    std::vector<double> boxes(std::size_t time_index, int nx) const;
};

HeatSolution heat_solve(std::vector<std::complex<double>> rho0_modes, double kappa,
                        std::vector<double> times);

// L1 gap of the diffusive limit: || f(c tau, x, v) - rho(tau, x) M_beta(v) ||
// per output time, on a common (x1 box, velocity cell) evaluation grid.
// kinetic must have been run to time c*tau for each heat output tau.
struct DiffusiveComparison {
    std::vector<double> tau;
    std::vector<double> l1_gap;
    double velocity_tail_mass = 0.0;  // B_R truncation error, reported separately
};

DiffusiveComparison diffusive_compare(const KineticSolution& kinetic, const HeatSolution& heat,
                                      double beta, double c, int nx);

}  // namespace rgas
