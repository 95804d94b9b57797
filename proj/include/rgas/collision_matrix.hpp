#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rgas/quadrature.hpp"
#include "rgas/velocity_grid.hpp"

namespace rgas {

// Discrete linear Boltzmann collision operator for a Maxwellian background,
// acting on h = f / M_beta. Assembled as a nonnegative symmetric flow matrix
// S between cells (quadrature of M(v) M(vbar) [(v - vbar).nu]_+ with the
// post-collision velocity deposited trilinearly), then
//
//     (L h)_o = (1/mu_o) sum_o' S(o,o') (h_o - h_o').
//
// Symmetrising S is what the continuous detailed balance says it should be;
// it buys three structural facts at once: L annihilates constants, L is
// self-adjoint and positive semidefinite in the mu-weighted inner product,
// and the Maxwellian cell masses mu are exactly stationary. A final
// symmetric rescaling pins every row sum to mu_o times the closed-form
// collision rate, so the loss part of L is exactly multiplication by
// lambda(v) and constants are annihilated to rounding, not just to
// quadrature accuracy.
struct CollisionOperator {
    QuotientGrid q;
    double beta = 1.0;
    std::vector<double> mu;   // orbit masses, sum 1
    Eigen::MatrixXd S;        // symmetric, nonnegative; diagonal = flow inside the orbit
    std::vector<double> d;    // row sums of S, equal to mu_o lambda(v_o)
    double lambda_max = 0;    // upper bound on the spectrum of L (2 max lambda)

    int size() const { return int(mu.size()); }
    void apply(const double* h, double* out) const;
    std::vector<double> apply(const std::vector<double>& h) const;
    // loss rate at an orbit; equals the closed-form collision_rate at the node
    double loss_rate(int o) const { return d[o] / mu[o]; }
    double dirichlet_form(const std::vector<double>& phi) const;
};

// Same operator without the dihedral reduction, indexed by active slots.
// Quadratically more expensive to build; used on small grids to validate the
// quotient assembly and to solve problems without the (y,z) symmetry.
struct FullCollisionOperator {
    VelocityGrid grid;
    double beta = 1.0;
    std::vector<double> mu;
    Eigen::MatrixXd S;
    std::vector<double> d;
    double lambda_max = 0;

    int size() const { return int(mu.size()); }
    void apply(const double* h, double* out) const;
    std::vector<double> apply(const std::vector<double>& h) const;
    double loss_rate(int i) const { return d[i] / mu[i]; }
};

CollisionOperator build_collision_operator(double beta, const VelocityGrid& grid,
                                           const SphereDesign& design = lebedev26());
FullCollisionOperator build_full_collision_operator(double beta, const VelocityGrid& grid,
                                                    const SphereDesign& design = lebedev26());

}  // namespace rgas
