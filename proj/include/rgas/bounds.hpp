#pragma once

#include <array>
#include <cstdint>

#include "rgas/density.hpp"
#include "rgas/kinetics.hpp"
#include "rgas/tree.hpp"

namespace rgas {

// Moment ceilings, as functions of time and collision rate factor c.
double energy_bound(const KineticConstants& k, double c, double t);
double momentum_bound(const KineticConstants& k, double c, double t);
double expected_collisions_bound(const KineticConstants& k, double c, double t);

// Everything needed to evaluate the bad-tree and total-error ceilings.
struct BoundInputs {
    double eps = 0, t = 0, T = 0, c = 1;
    KineticConstants consts;
    double M_eps = 0, V_eps = 0;  // collision-count and speed caps
    double eta = 0, delta = 0;
    double C = 1, C1 = 1, C2 = 1;  // uniform constants, config-exposed
    // The recollision ceiling appears in two variants differing by powers of
    // M_eps; default is the final-theorem display, the other is selectable.
    bool recollision_prop_form = false;
    void validate() const;
};

struct BadTreeBounds {
    double overlap = 0, recollision = 0, high_collision = 0, velocity = 0;
    double total() const { return overlap + recollision + high_collision + velocity; }
};

BadTreeBounds bad_tree_bounds(const BoundInputs& in);
double total_error_bound(const BoundInputs& in);

// Parameter choices that equalise the five leading error terms.
struct ScalingPlan {
    double eps = 0, alpha = 0, c = 1;
    double T = 0, M_eps = 0, V_eps = 0, eta = 0, delta = 0;
    double predicted_error = 0;
};

ScalingPlan plan_scaling(double eps, double alpha, double c);

// The five leading error monomials evaluated at a plan; equal for valid plans.
std::array<double, 5> balance_terms(const ScalingPlan& p);

// Discrepancy recursion rho^k = (1-eps)·rho^{k-1} + rho^0 + eps.
double rho_hat(double eps, int n, double rho0);
double rho_hat_closed(double eps, int n, double rho0);

// Rate functionals along the reconstructed tagged path (reporting values).
double tree_rate_sup(const CollisionTree& tree, const Density& g0);
double tree_C(const CollisionTree& tree, const Density& g0);
double tree_L(const CollisionTree& tree, const Density& g0);

// MC estimate of the background mass excluded by conditioning on a tree: the
// probability that a fresh background particle drawn from uniform x g0 meets
// the eps-tube of the tagged path within [0, t].
struct ExclusionMassEstimate {
    double mean = 0, se = 0;
    std::uint64_t points = 0;
};

ExclusionMassEstimate exclusion_mass(const CollisionTree& tree, double t, double eps,
                                     const Density& g0, std::uint64_t mc_points,
                                     std::uint64_t seed);

}  // namespace rgas
