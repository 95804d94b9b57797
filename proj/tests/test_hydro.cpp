#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "rgas/hydro.hpp"

using namespace rgas;

TEST_CASE("kappa: cell problems converge and the tensor is isotropic") {
    KappaResult r = compute_kappa(1.0, VelocityGrid::make(6.0, 12, true));
    CHECK(r.tensor_full);
    CHECK(r.residual < 1e-8);
    CHECK(r.kappa > 0.0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j) CHECK(std::fabs(r.tensor[i][j]) < 1e-6 * r.tensor[i][i]);
    // [TRIVIAL: cubic symmetry of lattice, mask, and kernel]
    CHECK(std::fabs(r.tensor[0][0] - r.tensor[1][1]) < 1e-4 * r.tensor[0][0]);
    CHECK(std::fabs(r.tensor[0][0] - r.tensor[2][2]) < 1e-4 * r.tensor[0][0]);
}

TEST_CASE("kappa: discrete problem rescales exactly in temperature") {
    // with R = 6/sqrt(beta) and the same n, the beta-lattice is the unit
    // lattice shrunk by sqrt(beta), cell masses match, and rates pick up
    // 1/sqrt(beta), so kappa(beta) = kappa(1)/sqrt(beta) to solver accuracy;
    // the spec's 2% window is for independently chosen grids
    KappaResult r1 = compute_kappa(1.0, VelocityGrid::make(6.0, 12, true));
    KappaResult r4 = compute_kappa(4.0, VelocityGrid::make(3.0, 12, true));
    CHECK(r4.kappa * std::sqrt(4.0) == doctest::Approx(r1.kappa * 1.0).epsilon(1e-8));
}

TEST_CASE("kappa: quotient chi_1 solve matches the full-grid tensor entry") {
    // same lattice through both routes: compute_kappa picks the full path at
    // this size, the quotient solve is redone here by hand
    VelocityGrid g = VelocityGrid::make(5.0, 11, true);
    KappaResult full = compute_kappa(1.0, g);
    REQUIRE(full.tensor_full);

    CollisionOperator op = build_collision_operator(1.0, g);
    std::vector<double> b(op.size()), chi;
    for (int o = 0; o < op.size(); ++o) b[o] = op.q.rep_node(o).x;
    double res = solve_mean_zero(op, b, chi);
    CHECK(res < 1e-8);
    double mean = 0, kq = 0;
    for (int o = 0; o < op.size(); ++o) mean += op.mu[o] * chi[o];
    CHECK(std::fabs(mean) < 1e-10);  // deflation holds
    for (int o = 0; o < op.size(); ++o) kq += op.mu[o] * b[o] * chi[o];
    CHECK(kq == doctest::Approx(full.tensor[0][0]).epsilon(1e-8));
}

TEST_CASE("heat solve: spectral decay, invariants, composition") {
    // rho0 = 1 + cos(2 pi x1): modes {1, 0.5}
    HeatSolution h = heat_solve({{1.0, 0.0}, {0.5, 0.0}}, 0.1, {0.0, 1.0});
    CHECK(h.mode(0, 1).real() == doctest::Approx(0.5));
    // [PAPER example: amplitude 0.5 e^{-0.1 (2 pi)^2} = 0.5 * 0.019296...]
    CHECK(h.mode(1, 1).real() == doctest::Approx(0.5 * std::exp(-0.1 * 4.0 * M_PI * M_PI)));
    CHECK(h.mode(1, 1).real() == doctest::Approx(0.5 * 0.019296).epsilon(1e-4));
    // mass mode untouched
    CHECK(h.mode(1, 0).real() == 1.0);

    // constant initial data never moves
    HeatSolution flat = heat_solve({{1.0, 0.0}}, 0.3, {0.0, 0.7, 2.0});
    for (std::size_t t = 0; t < 3; ++t) {
        auto boxes = flat.boxes(t, 5);
        for (double m : boxes) CHECK(m == doctest::Approx(0.2).epsilon(1e-14));
    }

    // semigroup: tau1 then tau2 equals tau1 + tau2
    HeatSolution a = heat_solve({{1.0, 0.0}, {0.5, 0.0}}, 0.1, {0.4});
    HeatSolution b = heat_solve({{1.0, 0.0}, a.mode(0, 1)}, 0.1, {0.6});
    HeatSolution direct = heat_solve({{1.0, 0.0}, {0.5, 0.0}}, 0.1, {1.0});
    CHECK(std::abs(b.mode(0, 1) - direct.mode(0, 1)) < 1e-15);

    CHECK_THROWS_AS(heat_solve({{1.0, 0.0}}, -0.2, {1.0}), std::invalid_argument);
}

TEST_CASE("diffusive compare: joint equilibrium has zero gap, mismatches throw") {
    VelocityGrid g = VelocityGrid::make(5.0, 11, true);
    Density m1 = Density::maxwellian(1.0);
    double c = 2.0;
    std::vector<double> taus = {0.0, 0.1, 0.2};
    std::vector<double> ct;
    for (double t : taus) ct.push_back(c * t);

    KineticSolution kin = grid_boltzmann_solve(m1, m1, c, g, {1.0}, 0.01, ct);
    HeatSolution heat = heat_solve({{1.0, 0.0}}, 0.17, taus);
    DiffusiveComparison cmp = diffusive_compare(kin, heat, 1.0, c, 8);

    REQUIRE(cmp.l1_gap.size() == taus.size());
    for (double gap : cmp.l1_gap) CHECK(gap < 1e-3);  // [TRIVIAL: joint equilibrium]
    CHECK(cmp.velocity_tail_mass > 0.0);
    CHECK(cmp.velocity_tail_mass < 1e-4);

    HeatSolution wrong_times = heat_solve({{1.0, 0.0}}, 0.17, {0.0, 0.1, 0.25});
    CHECK_THROWS_AS(diffusive_compare(kin, wrong_times, 1.0, c, 8), std::invalid_argument);
    CHECK_THROWS_AS(diffusive_compare(kin, heat, 2.0, c, 8), std::invalid_argument);
}

TEST_CASE("diffusive compare: cosine data at moderate rate lands near the heat profile") {
    // a smoke-scale version of the limit experiment: modest grid, one mode,
    // c = 8; the gap should sit well below the initial perturbation size and
    // shrink with tau as the profile flattens
    VelocityGrid g = VelocityGrid::make(6.0, 13, true);
    Density m1 = Density::maxwellian(1.0);
    double c = 8.0;
    std::vector<double> taus = {0.05, 0.1};
    std::vector<double> ct;
    for (double t : taus) ct.push_back(c * t);

    KappaResult kr = compute_kappa(1.0, g);
    KineticSolution kin = grid_boltzmann_solve(m1, m1, c, g, {1.0, {0.5, 0.0}}, 0.002, ct);
    HeatSolution heat = heat_solve({{1.0, 0.0}, {0.5, 0.0}}, kr.kappa, taus);
    DiffusiveComparison cmp = diffusive_compare(kin, heat, 1.0, c, 16);

    // initial L1 size of the perturbation is (2/pi) int |cos| = 2/pi ~ 0.64
    CHECK(cmp.l1_gap[0] < 0.2);
    CHECK(cmp.l1_gap[1] < cmp.l1_gap[0]);
}
