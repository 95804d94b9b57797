#include "doctest.h"

#include <cmath>

#include "helpers.hpp"
#include "rgas/bounds.hpp"

using namespace rgas;

namespace {

KineticConstants ones() {
    KineticConstants k;
    k.M_g = k.C_g = k.beta1 = k.E0 = 1.0;
    k.M_f0 = 0.0;
    return k;
}

BoundInputs sample_inputs() {
    BoundInputs in;
    in.eps = 0.01;
    in.t = 0.7;
    in.T = 1.0;
    in.c = 1.0;
    in.consts = KineticConstants::compute(Density::maxwellian(1.0), Density::maxwellian(1.0), 8.0);
    in.M_eps = 6.0;
    in.V_eps = 8.0;
    in.eta = 0.3;
    in.delta = 0.2;
    return in;
}

}  // namespace

TEST_CASE("moment ceilings at the all-ones calibration point") {
    KineticConstants k = ones();
    CHECK(energy_bound(k, 1.0, 1.0) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(energy_bound(k, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(momentum_bound(k, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    double pi = std::acos(-1.0);
    double want = 1.0 + pi * (2.0 + 2.0 / (2.0 * std::sqrt(2.0)));
    CHECK(expected_collisions_bound(k, 1.0, 1.0) == doctest::Approx(want).epsilon(1e-14));
    CHECK(want == doctest::Approx(9.5048).epsilon(1e-4));
    CHECK(expected_collisions_bound(k, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));

    // all ceilings are nondecreasing in t and in c
    for (double c : {0.5, 1.0, 2.0}) {
        double prev_e = 0, prev_m = 0, prev_n = 0;
        for (double t = 0; t <= 2.0; t += 0.1) {
            CHECK(energy_bound(k, c, t) >= prev_e);
            CHECK(momentum_bound(k, c, t) >= prev_m);
            CHECK(expected_collisions_bound(k, c, t) >= prev_n);
            prev_e = energy_bound(k, c, t);
            prev_m = momentum_bound(k, c, t);
            prev_n = expected_collisions_bound(k, c, t);
        }
    }
}

TEST_CASE("bad-tree ceilings vanish in the right limits") {
    BoundInputs in = sample_inputs();

    BoundInputs big_m = in;
    big_m.M_eps = 1e9;
    CHECK(bad_tree_bounds(big_m).high_collision < 1e-7);

    BoundInputs big_v = in;
    big_v.V_eps = 1e9;
    CHECK(bad_tree_bounds(big_v).velocity < 1e-9);

    BadTreeBounds b = bad_tree_bounds(in);
    CHECK(b.overlap == doctest::Approx(in.eps + in.M_eps * std::pow(in.eps, 1.5)).epsilon(1e-13));
    CHECK(b.total() >= b.recollision);

    // the two recollision displays differ by powers of M
    BoundInputs alt = in;
    alt.recollision_prop_form = true;
    CHECK(bad_tree_bounds(alt).recollision < b.recollision);
}

TEST_CASE("total error bound composes the pieces and grows with t") {
    BoundInputs in = sample_inputs();
    double prev = 0;
    for (double t = 0; t <= in.T + 1e-12; t += 0.05) {
        in.t = std::min(t, in.T);
        double v = total_error_bound(in);
        CHECK(v >= prev);
        prev = v;
    }

    BoundInputs bad = in;
    bad.t = 2 * in.T;
    CHECK_THROWS_AS(total_error_bound(bad), std::invalid_argument);
    bad = in;
    bad.eta = 0;
    CHECK_THROWS_AS(total_error_bound(bad), std::invalid_argument);
}

TEST_CASE("scaling planner hits the published exponent identities") {
    ScalingPlan p = plan_scaling(1e-3, 0.1, 1.0);
    CHECK(p.T == doctest::Approx(1.4757).epsilon(2e-4));

    for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        for (double alpha : {0.02, 0.05, 0.10, 0.15, 0.20}) {
            for (double c : {1.0, 2.0, 10.0}) {
                ScalingPlan q = plan_scaling(eps, alpha, c);
                double lhs = std::pow(c, 84.0 / 103.0) * q.T;
                double rhs = std::pow(eps, 52.0 * alpha / 103.0 - 11.0 / 103.0);
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

                double pre = std::pow(c, 21.0 / 13.0) * std::pow(q.T, 103.0 / 52.0) *
                             std::pow(eps, 11.0 / 52.0);
                CHECK(pre == doctest::Approx(std::pow(eps, alpha)).epsilon(1e-10));

                double mv = std::pow(c, 5.0 / 13.0) * std::pow(q.T, 1.0 / 52.0) *
                            std::pow(eps, -11.0 / 52.0);
                CHECK(q.M_eps == doctest::Approx(mv).epsilon(1e-10));
                CHECK(q.V_eps == q.M_eps);

                auto terms = balance_terms(q);
                for (double term : terms)
                    CHECK(term == doctest::Approx(terms[0]).epsilon(1e-9));
                // the common value is the predicted error level
                CHECK(terms[1] == doctest::Approx(q.predicted_error).epsilon(1e-9));
            }
        }
    }

    CHECK_THROWS_AS(plan_scaling(1e-3, 11.0 / 52.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_scaling(1e-3, 0.3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_scaling(1e-3, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(plan_scaling(1e-3, 0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(plan_scaling(2.0, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("rho_hat recursion equals the closed form") {
    CHECK(rho_hat(0.37, 0, 0.8) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(rho_hat(0.1, 1, 0.0) == doctest::Approx(0.1).epsilon(1e-15));

    Rng rng(1234);
    for (int i = 0; i < 1000; ++i) {
        double eps = rng.uniform(1e-4, 0.5);
        double rho0 = rng.uniform(0.0, 1.0);
        int n = int(rng.u01() * 101);
        double rec = rho_hat(eps, n, rho0);
        double closed = rho_hat_closed(eps, n, rho0);
        CHECK(std::abs(rec - closed) <= 1e-12 * std::max(1.0, std::abs(closed)));
    }
}

TEST_CASE("path rate functionals") {
    Rng rng(55);
    Density g = Density::maxwellian(1.0);
    CollisionTree t = rgas::testing::random_tree(rng, 3, 0.8);
    CHECK(tree_C(t, g) >= 2.0 * collision_rate(g, t.root.v));
    CHECK(tree_L(t, g) < 0.0);
    CHECK(tree_C(t, g) == doctest::Approx(2.0 * tree_rate_sup(t, g)).epsilon(1e-14));
}

TEST_CASE("exclusion mass: static ball volume and small-tube limits") {
    CollisionTree still;
    still.root = {{0.5, 0.5, 0.5}, {0, 0, 0}};
    still.horizon = 1.0;
    Density point = Density::table({{0, 0, 0}});

    double eps = 0.1;
    ExclusionMassEstimate est = exclusion_mass(still, 1.0, eps, point, 200000, 77);
    double ball = 4.0 / 3.0 * std::acos(-1.0) * eps * eps * eps;
    CHECK(std::abs(est.mean - ball) <= 4.5 * est.se + 1e-12);
    CHECK(est.se < 3e-4);

    ExclusionMassEstimate tiny = exclusion_mass(still, 1.0, 0.004, point, 10000, 78);
    CHECK(tiny.mean <= 1e-3);

    // moving background cloud sweeps a capsule: scales like eps^2
    Rng rng(91);
    CollisionTree t = rgas::testing::random_tree(rng, 1, 1.0);
    Density g = Density::maxwellian(1.0);
    ExclusionMassEstimate big = exclusion_mass(t, 1.0, 0.04, g, 400000, 79);
    ExclusionMassEstimate half = exclusion_mass(t, 1.0, 0.02, g, 400000, 80);
    double slope = std::log(big.mean / half.mean) / std::log(2.0);
    CHECK(slope > 1.6);
    CHECK(slope < 2.4);
}
