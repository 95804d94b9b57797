#pragma once

#include "rgas/density.hpp"
#include "rgas/tree.hpp"

namespace rgas {

// Exact simulation of the idealised tagged-particle law: free flight at the
// current velocity, collisions at instantaneous rate c * lambda(v) realised
// by thinning a constant-rate clock per flight leg, post-collision data from
// the hard-sphere gain kernel.
struct JumpProcessConfig {
    double c = 1.0;
    double T = 1.0;
    Density f0 = Density::maxwellian(1.0);  // initial velocity law; x uniform
    Density g0 = Density::maxwellian(1.0);  // background velocity law
    // clock envelope is c pi (|v| + envelope_shift); negative means derive a
    // safe default from g0's moments
    double envelope_shift = -1.0;
    // shift s0 in the gain rejection bound (|v| + |vbar| + s0); negative
    // means half of g0's mean speed
    double post_shift = -1.0;
};

struct PostCollisionDraw {
    Vec3 nu;
    Vec3 v_bg;
    int proposals = 0;
};

// draw (nu, vbar) ~ g0(vbar) [(v - vbar).nu]_+ exactly, by rejection with
// acceptance [(v - vbar).nu]_+ / (|v| + |vbar| + s0) against a background
// proposal tilted by the same denominator (so the law comes out untilted);
// throws after 1e5 consecutive rejections (useless envelope or zero rate)
PostCollisionDraw sample_post_collision(const Vec3& v, const Density& g0, Rng& rng,
                                        double s0 = -1.0);

struct IdealizedSample {
    CollisionTree tree;
    PhasePoint final_state;       // tagged (x, v) at the horizon
    long clock_proposals = 0;     // thinning candidates
    long gain_proposals = 0;      // rejection proposals inside accepted events
    int envelope_violations = 0;  // must stay 0; envelope doubles on each
};

IdealizedSample sample_idealized_tree(const JumpProcessConfig& cfg, Rng& rng);

}  // namespace rgas
