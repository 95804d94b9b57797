#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rgas/boltzmann_grid.hpp"
#include "rgas/density.hpp"
#include "rgas/kinetics.hpp"
#include "rgas/rng.hpp"
#include "rgas/tree.hpp"

namespace rgas {

// Run parameters for the hard-sphere Rayleigh gas in the Boltzmann-Grad
// scaling N eps^2 = c: one tagged sphere of diameter eps among N background
// spheres that free-stream and interact only with the tagged one.
struct SimConfig {
    long N = 0;
    double eps = 0;
    double c = 0;
    double T = 1;
    std::uint64_t seed = 0;
    Density f0 = Density::maxwellian(1.0);
    Density g0 = Density::maxwellian(1.0);
    long samples = 1;

    void validate() const;  // throws std::invalid_argument on a broken invariant
};

// eps = sqrt(c/N), so the scaling invariant holds to rounding
SimConfig make_sim_config(long N, double c, double T, std::uint64_t seed, Density f0,
                          Density g0, long samples = 1);

struct SystemState {
    PhasePoint tagged;
    std::vector<Vec3> bg_x, bg_v;
    double time = 0;
    // background particles whose first position draw landed inside the
    // exclusion ball, before rejection; input to the zeta(eps) overlap law
    long initial_overlaps = 0;
};

// tagged ~ uniform x f0; background positions i.i.d. uniform conditioned on
// torus distance from the tagged center > eps (per-particle rejection),
// velocities i.i.d. g0
SystemState init_configuration(const SimConfig& cfg, Rng& rng);

// Earliest s in (0, horizon] at which the two free flights reach torus
// distance eps, over all periodic images, or nothing. Approaches with radial
// closing speed below 1e-12 are grazing and do not count. Requires eps < 0.15
// (image bookkeeping) and initial separation > eps.
std::optional<double> next_contact(const PhasePoint& tagged, const PhasePoint& bg, double eps,
                                   double horizon);

// Tagged states at requested output times; velocity is right-continuous at
// collision instants.
struct TrajectorySample {
    std::vector<double> times;
    std::vector<PhasePoint> states;
};

struct EvolveResult {
    CollisionTree tree;
    TrajectorySample traj;
    std::vector<long> partners;  // background index behind each marker
    long grazing_skips = 0;
    long initial_overlaps = 0;
};

// Event loop to time T: advance everything to the earliest predicted
// tagged-background contact, exchange velocities along the contact normal,
// record the marker, re-predict against the new tagged ray. The state is
// advanced in place. out_times defaults to {T}.
EvolveResult evolve(SystemState& state, const SimConfig& cfg, std::vector<double> out_times = {});

// init + evolve on the stream derived from (cfg.seed, sample_index);
// the two calls below are what workers parallelize over
EvolveResult simulate_sample(const SimConfig& cfg, std::uint64_t sample_index,
                             std::vector<double> out_times = {});

// Normalised (x1, v) histogram of the recorded states at output time t; total
// mass exactly 1. Throws when the sample list is empty or t was not recorded.
PhaseHistogram empirical_marginal(const std::vector<TrajectorySample>& samples, double t, int nx,
                                  const VelocityGrid& grid);

}  // namespace rgas
