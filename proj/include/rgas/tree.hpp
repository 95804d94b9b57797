#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "rgas/geometry.hpp"
#include "rgas/kinetics.hpp"

namespace rgas {

// Marked collision tree: root state, time-ordered markers, time horizon.
struct CollisionTree {
    PhasePoint root;
    std::vector<CollisionMarker> markers;
    double horizon = 0;

    std::size_t n() const { return markers.size(); }
    double tau() const { return markers.empty() ? 0.0 : markers.back().t; }
};

// Tree with its final collision removed.
CollisionTree prune_final(const CollisionTree& tree);

// V(Phi): max over tagged segment speeds and incoming background speeds.
double max_velocity(const CollisionTree& tree);

// Piecewise-free trajectories encoded by a tree at diameter eps.  The tagged
// path is piecewise linear with velocity jumps at the markers; each marker's
// background particle moves freely into the contact point
// x_j(t_j) = x(t_j) + eps*nu_j and freely out with its post-collision velocity.
struct ReconstructedPaths {
    std::vector<double> times;   // 0, t_1, ..., t_n
    std::vector<Vec3> x_at;      // tagged position at those times, wrapped
    std::vector<Vec3> v_seg;     // tagged velocity on [times[i], next time)
    struct BgLine {
        double t_contact = 0;
        Vec3 x_contact;  // background center at contact, wrapped
        Vec3 v_pre, v_post;
    };
    std::vector<BgLine> background;
    double horizon = 0, eps = 0;

    Vec3 tagged_at(double t) const;
    Vec3 tagged_velocity_at(double t) const;
    Vec3 background_at(std::size_t j, double t) const;
};

ReconstructedPaths reconstruct(const CollisionTree& tree, double eps);

struct TreeFlags {
    bool too_many = false;
    bool too_fast = false;
    bool recollision = false;
    bool initial_overlap = false;
    bool grazing = false;
    bool good() const {
        return !(too_many || too_fast || recollision || initial_overlap || grazing);
    }
};

struct GoodTreeCaps {
    double eps = 0;
    double M_cap = 0;      // flag when n(Phi) > M_cap
    double V_cap = 0;      // flag when V(Phi) >= V_cap
    double graze_tol = 1e-9;
};

TreeFlags classify(const CollisionTree& tree, const GoodTreeCaps& caps);

// Brute-force recollision/overlap oracle on a dense time grid
// (step eps / (10 * max_velocity)); used to validate the analytic classifier.
TreeFlags classify_dense_oracle(const CollisionTree& tree, const GoodTreeCaps& caps);

// Minimum torus distance between the tagged path and background line of
// marker j over [0, horizon], excluding a +-t_excl window around the contact.
double min_marker_distance(const ReconstructedPaths& paths, std::size_t j,
                           double t_excl = 1e-9);

// Minimum torus distance between two free flights xa + (t-ta)·va and
// xb + (t-tb)·vb over t in [t0, t1].  Exact whenever the result is < 0.25.
double flight_min_distance(const Vec3& xa, double ta, const Vec3& va,
                           const Vec3& xb, double tb, const Vec3& vb,
                           double t0, double t1);

// One tree per line:
// {"root":{"x":[...],"v":[...]},"markers":[{"t":..,"nu":[...],"v":[...]}],"horizon":..}
std::string tree_to_json(const CollisionTree& tree);
CollisionTree tree_from_json(const std::string& line);
void write_ndjson(std::ostream& os, const std::vector<CollisionTree>& trees);
std::vector<CollisionTree> read_ndjson(std::istream& is);

}  // namespace rgas
