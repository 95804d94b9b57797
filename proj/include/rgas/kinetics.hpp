#pragma once

#include <utility>
#include <vector>

#include "rgas/density.hpp"
#include "rgas/geometry.hpp"

namespace rgas {

// Tagged-particle state on the torus.
struct PhasePoint {
    Vec3 x;  // position in [0,1)^3
    Vec3 v;
};

// One collision event on the tagged particle's history.
//   t    : collision time
//   nu   : unit normal at contact, oriented from the tagged center toward the
//          background center, so nu.(v_tag - v_bg) > 0 at an approaching contact
//   v_in : background velocity immediately before the collision
struct CollisionMarker {
    double t = 0;
    Vec3 nu;
    Vec3 v_in;
};

// Elastic hard-sphere exchange along the contact normal.  Conserves pairwise
// momentum and kinetic energy exactly; applying it twice is the identity.
inline std::pair<Vec3, Vec3> collide(const Vec3& v_tag, const Vec3& v_bg, const Vec3& nu) {
    double d = dot(nu, v_tag - v_bg);
    return {v_tag - d * nu, v_bg + d * nu};
}

// Loss-side collision rate lambda(v) = int_{S^2} int g0(vbar) [(v-vbar).nu]_+ dvbar dnu
//                                    = pi * E_g0 |v - vbar|.
// Maxwellian g0: radial Gauss-Legendre quadrature with the exact angular average;
// table g0: exact mean over the samples.
double collision_rate(const Density& g0, const Vec3& v);

// Closed form of pi * E|v - V|, V ~ M_beta (used as quadrature oracle).
double collision_rate_maxwellian_closed(double beta, double speed);

// Exact spherical average of |a e - u w| over unit vectors w.
inline double angular_mean_reldist(double a, double u) {
    if (a <= u) {
        if (u == 0) return 0;
        return u + a * a / (3.0 * u);
    }
    return a + u * u / (3.0 * a);
}

// Cached radial profile of collision_rate for isotropic densities; hot paths
// (thinning loops) interpolate instead of re-integrating.
class RateProfile {
  public:
    RateProfile(const Density& g0, double max_speed);
    double operator()(double speed) const;
    double max_speed() const { return rmax_; }

  private:
    std::vector<double> val_;
    double rmax_, dr_;
};

// Constants of the background/data pair used by the a-priori bounds:
//   M_g   = 4 pi E_g|v|^2          (sphere factor included)
//   C_g   = 4 pi E_g|v|^3
//   beta1 = E_g|v|                 (the paper's scalar beta; renamed, it is not
//                                   the inverse temperature)
//   E0    = max(1, E_f0|v|^2)
//   M_f0  = int_{|v| > V_cap} f0 |v|^2
struct KineticConstants {
    double M_g = 0, C_g = 0, beta1 = 0, E0 = 1, M_f0 = 0, V_cap = 0;
    static KineticConstants compute(const Density& f0, const Density& g0, double V_cap);
};

}  // namespace rgas
