#pragma once

#include <vector>

#include "rgas/geometry.hpp"

namespace rgas {

// Gauss-Legendre nodes and weights on [a, b].
struct GaussLegendre {
    std::vector<double> x, w;
    GaussLegendre(int n, double a, double b);
};

// Quadrature nodes on the unit sphere; weights sum to 1 (so integral = 4*pi * sum w f).
struct SphereDesign {
    std::vector<Vec3> nu;
    std::vector<double> w;
    std::size_t size() const { return nu.size(); }
};

// Octahedrally symmetric 26-point design (degree 7).
SphereDesign lebedev26();

// Product design on the hemisphere around direction `axis`: Gauss-Legendre in
// mu = cos(theta) on [0,1] x n_phi uniform azimuths.  Returned weights sum to 1/2
// (the hemisphere), and integrate mu exactly, so the collision-rate integral
// int [(w.nu)]_+ dnu = pi |w| is exact by construction.
SphereDesign aligned_hemisphere(const Vec3& axis, int n_mu, int n_phi);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

}  // namespace rgas
