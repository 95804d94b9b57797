#include "rgas/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace rgas {

GaussLegendre::GaussLegendre(int n, double a, double b) {
    x.resize(n);
    w.resize(n);
    // Newton iteration on Legendre P_n, nodes mapped from [-1,1] to [a,b].
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double xm = 0.5 * (b + a), xl = 0.5 * (b - a);
        x[i] = xm - xl * z;
        x[n - 1 - i] = xm + xl * z;
        w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

SphereDesign lebedev26() {
    SphereDesign d;
    const double w1 = 1.0 / 21.0, w2 = 4.0 / 105.0, w3 = 27.0 / 840.0;
    const double s2 = 1.0 / std::sqrt(2.0), s3 = 1.0 / std::sqrt(3.0);
    for (int axis = 0; axis < 3; ++axis)
        for (int sgn : {-1, 1}) {
            Vec3 v{0, 0, 0};
            v[axis] = sgn;
            d.nu.push_back(v);
            d.w.push_back(w1);
        }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            for (int si : {-1, 1})
                for (int sj : {-1, 1}) {
                    Vec3 v{0, 0, 0};
                    v[i] = si * s2;
                    v[j] = sj * s2;
                    d.nu.push_back(v);
                    d.w.push_back(w2);
                }
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                d.nu.push_back({sx * s3, sy * s3, sz * s3});
                d.w.push_back(w3);
            }
    return d;
}

SphereDesign aligned_hemisphere(const Vec3& axis, int n_mu, int n_phi) {
    double a = norm(axis);
    if (a == 0.0) throw std::invalid_argument("aligned_hemisphere: zero axis");
    Vec3 e3 = axis / a;
    // orthonormal frame
    Vec3 e1 = std::abs(e3.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    e1 = e1 - dot(e1, e3) * e3;
    e1 = e1 / norm(e1);
    Vec3 e2{e3.y * e1.z - e3.z * e1.y, e3.z * e1.x - e3.x * e1.z, e3.x * e1.y - e3.y * e1.x};

    GaussLegendre gl(n_mu, 0.0, 1.0);
    SphereDesign d;
    d.nu.reserve(std::size_t(n_mu) * n_phi);
    d.w.reserve(std::size_t(n_mu) * n_phi);
    for (int i = 0; i < n_mu; ++i) {
        double mu = gl.x[i], s = std::sqrt(1.0 - mu * mu);
        for (int j = 0; j < n_phi; ++j) {
            double phi = 2.0 * M_PI * (j + 0.5) / n_phi;
            Vec3 nu = mu * e3 + s * (std::cos(phi) * e1 + std::sin(phi) * e2);
            d.nu.push_back(nu);
            d.w.push_back(0.5 * gl.w[i] / n_phi);  // hemisphere carries measure 1/2
        }
    }
    return d;
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    // Lentz continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

}  // namespace rgas
