#include "rgas/kinetics.hpp"

#include <cmath>
#include <stdexcept>

#include "rgas/quadrature.hpp"

namespace rgas {

double collision_rate_maxwellian_closed(double beta, double speed) {
    double s = 1.0 / std::sqrt(beta), a = speed;
    if (a < 1e-300) return M_PI * s * std::sqrt(8.0 / M_PI);
    double e = std::erf(a / (std::sqrt(2.0) * s));
    double mean = s * std::sqrt(2.0 / M_PI) * std::exp(-a * a / (2.0 * s * s)) +
                  (a + s * s / a) * e;
    return M_PI * mean;
}

double collision_rate(const Density& g0, const Vec3& v) {
    double a = norm(v);
    switch (g0.kind) {
        case DensityKind::maxwellian: {
            // speed density 4 pi u^2 M_beta(u), 64-node Gauss-Legendre in u.
            // The angular mean has a kink at u = |v|, so integrate the two
            // sides separately to keep spectral accuracy.
            double s = g0.sigma();
            double hi = 8.5 * s + a;
            double c = std::pow(g0.beta / (2.0 * M_PI), 1.5) * 4.0 * M_PI;
            double acc = 0;
            auto panel = [&](double lo, double up) {
                if (up <= lo) return;
                GaussLegendre gl(64, lo, up);
                for (int i = 0; i < 64; ++i) {
                    double u = gl.x[i];
                    double w = gl.w[i] * c * u * u * std::exp(-0.5 * g0.beta * u * u);
                    acc += w * angular_mean_reldist(a, u);
                }
            };
            panel(0.0, std::min(a, hi));
            panel(std::min(a, hi), hi);
            return M_PI * acc;
        }
        case DensityKind::table: {
            double acc = 0;
            for (const auto& u : *g0.samples) acc += norm(v - u);
            return M_PI * acc / double(g0.samples->size());
        }
        case DensityKind::callable: {
            // radial panels split at u = |v| (kink of the angular mean),
            // 26-point angular design per shell
            double a = norm(v);
            SphereDesign ang = lebedev26();
            double R = g0.support_radius;
            double acc = 0;
            auto panel = [&](double lo, double up) {
                if (up <= lo) return;
                GaussLegendre gl(48, lo, up);
                for (std::size_t i = 0; i < gl.x.size(); ++i) {
                    double r = gl.x[i];
                    double shell = 0;
                    for (std::size_t k = 0; k < ang.size(); ++k) {
                        Vec3 u = r * ang.nu[k];
                        shell += ang.w[k] * g0.pdf_fn(u) * norm(v - u);
                    }
                    acc += gl.w[i] * 4.0 * M_PI * r * r * shell;
                }
            };
            panel(0.0, std::min(a, R));
            panel(std::min(a, R), R);
            return M_PI * acc;
        }
    }
    return 0;
}

RateProfile::RateProfile(const Density& g0, double max_speed) {
    if (!(max_speed > 0)) throw std::invalid_argument("RateProfile: max_speed must be positive");
    rmax_ = max_speed;
    int n = 2048;
    dr_ = rmax_ / n;
    val_.resize(n + 2);
    for (int i = 0; i <= n + 1; ++i) {
        double r = i * dr_;
        Vec3 v{r, 0, 0};
        val_[i] = collision_rate(g0, v);
    }
}

double RateProfile::operator()(double speed) const {
    if (speed >= rmax_) {
        // lambda is asymptotically linear: pi*(speed + O(1/speed))
        double top = val_[val_.size() - 2];
        return top + M_PI * (speed - rmax_);
    }
    double t = speed / dr_;
    std::size_t i = std::size_t(t);
    double f = t - double(i);
    return val_[i] * (1.0 - f) + val_[i + 1] * f;
}

KineticConstants KineticConstants::compute(const Density& f0, const Density& g0, double V_cap) {
    KineticConstants k;
    k.M_g = 4.0 * M_PI * g0.second_moment();
    k.C_g = 4.0 * M_PI * g0.third_moment();
    k.beta1 = g0.mean_speed();
    k.E0 = std::max(1.0, f0.second_moment());
    k.V_cap = V_cap;
    k.M_f0 = f0.tail_energy(V_cap);
    return k;
}

}  // namespace rgas
