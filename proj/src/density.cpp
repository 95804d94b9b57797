#include "rgas/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rgas/quadrature.hpp"

namespace rgas {

Density Density::maxwellian(double beta) {
    if (!(beta > 0)) throw std::invalid_argument("maxwellian: beta must be positive");
    Density d;
    d.kind = DensityKind::maxwellian;
    d.beta = beta;
    return d;
}

Density Density::table(std::vector<Vec3> samples) {
    if (samples.empty()) throw std::invalid_argument("table density: no samples");
    Density d;
    d.kind = DensityKind::table;
    d.samples = std::make_shared<const std::vector<Vec3>>(std::move(samples));
    return d;
}

Density Density::callable(std::function<double(const Vec3&)> pdf, double support_radius) {
    if (!pdf || !(support_radius > 0))
        throw std::invalid_argument("callable density: need pdf and positive support radius");
    Density d;
    d.kind = DensityKind::callable;
    d.pdf_fn = std::move(pdf);
    d.support_radius = support_radius;
    return d;
}

double Density::sigma() const {
    if (kind != DensityKind::maxwellian) throw std::logic_error("sigma: not a maxwellian");
    return 1.0 / std::sqrt(beta);
}

double Density::pdf(const Vec3& v) const {
    switch (kind) {
        case DensityKind::maxwellian: {
            double c = std::pow(beta / (2.0 * M_PI), 1.5);
            return c * std::exp(-0.5 * beta * norm2(v));
        }
        case DensityKind::callable:
            return pdf_fn(v);
        case DensityKind::table:
            throw std::logic_error("pdf: table density has no pointwise density");
    }
    return 0;
}

Vec3 Density::sample(Rng& rng) const {
    switch (kind) {
        case DensityKind::maxwellian:
            return rng.gauss3(sigma());
        case DensityKind::table: {
            const auto& s = *samples;
            std::size_t i = std::size_t(rng.u01() * double(s.size()));
            if (i >= s.size()) i = s.size() - 1;
            return s[i];
        }
        case DensityKind::callable:
            throw std::logic_error("sample: callable density is not samplable");
    }
    return {};
}

namespace {

template <class F>
double table_mean(const std::vector<Vec3>& s, F f) {
    double acc = 0;
    for (const auto& v : s) acc += f(v);
    return acc / double(s.size());
}

template <class F>
double callable_integral(const Density& d, F f) {
    // spherical product rule: radial Gauss-Legendre x 26-point angular design;
    // exact in the angle for isotropic densities and radial functionals
    GaussLegendre gl(96, 0.0, d.support_radius);
    SphereDesign ang = lebedev26();
    double acc = 0;
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
        double r = gl.x[i];
        double shell = 0;
        for (std::size_t k = 0; k < ang.size(); ++k) {
            Vec3 v = r * ang.nu[k];
            shell += ang.w[k] * d.pdf_fn(v) * f(v);
        }
        acc += gl.w[i] * 4.0 * M_PI * r * r * shell;
    }
    return acc;
}

// Hill estimator of the tail index a in P(|v| > r) ~ r^-a, from the top
// order statistics of the speeds.  E|v|^p is finite iff p < a.
double hill_tail_index(const std::vector<Vec3>& s) {
    std::vector<double> r;
    r.reserve(s.size());
    for (const auto& v : s) r.push_back(norm(v));
    std::sort(r.begin(), r.end());
    std::size_t n = r.size();
    std::size_t k = std::max<std::size_t>(20, n / 50);
    if (k + 1 >= n) return 1e9;
    double rk = r[n - 1 - k];
    if (!(rk > 0)) return 1e9;
    double acc = 0;
    for (std::size_t i = n - k; i < n; ++i) acc += std::log(r[i] / rk);
    if (acc <= 0) return 1e9;
    return double(k) / acc;
}

}  // namespace

double Density::mean_speed() const {
    switch (kind) {
        case DensityKind::maxwellian:
            return std::sqrt(8.0 / (M_PI * beta));
        case DensityKind::table:
            return table_mean(*samples, [](const Vec3& v) { return norm(v); });
        case DensityKind::callable:
            return callable_integral(*this, [](const Vec3& v) { return norm(v); });
    }
    return 0;
}

double Density::second_moment() const {
    switch (kind) {
        case DensityKind::maxwellian:
            return 3.0 / beta;
        case DensityKind::table:
            return table_mean(*samples, [](const Vec3& v) { return norm2(v); });
        case DensityKind::callable:
            return callable_integral(*this, [](const Vec3& v) { return norm2(v); });
    }
    return 0;
}

double Density::third_moment() const {
    switch (kind) {
        case DensityKind::maxwellian:
            // E chi_3^3 = 16/sqrt(2 pi)
            return 16.0 / std::sqrt(2.0 * M_PI) * std::pow(beta, -1.5);
        case DensityKind::table:
            return table_mean(*samples, [](const Vec3& v) { return norm(v) * norm2(v); });
        case DensityKind::callable:
            return callable_integral(*this, [](const Vec3& v) { return norm(v) * norm2(v); });
    }
    return 0;
}

double Density::tail_energy(double V) const {
    if (V <= 0) return second_moment();
    switch (kind) {
        case DensityKind::maxwellian:
            // |v|^2 ~ chi^2_3 / beta and E[Y 1_{Y>y}] = k Q(k/2+1, y/2) for chi^2_k
            return (3.0 / beta) * gamma_q(2.5, 0.5 * beta * V * V);
        case DensityKind::table:
            return table_mean(*samples,
                              [V](const Vec3& v) { return norm(v) > V ? norm2(v) : 0.0; });
        case DensityKind::callable:
            return callable_integral(
                *this, [V](const Vec3& v) { return norm(v) > V ? norm2(v) : 0.0; });
    }
    return 0;
}

namespace {

// ess sup of g*(1+|v|^5) for one density
void sup_functional(const Density& g, double& value, bool& finite) {
    switch (g.kind) {
        case DensityKind::maxwellian: {
            // maximize (beta/2pi)^{3/2} exp(-beta r^2/2) (1+r^5) on a radial scan
            double best = 0;
            double c = std::pow(g.beta / (2.0 * M_PI), 1.5);
            for (int i = 0; i <= 4000; ++i) {
                double r = i * (12.0 * g.sigma()) / 4000.0;
                double f = c * std::exp(-0.5 * g.beta * r * r) * (1.0 + std::pow(r, 5));
                best = std::max(best, f);
            }
            value = best;
            finite = true;
            return;
        }
        case DensityKind::table: {
            // shell-density estimate; flagged infinite when the weighted density
            // keeps growing through the outermost populated shells
            const auto& s = *g.samples;
            std::vector<double> r;
            r.reserve(s.size());
            for (const auto& v : s) r.push_back(norm(v));
            std::sort(r.begin(), r.end());
            double rmax = r.back() * 1.0000001;
            int nb = 32;
            std::vector<double> dens(nb, 0.0);
            for (double ri : r) {
                int b = std::min(nb - 1, int(ri / rmax * nb));
                dens[b] += 1.0;
            }
            double best = 0, best_outer = 0;
            for (int b = 0; b < nb; ++b) {
                double r0 = rmax * b / nb, r1 = rmax * (b + 1) / nb;
                double shell = 4.0 / 3.0 * M_PI * (r1 * r1 * r1 - r0 * r0 * r0);
                if (dens[b] == 0) continue;
                double ghat = dens[b] / (double(r.size()) * shell);
                double rm = 0.5 * (r0 + r1);
                double f = ghat * (1.0 + std::pow(rm, 5));
                best = std::max(best, f);
                if (b >= 2 * nb / 3) best_outer = std::max(best_outer, f);
            }
            value = best;
            // growth into the tail shells means the weighted density does not decay
            finite = !(best_outer > 0 && best_outer >= 0.5 * best && hill_tail_index(s) <= 5.0);
            return;
        }
        case DensityKind::callable: {
            double best = 0, boundary = 0;
            int n = 2000;
            for (int i = 1; i <= n; ++i) {
                double rr = g.support_radius * i / n;
                double f = g.pdf_fn({rr, 0, 0}) * (1.0 + std::pow(rr, 5));
                best = std::max(best, f);
                if (i == n) boundary = f;
            }
            value = best;
            finite = boundary < 0.5 * best;  // still rising at the declared support edge
            return;
        }
    }
}

}  // namespace

AdmissibilityReport admissibility_report(const Density& f0, const Density& g0) {
    AdmissibilityReport rep;

    rep.f_energy = 1.0 + f0.second_moment();
    rep.f_energy_finite = true;
    if (f0.kind == DensityKind::table) rep.f_energy_finite = hill_tail_index(*f0.samples) > 2.0;

    rep.g_third = 1.0 + g0.third_moment();
    rep.g_third_finite = true;
    if (g0.kind == DensityKind::table) rep.g_third_finite = hill_tail_index(*g0.samples) > 3.0;

    sup_functional(g0, rep.g_sup, rep.g_sup_finite);
    return rep;
}

}  // namespace rgas
