#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "rgas/geometry.hpp"
#include "rgas/rng.hpp"

namespace rgas {

// Velocity densities on R^3: Maxwellian M_beta, empirical sample table, or a
// raw pdf handle (evaluation only, for quadrature paths).
enum class DensityKind { maxwellian, table, callable };

struct Density {
    DensityKind kind = DensityKind::maxwellian;
    double beta = 1.0;
    std::shared_ptr<const std::vector<Vec3>> samples;
    std::function<double(const Vec3&)> pdf_fn;
    double support_radius = 0.0;

    static Density maxwellian(double beta);
    static Density table(std::vector<Vec3> samples);
    static Density callable(std::function<double(const Vec3&)> pdf, double support_radius);

    bool is_maxwellian() const { return kind == DensityKind::maxwellian; }
    double sigma() const;  // per-component std dev (maxwellian)

    double pdf(const Vec3& v) const;
    Vec3 sample(Rng& rng) const;

    double mean_speed() const;     // E|v|
    double second_moment() const;  // E|v|^2
    double third_moment() const;   // E|v|^3
    double tail_energy(double V) const;  // int_{|v|>V} g |v|^2 dv
};

struct AdmissibilityReport {
    double f_energy = 0;  // int f0 (1+|v|^2)
    double g_third = 0;   // int g0 (1+|v|^3)
    double g_sup = 0;     // ess sup g0 (1+|v|^5)
    bool f_energy_finite = true;
    bool g_third_finite = true;
    bool g_sup_finite = true;
    bool admissible() const { return f_energy_finite && g_third_finite && g_sup_finite; }
};

// Moment functionals estimated by closed form (maxwellian), sample statistics
// with a Hill tail-index check (table), or quadrature over the declared
// support (callable).
AdmissibilityReport admissibility_report(const Density& f0, const Density& g0);

}  // namespace rgas
