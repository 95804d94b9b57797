#include "rgas/boltzmann_grid.hpp"

#include <cmath>
#include <stdexcept>

#include "rgas/quadrature.hpp"

namespace rgas {

PhaseHistogram PhaseHistogram::zeros(int nx, VelocityGrid grid) {
    if (nx < 1) throw std::invalid_argument("histogram needs nx >= 1");
    PhaseHistogram h;
    h.nx = nx;
    h.grid = std::move(grid);
    h.mass.assign(std::size_t(nx) * (h.grid.size() + 1), 0.0);
    return h;
}

void PhaseHistogram::add(double x1, const Vec3& v, double weight) {
    double w = x1 - std::floor(x1);
    if (w >= 1.0) w = 0.0;
    int box = int(w * nx);
    if (box >= nx) box = nx - 1;
    std::int32_t s = grid.cell_of(v);
    at(box, s < 0 ? grid.size() : s) += weight;
}

double PhaseHistogram::total() const {
    double acc = 0;
    for (double m : mass) acc += m;
    return acc;
}

double l1_distance(const PhaseHistogram& a, const PhaseHistogram& b) {
    if (a.nx != b.nx || a.grid.n != b.grid.n || a.grid.R != b.grid.R ||
        a.grid.ball_mask != b.grid.ball_mask)
        throw std::invalid_argument("l1_distance: histograms live on different grids");
    double acc = 0;
    for (std::size_t i = 0; i < a.mass.size(); ++i) acc += std::fabs(a.mass[i] - b.mass[i]);
    return acc;
}

namespace {

// Mass of f0 in the representative cell of each orbit, normalised so the
// orbit-summed total is 1. Callable densities are evaluated by a per-cell
// Gauss rule and are assumed symmetric in (v2, v3) like everything else the
// quotient carries; sample tables are binned and orbit-averaged.
std::vector<double> rep_cell_masses(const Density& f0, const QuotientGrid& q) {
    const VelocityGrid& g = q.grid;
    std::vector<double> rep(q.orbits(), 0.0);
    if (f0.kind == DensityKind::maxwellian) {
        std::vector<double> m = g.maxwell_cell_masses(f0.beta);
        for (int o = 0; o < q.orbits(); ++o) rep[o] = m[q.rep_slot[o]];
        return rep;  // already normalised and invariant
    }
    if (f0.kind == DensityKind::table) {
        std::vector<double> slot(g.size(), 0.0);
        double kept = 0;
        for (const Vec3& v : *f0.samples) {
            std::int32_t s = g.cell_of(v);
            if (s < 0) continue;
            slot[s] += 1.0;
            kept += 1.0;
        }
        if (kept == 0) throw std::invalid_argument("initial sample table misses the grid entirely");
        for (int s = 0; s < g.size(); ++s) rep[q.orbit_of[s]] += slot[s];
        for (int o = 0; o < q.orbits(); ++o) rep[o] /= kept * q.orbit_size[o];
        return rep;
    }
    // callable
    GaussLegendre gl(4, 0.0, 1.0);
    double total = 0;
    for (int o = 0; o < q.orbits(); ++o) {
        int f = g.flat_of[q.rep_slot[o]];
        int idx[3] = {f / (g.n * g.n), (f / g.n) % g.n, f % g.n};
        double lo[3], acc = 0;
        for (int a = 0; a < 3; ++a) lo[a] = -g.R + idx[a] * g.h;
        for (std::size_t i = 0; i < gl.x.size(); ++i)
            for (std::size_t j = 0; j < gl.x.size(); ++j)
                for (std::size_t k = 0; k < gl.x.size(); ++k) {
                    Vec3 v{lo[0] + gl.x[i] * g.h, lo[1] + gl.x[j] * g.h, lo[2] + gl.x[k] * g.h};
                    acc += gl.w[i] * gl.w[j] * gl.w[k] * f0.pdf_fn(v);
                }
        rep[o] = acc * g.cell_volume();
        total += rep[o] * q.orbit_size[o];
    }
    if (total <= 0) throw std::invalid_argument("initial density vanishes on the grid");
    for (double& r : rep) r /= total;
    return rep;
}

}  // namespace

KineticSolution grid_boltzmann_solve(const Density& f0, const Density& g0, double c,
                                     const VelocityGrid& grid,
                                     const std::vector<std::complex<double>>& rho0_modes,
                                     double dt, std::vector<double> times) {
    if (!g0.is_maxwellian())
        throw std::invalid_argument("grid solver needs a Maxwellian background");
    if (c < 0 || dt <= 0) throw std::invalid_argument("grid solver needs c >= 0 and dt > 0");
    if (rho0_modes.empty() || std::abs(rho0_modes[0] - 1.0) > 1e-12)
        throw std::invalid_argument("rho0_modes[0] is the total mass and must be 1");
    if (times.empty()) throw std::invalid_argument("no output times requested");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] < 0 || (i > 0 && times[i] < times[i - 1]))
            throw std::invalid_argument("output times must be nonnegative and sorted");

    KineticSolution sol;
    sol.op = build_collision_operator(g0.beta, grid);
    const CollisionOperator& op = sol.op;
    const QuotientGrid& q = op.q;
    int nOrb = op.size();

    double max_rate = 0.5 * op.lambda_max;
    if (dt * c * max_rate >= 0.5)
        throw std::invalid_argument("explicit collision step unstable: dt * c * max rate >= 0.5");

    // h_k(0) = rho0_k f0 / mu, identical shape for every mode
    std::vector<double> rep = rep_cell_masses(f0, q);
    std::vector<double> shape(nOrb);
    for (int o = 0; o < nOrb; ++o) shape[o] = rep[o] * q.orbit_size[o] / op.mu[o];

    int nModes = int(rho0_modes.size());
    std::vector<std::vector<std::complex<double>>> h(nModes);
    for (int k = 0; k < nModes; ++k) {
        h[k].resize(nOrb);
        for (int o = 0; o < nOrb; ++o) h[k][o] = rho0_modes[k] * shape[o];
    }
    for (int k = 0; k < nModes; ++k) sol.modes.push_back(k);
    sol.times = times;
    sol.h.resize(times.size());

    std::vector<double> re(nOrb), im(nOrb), k1r(nOrb), k1i(nOrb), k2r(nOrb), k2i(nOrb);
    std::vector<std::complex<double>> phase(nOrb);

    auto collide = [&](std::vector<std::complex<double>>& z, double step) {
        for (int o = 0; o < nOrb; ++o) re[o] = z[o].real(), im[o] = z[o].imag();
        op.apply(re.data(), k1r.data());
        op.apply(im.data(), k1i.data());
        double s = -step * c;
        for (int o = 0; o < nOrb; ++o) re[o] += s * k1r[o], im[o] += s * k1i[o];
        op.apply(re.data(), k2r.data());
        op.apply(im.data(), k2i.data());
        for (int o = 0; o < nOrb; ++o)
            z[o] += 0.5 * s * std::complex<double>(k1r[o] + k2r[o], k1i[o] + k2i[o]);
    };

    double t = 0;
    std::size_t out = 0;
    auto record = [&]() { sol.h[out] = h; ++out; };
    if (times[0] == 0) record();

    while (out < times.size()) {
        double target = times[out];
        double span = target - t;
        if (span <= 0) {  // duplicate output time
            record();
            continue;
        }
        int nsub = std::max(1, int(std::ceil(span / dt)));
        double step = span / nsub;
        for (int sstep = 0; sstep < nsub; ++sstep) {
            for (int k = 1; k < nModes; ++k) {
                for (int o = 0; o < nOrb; ++o) {
                    double ang = -2.0 * M_PI * k * q.rep_node(o).x * 0.5 * step;
                    phase[o] = {std::cos(ang), std::sin(ang)};
                }
                for (int o = 0; o < nOrb; ++o) h[k][o] *= phase[o];
            }
            if (c > 0)
                for (int k = 0; k < nModes; ++k) collide(h[k], step);
            for (int k = 1; k < nModes; ++k)
                for (int o = 0; o < nOrb; ++o) {
                    double ang = -2.0 * M_PI * k * q.rep_node(o).x * 0.5 * step;
                    h[k][o] *= std::complex<double>(std::cos(ang), std::sin(ang));
                }
            double m = 0;
            for (int o = 0; o < nOrb; ++o) m += op.mu[o] * h[0][o].real();
            if (std::fabs(m - 1.0) > 1e-10)
                throw std::runtime_error("grid solver lost mass, which should be impossible");
        }
        t = target;
        record();
    }
    return sol;
}

PhaseHistogram KineticSolution::histogram(std::size_t time_index, int nx) const {
    if (time_index >= h.size()) throw std::out_of_range("no snapshot at that index");
    const QuotientGrid& q = op.q;
    PhaseHistogram out = PhaseHistogram::zeros(nx, q.grid);
    const auto& snap = h[time_index];
    for (int b = 0; b < nx; ++b) {
        // integral of e^{2 pi i k x} over the box, times 2 for k > 0 (the
        // conjugate mode), gives the spatial weight of each tracked mode
        std::vector<std::complex<double>> boxw(modes.size());
        for (std::size_t m = 0; m < modes.size(); ++m) {
            int k = modes[m];
            if (k == 0) {
                boxw[m] = 1.0 / nx;
            } else {
                std::complex<double> i2pik(0.0, 2.0 * M_PI * k);
                boxw[m] = 2.0 * (std::exp(i2pik * (double(b) + 1.0) / double(nx)) -
                                 std::exp(i2pik * double(b) / double(nx))) /
                          i2pik;
            }
        }
        for (int s = 0; s < q.grid.size(); ++s) {
            int o = q.orbit_of[s];
            double mu_s = op.mu[o] / q.orbit_size[o];
            double val = 0;
            for (std::size_t m = 0; m < modes.size(); ++m)
                val += (snap[m][o] * boxw[m]).real();
            out.at(b, s) = mu_s * val;
        }
    }
    return out;
}

}  // namespace rgas
