#include "rgas/hydro.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rgas {

namespace {

// Conjugate gradients for L x = b in the mu-weighted inner product, with
// constants deflated from both sides (L is symmetric PSD there and strictly
// positive on the mean-zero subspace). Returns the mu-norm residual.
template <class Op>
double cg_solve(const Op& op, const std::vector<double>& b_in, std::vector<double>& x) {
    int n = op.size();
    const std::vector<double>& mu = op.mu;
    double mu_total = 0;
    for (int i = 0; i < n; ++i) mu_total += mu[i];

    auto dot_mu = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double acc = 0;
        for (int i = 0; i < n; ++i) acc += mu[i] * a[i] * c[i];
        return acc;
    };
    auto deflate = [&](std::vector<double>& v) {
        double mean = 0;
        for (int i = 0; i < n; ++i) mean += mu[i] * v[i];
        mean /= mu_total;
        for (int i = 0; i < n; ++i) v[i] -= mean;
    };

    std::vector<double> b = b_in;
    deflate(b);
    x.assign(n, 0.0);
    std::vector<double> r = b, p = r, q(n);
    double rs = dot_mu(r, r);
    double stop = 1e-10 * std::sqrt(dot_mu(b, b)) + 1e-300;
    for (int it = 0; it < 20 * n && std::sqrt(rs) > stop; ++it) {
        op.apply(p.data(), q.data());
        double alpha = rs / dot_mu(p, q);
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i], r[i] -= alpha * q[i];
        deflate(r);
        double rs2 = dot_mu(r, r);
        double beta = rs2 / rs;
        rs = rs2;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    deflate(x);
    op.apply(x.data(), q.data());
    double res = 0;
    for (int i = 0; i < n; ++i) {
        double d = q[i] - b[i];
        res += mu[i] * d * d;
    }
    return std::sqrt(res);
}

double component(const Vec3& v, int i) { return i == 0 ? v.x : (i == 1 ? v.y : v.z); }

}  // namespace

double solve_mean_zero(const CollisionOperator& op, const std::vector<double>& rhs,
                       std::vector<double>& chi) {
    return cg_solve(op, rhs, chi);
}

double solve_mean_zero(const FullCollisionOperator& op, const std::vector<double>& rhs,
                       std::vector<double>& chi) {
    return cg_solve(op, rhs, chi);
}

KappaResult compute_kappa(double beta, const VelocityGrid& grid) {
    KappaResult out;
    out.beta = beta;
    out.tail_mass = grid.maxwell_tail_mass(beta);
    if (grid.R < 5.0 / std::sqrt(beta))
        std::fprintf(stderr,
                     "warning: velocity cutoff %.3f below 5/sqrt(beta); Gaussian tail mass %.3e\n",
                     grid.R, out.tail_mass);

    if (grid.size() <= 3000) {
        // all three cell problems on the full lattice: honest tensor
        FullCollisionOperator op = build_full_collision_operator(beta, grid);
        int n = op.size();
        std::vector<std::vector<double>> chi(3);
        std::vector<double> b(n);
        for (int j = 0; j < 3; ++j) {
            for (int s = 0; s < n; ++s) b[s] = component(grid.node(s), j);
            double res = solve_mean_zero(op, b, chi[j]);
            out.residual = std::max(out.residual, res);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double acc = 0;
                for (int s = 0; s < n; ++s)
                    acc += op.mu[s] * component(grid.node(s), i) * chi[j][s];
                out.tensor[i][j] = acc;
            }
        out.tensor_full = true;
    } else {
        // chi_1 only; v_1 is invariant under the (y,z) dihedral group, so the
        // solve lives in orbit space, and the cubic covariance of the
        // assembly (unit-tested on small grids) carries the rest of the
        // diagonal
        CollisionOperator op = build_collision_operator(beta, grid);
        int n = op.size();
        std::vector<double> b(n), chi;
        for (int o = 0; o < n; ++o) b[o] = op.q.rep_node(o).x;
        out.residual = solve_mean_zero(op, b, chi);
        double acc = 0;
        for (int o = 0; o < n; ++o) acc += op.mu[o] * b[o] * chi[o];
        out.tensor[0][0] = out.tensor[1][1] = out.tensor[2][2] = acc;
        out.tensor_full = false;
    }
    if (out.residual > 1e-8) throw std::runtime_error("kappa cell problem did not converge");
    out.kappa = (out.tensor[0][0] + out.tensor[1][1] + out.tensor[2][2]) / 3.0;
    if (out.kappa <= 0) throw std::runtime_error("nonpositive diffusion parameter");
    return out;
}

HeatSolution heat_solve(std::vector<std::complex<double>> rho0_modes, double kappa,
                        std::vector<double> times) {
    if (kappa <= 0) throw std::invalid_argument("heat solve needs kappa > 0");
    if (rho0_modes.empty()) throw std::invalid_argument("no initial modes");
    HeatSolution h;
    h.rho0 = std::move(rho0_modes);
    h.kappa = kappa;
    h.times = std::move(times);
    return h;
}

std::complex<double> HeatSolution::mode(std::size_t time_index, int k) const {
    if (time_index >= times.size()) throw std::out_of_range("no heat output at that index");
    if (k < 0 || std::size_t(k) >= rho0.size()) return {0.0, 0.0};
    double w = 2.0 * M_PI * k;
    return rho0[k] * std::exp(-kappa * w * w * times[time_index]);
}

std::vector<double> HeatSolution::boxes(std::size_t time_index, int nx) const {
    std::vector<double> out(nx, 0.0);
    for (int b = 0; b < nx; ++b) {
        double acc = mode(time_index, 0).real() / nx;
        for (int k = 1; k < int(rho0.size()); ++k) {
            std::complex<double> i2pik(0.0, 2.0 * M_PI * k);
            std::complex<double> boxw = 2.0 * (std::exp(i2pik * (double(b) + 1.0) / double(nx)) -
                                               std::exp(i2pik * double(b) / double(nx))) /
                                        i2pik;
            acc += (mode(time_index, k) * boxw).real();
        }
        out[b] = acc;
    }
    return out;
}

DiffusiveComparison diffusive_compare(const KineticSolution& kinetic, const HeatSolution& heat,
                                      double beta, double c, int nx) {
    if (kinetic.times.size() != heat.times.size())
        throw std::invalid_argument("kinetic and heat output grids differ in length");
    for (std::size_t i = 0; i < heat.times.size(); ++i)
        if (std::fabs(kinetic.times[i] - c * heat.times[i]) > 1e-9 * std::max(1.0, c * heat.times[i]))
            throw std::invalid_argument("kinetic solution was not run at the rescaled times c*tau");

    if (std::fabs(kinetic.op.beta - beta) > 1e-12)
        throw std::invalid_argument("kinetic solution was run at a different temperature");

    const QuotientGrid& q = kinetic.op.q;
    const VelocityGrid& g = q.grid;
    std::vector<double> eq = g.maxwell_cell_masses(beta);

    DiffusiveComparison out;
    out.velocity_tail_mass = g.maxwell_tail_mass(beta);
    for (std::size_t ti = 0; ti < heat.times.size(); ++ti) {
        PhaseHistogram kin = kinetic.histogram(ti, nx);
        std::vector<double> rho_box = heat.boxes(ti, nx);
        double gap = 0;
        for (int b = 0; b < nx; ++b) {
            for (int s = 0; s < g.size(); ++s)
                gap += std::fabs(kin.at(b, s) - rho_box[b] * eq[s]);
            gap += std::fabs(kin.at(b, g.size()));  // kinetic overflow vs zero
        }
        out.tau.push_back(heat.times[ti]);
        out.l1_gap.push_back(gap);
    }
    return out;
}

}  // namespace rgas
