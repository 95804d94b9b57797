#include "rgas/collision_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "rgas/density.hpp"
#include "rgas/kinetics.hpp"

namespace rgas {

namespace {

// Flow out of a unit-density source at v into the active cells: quadrature
// over background cells (exact Gaussian masses) and sphere directions, with
// the post-collision velocity v' = v - ((v-u).nu) nu deposited trilinearly.
// The design weights are renormalised per pair so the total rate equals the
// exact pi |v-u|; a fixed 26-point design misses that integral by several
// percent in a direction-dependent way (the integrand has a kink on the
// great circle (v-u).nu = 0), and that error would not shrink under lattice
// refinement. The normaliser is invariant under the cube group, so the
// renormalisation preserves the covariance the quotient assembly relies on.
// Background cells lighter than the cutoff cannot matter at any tolerance we
// test and are skipped.
void assemble_row(const VelocityGrid& g, const std::vector<double>& mass,
                  const SphereDesign& design, const Vec3& v, std::vector<double>& row) {
    std::int32_t slots[8];
    double w[8];
    const std::size_t nd = design.size();
    std::vector<double> a(nd);
    for (int m = 0; m < g.size(); ++m) {
        double b = mass[m];
        if (b < 1e-20) continue;
        Vec3 rel = v - g.node(m);
        double design_sum = 0;
        for (std::size_t k = 0; k < nd; ++k) {
            double ak = dot(rel, design.nu[k]);
            a[k] = ak > 0 ? ak : 0.0;
            design_sum += design.w[k] * a[k];
        }
        if (design_sum <= 0) continue;
        double scale = 0.25 * norm(rel) / design_sum;  // pi |rel| / (4 pi design_sum)
        for (std::size_t k = 0; k < nd; ++k) {
            if (a[k] <= 0) continue;
            double rate = 4.0 * M_PI * design.w[k] * a[k] * b * scale;
            Vec3 vp = v - a[k] * design.nu[k];
            int c = g.deposit(vp, slots, w);
            for (int t = 0; t < c; ++t) row[slots[t]] += rate * w[t];
        }
    }
}

// Symmetrise the assembled flow (detailed balance), then apply a symmetric
// Sinkhorn scaling S <- D S D so that every row sums to exactly mu_i
// lambda(v_i) with the closed-form rate. The quadrature row sums already
// agree with lambda to O(h^2); the scaling removes that residual, which buys
// L1 = 0 exactly, a loss rate that is literally multiplication by lambda(v),
// and exact stationarity of the cell masses, all without disturbing symmetry
// or positivity. The scaling is unique, so it commutes with the quotient.
template <class Op>
void finalize(Op& op, Eigen::MatrixXd&& flow, const std::vector<double>& lam) {
    op.S = 0.5 * (flow + flow.transpose());
    int n = op.size();
    Eigen::VectorXd target(n);
    for (int i = 0; i < n; ++i) target[i] = op.mu[i] * lam[i];
    Eigen::VectorXd dv = Eigen::VectorXd::Ones(n);
    double worst = 1;
    for (int iter = 0; iter < 1000; ++iter) {
        Eigen::VectorXd s = op.S * dv;
        worst = 0;
        for (int i = 0; i < n; ++i) {
            double cur = dv[i] * s[i];
            if (cur <= 0) throw std::runtime_error("collision flow matrix has an isolated cell");
            worst = std::max(worst, std::fabs(cur / target[i] - 1.0));
            dv[i] *= std::sqrt(target[i] / cur);
        }
        if (worst < 1e-14) break;
    }
    if (worst >= 1e-12) throw std::runtime_error("flow rescaling did not converge");
    op.S = dv.asDiagonal() * op.S * dv.asDiagonal();
    op.d.assign(n, 0.0);
    op.lambda_max = 0;
    for (int i = 0; i < n; ++i) {
        op.d[i] = target[i];
        // Rayleigh: <phi,L phi>_mu <= 2 max lambda |phi|_mu^2
        op.lambda_max = std::max(op.lambda_max, 2.0 * lam[i]);
    }
}

}  // namespace

CollisionOperator build_collision_operator(double beta, const VelocityGrid& grid,
                                           const SphereDesign& design) {
    CollisionOperator op;
    op.q = QuotientGrid::make(grid);
    op.beta = beta;
    const VelocityGrid& g = op.q.grid;
    std::vector<double> mass = g.maxwell_cell_masses(beta);

    int nOrb = op.q.orbits();
    op.mu.assign(nOrb, 0.0);
    for (int o = 0; o < nOrb; ++o)
        op.mu[o] = op.q.orbit_size[o] * mass[op.q.rep_slot[o]];

    Density background = Density::maxwellian(beta);
    std::vector<double> lam(nOrb);
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(nOrb, nOrb);
    std::vector<double> row(g.size());
    for (int o = 0; o < nOrb; ++o) {
        std::fill(row.begin(), row.end(), 0.0);
        assemble_row(g, mass, design, op.q.rep_node(o), row);
        double scale = op.mu[o];  // orbit_size * mu_rep
        // j == rep is a self-pair of the full matrix and never acts; flows to
        // the rest of the orbit are genuine and stay on the quotient diagonal
        // so the row-sum constraint matches the full operator's
        for (int j = 0; j < g.size(); ++j)
            if (row[j] != 0.0 && j != op.q.rep_slot[o]) flow(o, op.q.orbit_of[j]) += scale * row[j];
        lam[o] = collision_rate(background, op.q.rep_node(o));
    }
    finalize(op, std::move(flow), lam);
    return op;
}

FullCollisionOperator build_full_collision_operator(double beta, const VelocityGrid& grid,
                                                    const SphereDesign& design) {
    FullCollisionOperator op;
    op.grid = grid;
    op.beta = beta;
    op.mu = grid.maxwell_cell_masses(beta);

    int n = grid.size();
    Density background = Density::maxwellian(beta);
    std::vector<double> lam(n);
    Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(n, n);
    std::vector<double> row(n);
    for (int i = 0; i < n; ++i) {
        std::fill(row.begin(), row.end(), 0.0);
        assemble_row(grid, op.mu, design, grid.node(i), row);
        for (int j = 0; j < n; ++j)
            if (row[j] != 0.0 && j != i) flow(i, j) = op.mu[i] * row[j];
        lam[i] = collision_rate(background, grid.node(i));
    }
    finalize(op, std::move(flow), lam);
    return op;
}

namespace {

template <class Op>
void apply_impl(const Op& op, const double* h, double* out) {
    int n = op.size();
    Eigen::Map<const Eigen::VectorXd> hv(h, n);
    Eigen::VectorXd sh = op.S * hv;
    for (int i = 0; i < n; ++i) out[i] = (op.d[i] * h[i] - sh[i]) / op.mu[i];
}

}  // namespace

void CollisionOperator::apply(const double* h, double* out) const { apply_impl(*this, h, out); }
void FullCollisionOperator::apply(const double* h, double* out) const { apply_impl(*this, h, out); }

std::vector<double> CollisionOperator::apply(const std::vector<double>& h) const {
    std::vector<double> out(h.size());
    apply(h.data(), out.data());
    return out;
}

std::vector<double> FullCollisionOperator::apply(const std::vector<double>& h) const {
    std::vector<double> out(h.size());
    apply(h.data(), out.data());
    return out;
}

double CollisionOperator::dirichlet_form(const std::vector<double>& phi) const {
    // <phi, L phi>_mu = 1/2 sum_{ij} S_ij (phi_i - phi_j)^2
    double acc = 0;
    int n = size();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double df = phi[i] - phi[j];
            acc += S(i, j) * df * df;
        }
    return acc;
}

}  // namespace rgas
