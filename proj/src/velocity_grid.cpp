#include "rgas/velocity_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace rgas {

VelocityGrid VelocityGrid::make(double R, int n, bool ball_mask) {
    if (R <= 0 || n < 1) throw std::invalid_argument("velocity grid needs R > 0, n >= 1");
    VelocityGrid g;
    g.R = R;
    g.n = n;
    g.h = 2.0 * R / n;
    g.ball_mask = ball_mask;
    g.slot_of.assign(std::size_t(n) * n * n, -1);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Vec3 v{g.axis(i), g.axis(j), g.axis(k)};
                if (ball_mask && norm(v) > R) continue;
                g.slot_of[g.flat(i, j, k)] = std::int32_t(g.flat_of.size());
                g.flat_of.push_back(g.flat(i, j, k));
            }
    return g;
}

namespace {

// 1D Gaussian mass of cell [a,b] under density sqrt(beta/2pi) exp(-beta u^2/2)
double gauss_cell(double beta, double a, double b) {
    double s = std::sqrt(beta / 2.0);
    return 0.5 * (std::erf(b * s) - std::erf(a * s));
}

}  // namespace

std::vector<double> VelocityGrid::maxwell_cell_masses(double beta) const {
    std::vector<double> axis_mass(n);
    for (int i = 0; i < n; ++i)
        axis_mass[i] = gauss_cell(beta, -R + i * h, -R + (i + 1) * h);
    std::vector<double> m(size());
    double total = 0;
    for (int s = 0; s < size(); ++s) {
        int f = flat_of[s];
        m[s] = axis_mass[f / (n * n)] * axis_mass[(f / n) % n] * axis_mass[f % n];
        total += m[s];
    }
    for (auto& x : m) x /= total;
    return m;
}

double VelocityGrid::maxwell_tail_mass(double beta) const {
    std::vector<double> axis_mass(n);
    for (int i = 0; i < n; ++i)
        axis_mass[i] = gauss_cell(beta, -R + i * h, -R + (i + 1) * h);
    double covered = 0;
    for (int s = 0; s < size(); ++s) {
        int f = flat_of[s];
        covered += axis_mass[f / (n * n)] * axis_mass[(f / n) % n] * axis_mass[f % n];
    }
    return 1.0 - covered;
}

int VelocityGrid::deposit(const Vec3& v, std::int32_t* slots, double* w) const {
    double t[3] = {(v.x + R) / h - 0.5, (v.y + R) / h - 0.5, (v.z + R) / h - 0.5};
    int base[3];
    double f[3];
    for (int a = 0; a < 3; ++a) {
        base[a] = int(std::floor(t[a]));
        f[a] = t[a] - base[a];
    }
    int count = 0;
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
            for (int dk = 0; dk < 2; ++dk) {
                int i = base[0] + di, j = base[1] + dj, k = base[2] + dk;
                if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k >= n) continue;
                std::int32_t s = slot_of[flat(i, j, k)];
                if (s < 0) continue;
                double wt = (di ? f[0] : 1 - f[0]) * (dj ? f[1] : 1 - f[1]) *
                            (dk ? f[2] : 1 - f[2]);
                if (wt == 0.0) continue;
                slots[count] = s;
                w[count] = wt;
                ++count;
            }
    return count;
}

std::int32_t VelocityGrid::cell_of(const Vec3& v) const {
    double t[3] = {(v.x + R) / h, (v.y + R) / h, (v.z + R) / h};
    int idx[3];
    for (int a = 0; a < 3; ++a) {
        idx[a] = int(std::floor(t[a]));
        if (idx[a] < 0 || idx[a] >= n) return -1;
    }
    return slot_of[flat(idx[0], idx[1], idx[2])];
}

QuotientGrid QuotientGrid::make(VelocityGrid g) {
    QuotientGrid q;
    q.grid = std::move(g);
    const VelocityGrid& gr = q.grid;
    int n = gr.n;
    q.orbit_of.assign(gr.size(), -1);
    for (int s = 0; s < gr.size(); ++s) {
        if (q.orbit_of[s] >= 0) continue;
        int f = gr.flat_of[s];
        int i = f / (n * n), j = (f / n) % n, k = f % n;
        std::int32_t id = std::int32_t(q.rep_slot.size());
        q.rep_slot.push_back(s);
        q.orbit_size.push_back(0);
        // dihedral images of the (j,k) pair: sign flips and the swap
        int jj[2] = {j, n - 1 - j}, kk[2] = {k, n - 1 - k};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                for (int sw = 0; sw < 2; ++sw) {
                    int pj = sw ? kk[b] : jj[a];
                    int pk = sw ? jj[a] : kk[b];
                    std::int32_t slot = gr.slot_of[gr.flat(i, pj, pk)];
                    if (slot >= 0 && q.orbit_of[slot] < 0) {
                        q.orbit_of[slot] = id;
                        ++q.orbit_size[id];
                    }
                }
    }
    return q;
}

std::vector<double> QuotientGrid::expand(const std::vector<double>& q) const {
    if (int(q.size()) != orbits()) throw std::invalid_argument("orbit vector size mismatch");
    std::vector<double> full(grid.size());
    for (int s = 0; s < grid.size(); ++s) full[s] = q[orbit_of[s]];
    return full;
}

std::vector<double> QuotientGrid::restrict_invariant(const std::vector<double>& full) const {
    if (int(full.size()) != grid.size()) throw std::invalid_argument("slot vector size mismatch");
    std::vector<double> q(orbits());
    for (int o = 0; o < orbits(); ++o) q[o] = full[rep_slot[o]];
    return q;
}

}  // namespace rgas
