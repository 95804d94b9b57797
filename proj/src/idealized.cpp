#include "rgas/idealized.hpp"

#include <cmath>
#include <stdexcept>

#include "rgas/kinetics.hpp"

namespace rgas {

namespace {

double default_envelope_shift(const Density& g0) {
    // lambda(v) <= pi (|v| + E|vbar|); five per-component deviations of slack
    // on top keeps the domination strict with room to spare
    double spread = g0.is_maxwellian() ? 1.0 / std::sqrt(g0.beta)
                                       : std::sqrt(g0.second_moment() / 3.0);
    return g0.mean_speed() + 5.0 * spread;
}

// draw from the speed-size-biased law, density proportional to |u| g0(u)
Vec3 sample_size_biased(const Density& g0, Rng& rng) {
    if (g0.is_maxwellian()) {
        // biased speed density u^3 exp(-beta u^2/2): a chi with 4 degrees of
        // freedom over sqrt(beta), direction uniform
        double s = 1.0 / std::sqrt(g0.beta);
        double a = rng.gauss(), b = rng.gauss(), c = rng.gauss(), d = rng.gauss();
        return (s * std::sqrt(a * a + b * b + c * c + d * d)) * rng.sphere();
    }
    if (g0.kind == DensityKind::table) {
        double top = 0;
        for (const auto& u : *g0.samples) top = std::max(top, norm(u));
        if (top == 0) return (*g0.samples)[0];
        for (;;) {
            Vec3 u = g0.sample(rng);
            if (rng.u01() * top < norm(u)) return u;
        }
    }
    throw std::invalid_argument("cannot sample a callable density");
}

}  // namespace

PostCollisionDraw sample_post_collision(const Vec3& v, const Density& g0, Rng& rng, double s0) {
    if (s0 < 0) s0 = 0.5 * g0.mean_speed();
    // The acceptance ratio (w.nu)_+ / (|v| + |vbar| + s0) is only a valid
    // rejection step if the proposal already carries the denominator: (w.nu)_+
    // alone is unbounded over vbar, and proposing from plain g0 would leave
    // the accepted law tilted by 1/(|v| + |vbar| + s0) (it visibly detunes
    // Maxwellian stationarity). So vbar is proposed from the mixture
    // proportional to g0(vbar) (|v| + |vbar| + s0), whose size-biased part is
    // exactly samplable, and the tilt cancels.
    double beta1 = g0.mean_speed();
    double base = norm(v) + s0;
    PostCollisionDraw out;
    for (int attempt = 0; attempt < 100000; ++attempt) {
        ++out.proposals;
        Vec3 vbar = rng.u01() * (base + beta1) < base ? g0.sample(rng) : sample_size_biased(g0, rng);
        Vec3 nu = rng.sphere();
        double num = dot(v - vbar, nu);
        double den = norm(v) + norm(vbar) + s0;
        if (num <= 0 || den <= 0) continue;
        if (num > den) throw std::runtime_error("post-collision rejection bound violated");
        if (rng.u01() * den < num) {
            out.nu = nu;
            out.v_bg = vbar;
            return out;
        }
    }
    throw std::runtime_error("post-collision sampler: 1e5 consecutive rejections");
}

IdealizedSample sample_idealized_tree(const JumpProcessConfig& cfg, Rng& rng) {
    if (cfg.c < 0 || cfg.T <= 0) throw std::invalid_argument("need c >= 0 and T > 0");
    double shift = cfg.envelope_shift >= 0 ? cfg.envelope_shift : default_envelope_shift(cfg.g0);

    IdealizedSample out;
    out.tree.horizon = cfg.T;
    out.tree.root.x = rng.box01();
    out.tree.root.v = cfg.f0.sample(rng);

    Vec3 x = out.tree.root.x;
    Vec3 v = out.tree.root.v;
    double t = 0;       // current time
    double t_leg = 0;   // start of the current flight leg (x is at t_leg)
    double factor = 1;  // envelope multiplier, doubled on violation

    double rate = cfg.c * collision_rate(cfg.g0, v);
    double envelope = factor * cfg.c * M_PI * (norm(v) + shift);
    while (rate > envelope) {
        ++out.envelope_violations;
        factor *= 2;
        envelope = factor * cfg.c * M_PI * (norm(v) + shift);
    }

    if (envelope > 0) {
        for (;;) {
            t += -std::log(1.0 - rng.u01()) / envelope;
            if (t >= cfg.T) break;
            ++out.clock_proposals;
            if (rng.u01() * envelope >= rate) continue;  // thinned away

            PostCollisionDraw draw = sample_post_collision(v, cfg.g0, rng, cfg.post_shift);
            out.gain_proposals += draw.proposals;
            out.tree.markers.push_back({t, draw.nu, draw.v_bg});

            x = wrap01(x + (t - t_leg) * v);
            t_leg = t;
            v = collide(v, draw.v_bg, draw.nu).first;

            rate = cfg.c * collision_rate(cfg.g0, v);
            envelope = factor * cfg.c * M_PI * (norm(v) + shift);
            while (rate > envelope) {
                ++out.envelope_violations;
                factor *= 2;
                envelope = factor * cfg.c * M_PI * (norm(v) + shift);
            }
        }
    }
    out.final_state.x = wrap01(x + (cfg.T - t_leg) * v);
    out.final_state.v = v;
    return out;
}

}  // namespace rgas
