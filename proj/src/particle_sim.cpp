#include "rgas/particle_sim.hpp"

#include <cmath>
#include <stdexcept>

namespace rgas {

namespace {

// Relative travel per scan chunk. Within one chunk only the minimum image at
// the chunk start can come within eps: any other image starts with some
// component of magnitude >= 0.5 and moves by at most 0.35, so it stays at
// least 0.15 away, which is why eps < 0.15 is required.
constexpr double kChunkTravel = 0.35;
constexpr double kGrazeTol = 1e-12;

// Earliest contact root of the relative flight dx + s dv with the eps-sphere,
// s in (0, limit], scanned chunk by chunk so a single quadratic per chunk
// suffices. Returns a negative value when there is none. Also serves as the
// between-events overlap assertion: the first chunk sees the current
// separation of every nearby pair.
double contact_root(const Vec3& dx, const Vec3& dv, double eps, double limit, long* grazes) {
    double a = norm2(dv);
    if (a <= 0 || limit <= 0) return -1;
    double step = kChunkTravel / std::sqrt(a);
    double eps2 = eps * eps;
    double reach2 = (eps + kChunkTravel) * (eps + kChunkTravel);
    for (double s0 = 0; s0 < limit; s0 += step) {
        Vec3 w = min_image(dx + s0 * dv);
        double w2 = norm2(w);
        if (s0 == 0 && w2 < eps2 * (1.0 - 1e-9))
            throw std::logic_error("background sphere overlaps the tagged sphere");
        if (w2 > reach2) continue;
        double b = 2.0 * dot(w, dv);
        double c0 = w2 - eps2;
        double disc = b * b - 4.0 * a * c0;
        if (disc <= 0) continue;
        double sq = std::sqrt(disc);
        double root = (-b - sq) / (2.0 * a);
        if (root <= 0 || root > std::min(step, limit - s0)) continue;
        if (sq < 2.0 * eps * kGrazeTol) {  // radial closing speed sq/(2 eps)
            if (grazes) ++*grazes;
            continue;
        }
        return s0 + root;
    }
    return -1;
}

}  // namespace

void SimConfig::validate() const {
    if (N < 0) throw std::invalid_argument("sim config: negative particle count");
    if (!(T > 0)) throw std::invalid_argument("sim config: horizon must be positive");
    if (samples < 1) throw std::invalid_argument("sim config: need at least one sample");
    if (N == 0) {
        if (c != 0) throw std::invalid_argument("sim config: N = 0 needs c = 0");
        return;
    }
    if (!(eps > 0) || eps >= 0.15)
        throw std::invalid_argument("sim config: diameter must lie in (0, 0.15)");
    if (std::fabs(double(N) * eps * eps - c) > 1e-12 * c)
        throw std::invalid_argument("sim config: N eps^2 = c violated");
}

SimConfig make_sim_config(long N, double c, double T, std::uint64_t seed, Density f0, Density g0,
                          long samples) {
    SimConfig cfg;
    cfg.N = N;
    cfg.c = c;
    cfg.eps = N > 0 ? std::sqrt(c / double(N)) : 0.0;
    cfg.T = T;
    cfg.seed = seed;
    cfg.f0 = std::move(f0);
    cfg.g0 = std::move(g0);
    cfg.samples = samples;
    cfg.validate();
    return cfg;
}

SystemState init_configuration(const SimConfig& cfg, Rng& rng) {
    cfg.validate();
    double ball = double(cfg.N) * (4.0 / 3.0) * M_PI * cfg.eps * cfg.eps * cfg.eps;
    if (ball >= 0.5)
        throw std::invalid_argument("init: total exclusion volume too large for rejection");
    SystemState st;
    st.tagged = {rng.box01(), cfg.f0.sample(rng)};
    st.bg_x.reserve(cfg.N);
    st.bg_v.reserve(cfg.N);
    for (long i = 0; i < cfg.N; ++i) {
        Vec3 x = rng.box01();
        if (torus_dist(x, st.tagged.x) <= cfg.eps) {
            ++st.initial_overlaps;
            long tries = 0;
            do {
                if (++tries > 1000000)
                    throw std::runtime_error("init: placement rejection did not terminate");
                x = rng.box01();
            } while (torus_dist(x, st.tagged.x) <= cfg.eps);
        }
        st.bg_x.push_back(x);
        st.bg_v.push_back(cfg.g0.sample(rng));
    }
    return st;
}

std::optional<double> next_contact(const PhasePoint& tagged, const PhasePoint& bg, double eps,
                                   double horizon) {
    if (!(eps > 0) || eps >= 0.15)
        throw std::invalid_argument("next_contact: diameter must lie in (0, 0.15)");
    double s = contact_root(bg.x - tagged.x, bg.v - tagged.v, eps, horizon, nullptr);
    if (s < 0) return std::nullopt;
    return s;
}

EvolveResult evolve(SystemState& st, const SimConfig& cfg, std::vector<double> out_times) {
    cfg.validate();
    if (long(st.bg_x.size()) != cfg.N || st.bg_v.size() != st.bg_x.size())
        throw std::invalid_argument("evolve: state does not match the configured count");
    if (out_times.empty()) out_times = {cfg.T};
    for (std::size_t i = 0; i < out_times.size(); ++i) {
        bool ordered = i == 0 ? out_times[i] >= st.time : out_times[i] >= out_times[i - 1];
        if (!ordered || out_times[i] > cfg.T)
            throw std::invalid_argument("evolve: output times must be sorted within [t0, T]");
    }

    EvolveResult out;
    out.initial_overlaps = st.initial_overlaps;
    out.tree.root = st.tagged;
    out.tree.horizon = cfg.T;

    std::size_t ti = 0;
    auto emit_before = [&](double tcut, bool inclusive) {
        while (ti < out_times.size() &&
               (out_times[ti] < tcut || (inclusive && out_times[ti] == tcut))) {
            double s = out_times[ti] - st.time;
            out.traj.times.push_back(out_times[ti]);
            out.traj.states.push_back({wrap01(st.tagged.x + s * st.tagged.v), st.tagged.v});
            ++ti;
        }
    };

    long events = 0;
    while (st.time < cfg.T) {
        double best = cfg.T - st.time;
        long who = -1;
        for (long i = 0; i < cfg.N; ++i) {
            double s = contact_root(st.bg_x[i] - st.tagged.x, st.bg_v[i] - st.tagged.v, cfg.eps,
                                    best, &out.grazing_skips);
            if (s >= 0) {
                best = s;
                who = i;
            }
        }
        if (who < 0) break;

        double te = st.time + best;
        emit_before(te, false);
        st.tagged.x = wrap01(st.tagged.x + best * st.tagged.v);
        for (long i = 0; i < cfg.N; ++i) st.bg_x[i] = wrap01(st.bg_x[i] + best * st.bg_v[i]);
        st.time = te;

        Vec3 gap = min_image(st.bg_x[who] - st.tagged.x);
        double sep = norm(gap);
        if (std::fabs(sep - cfg.eps) > 1e-9)
            throw std::logic_error("evolve: predicted contact is off the collision sphere");
        Vec3 nu = gap / sep;
        out.tree.markers.push_back({te, nu, st.bg_v[who]});
        out.partners.push_back(who);
        auto [vt, vb] = collide(st.tagged.v, st.bg_v[who], nu);
        st.tagged.v = vt;
        st.bg_v[who] = vb;
        if (++events > 1000000) throw std::runtime_error("evolve: more than 1e6 collisions");
    }
    emit_before(cfg.T, true);
    return out;
}

EvolveResult simulate_sample(const SimConfig& cfg, std::uint64_t sample_index,
                             std::vector<double> out_times) {
    Rng rng(derive_seed(cfg.seed, sample_index));
    SystemState st = init_configuration(cfg, rng);
    return evolve(st, cfg, std::move(out_times));
}

PhaseHistogram empirical_marginal(const std::vector<TrajectorySample>& samples, double t, int nx,
                                  const VelocityGrid& grid) {
    if (samples.empty()) throw std::invalid_argument("empirical_marginal: no samples");
    PhaseHistogram h = PhaseHistogram::zeros(nx, grid);
    for (const auto& s : samples) {
        std::size_t k = 0;
        while (k < s.times.size() && std::fabs(s.times[k] - t) > 1e-12) ++k;
        if (k == s.times.size())
            throw std::invalid_argument("empirical_marginal: time was not recorded");
        h.add(s.states[k].x.x, s.states[k].v, 1.0);
    }
    for (double& m : h.mass) m /= double(samples.size());
    return h;
}

}  // namespace rgas
