#include "rgas/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rgas/bounds.hpp"
#include "rgas/boltzmann_grid.hpp"
#include "rgas/hydro.hpp"
#include "rgas/idealized.hpp"
#include "rgas/particle_sim.hpp"
#include "rgas/rng.hpp"
#include "rgas/tree.hpp"

namespace rgas {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
    char* end = nullptr;
    double v = std::strtod(raw.c_str(), &end);
    if (end == raw.c_str() || *end != '\0')
        throw std::invalid_argument("config key '" + key + "': not a number: " + raw);
    return v;
}

long parse_long(const std::string& key, const std::string& raw) {
    char* end = nullptr;
    long v = std::strtol(raw.c_str(), &end, 10);
    if (end == raw.c_str() || *end != '\0')
        throw std::invalid_argument("config key '" + key + "': not an integer: " + raw);
    return v;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::vector<std::string> parts;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

}  // namespace

Config Config::parse(std::istream& is) {
    Config c;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
            val = val.substr(1, val.size() - 2);
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                     ": empty key");
        c.kv_[section.empty() ? key : section + "." + key] = val;
    }
    return c;
}

Config Config::from_string(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

Config Config::load(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw std::invalid_argument("cannot open config file " + file.string());
    return parse(is);
}

std::string Config::get_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("config key '" + key + "' is required");
    return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return parse_double(key, get_string(key)); }

double Config::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_double(key, it->second);
}

long Config::get_long(const std::string& key) const { return parse_long(key, get_string(key)); }

long Config::get_long(const std::string& key, long fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : parse_long(key, it->second);
}

std::vector<double> Config::get_list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& p : split_list(get_string(key))) out.push_back(parse_double(key, p));
    if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
}

std::vector<long> Config::get_long_list(const std::string& key) const {
    std::vector<long> out;
    for (const std::string& p : split_list(get_string(key))) out.push_back(parse_long(key, p));
    if (out.empty()) throw std::invalid_argument("config key '" + key + "': empty list");
    return out;
}

std::string Config::canonical() const {
    std::string out;
    for (const auto& [k, v] : kv_) {
        if (k == "workers" || k == "output_dir") continue;
        out += k;
        out += " = ";
        out += v;
        out += "\n";
    }
    return out;
}

void Table::add(std::vector<double> row) {
    if (row.size() != columns.size())
        throw std::invalid_argument("table row width does not match the header");
    rows.push_back(std::move(row));
}

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_g17(row[i]);
        }
        out += '\n';
    }
    return out;
}

Table csv_parse(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("csv: missing header");
    std::vector<std::string> cols;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) cols.push_back(cell);
    Table t(std::move(cols));
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        while (std::getline(rs, cell, ',')) row.push_back(parse_double("csv cell", cell));
        t.add(std::move(row));
    }
    return t;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

ExperimentKind experiment_kind(const std::string& name) {
    if (name == "simulate") return ExperimentKind::simulate;
    if (name == "idealized") return ExperimentKind::idealized;
    if (name == "compare" || name == "bg-convergence") return ExperimentKind::compare;
    if (name == "tree-stats") return ExperimentKind::tree_stats;
    if (name == "bound-audit") return ExperimentKind::bound_audit;
    if (name == "plan") return ExperimentKind::plan;
    if (name == "kappa") return ExperimentKind::kappa;
    if (name == "heat-limit") return ExperimentKind::heat_limit;
    throw std::invalid_argument("unknown experiment kind: " + name);
}

std::string experiment_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::simulate: return "simulate";
        case ExperimentKind::idealized: return "idealized";
        case ExperimentKind::compare: return "compare";
        case ExperimentKind::tree_stats: return "tree-stats";
        case ExperimentKind::bound_audit: return "bound-audit";
        case ExperimentKind::plan: return "plan";
        case ExperimentKind::kappa: return "kappa";
        case ExperimentKind::heat_limit: return "heat-limit";
    }
    return "?";
}

namespace {

struct Emitter {
    std::filesystem::path dir;
    std::vector<std::string> files;

    void text(const std::string& name, const std::string& body) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        os << body;
        if (!os) throw std::runtime_error("write failed for " + (dir / name).string());
        files.push_back(name);
    }
    void csv(const std::string& name, const Table& t) { text(name, to_csv(t)); }
    void trees(const std::string& name, const std::vector<CollisionTree>& corpus) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
        write_ndjson(os, corpus);
        if (!os) throw std::runtime_error("write failed for " + (dir / name).string());
        files.push_back(name);
    }
};

struct Checker {
    std::vector<std::string>* failures;
    void expect(bool ok, const std::string& what) {
        if (!ok) failures->push_back(what);
    }
};

// tagged state replayed from a tree, velocity right-continuous at markers
PhasePoint tree_state_at(const CollisionTree& tree, double t) {
    Vec3 x = tree.root.x, v = tree.root.v;
    double cur = 0;
    for (const CollisionMarker& m : tree.markers) {
        if (m.t > t) break;
        x = wrap01(x + (m.t - cur) * v);
        v = collide(v, m.v_in, m.nu).first;
        cur = m.t;
    }
    return {wrap01(x + (t - cur) * v), v};
}

// analytic overestimate of the lattice's largest collision rate, for a safe
// default solver step
double safe_dt(double c, double g_beta, double R, double T) {
    double top = collision_rate_maxwellian_closed(g_beta, R * std::sqrt(3.0));
    return std::min(0.45 / (c * top), T / 4.0);
}

Density maxwellian_from(const Config& c, const std::string& key, double fallback) {
    return Density::maxwellian(c.get_double(key, fallback));
}

std::vector<double> sorted_times(const Config& c, double T) {
    std::vector<double> times = c.has("times") ? c.get_list("times") : std::vector<double>{T};
    for (double t : times)
        if (t < 0 || t > T) throw std::invalid_argument("config: times must lie in [0, T]");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("config: times must be sorted");
    return times;
}

void marginal_csv(Emitter& em, Checker& chk, const std::string& name,
                  const std::vector<TrajectorySample>& trajs, const std::vector<double>& times,
                  int nx, const VelocityGrid& grid) {
    Table t({"t", "box", "slot", "mass"});
    for (double tau : times) {
        PhaseHistogram h = empirical_marginal(trajs, tau, nx, grid);
        chk.expect(std::fabs(h.total() - 1.0) < 1e-12, name + ": marginal mass is not 1");
        for (int b = 0; b < h.nx; ++b)
            for (int s = 0; s <= grid.size(); ++s) t.add({tau, double(b), double(s), h.at(b, s)});
    }
    em.csv(name, t);
}

void run_simulate(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    SimConfig sim = make_sim_config(c.get_long("N"), c.get_double("c"), c.get_double("T"),
                                    spec.seed, maxwellian_from(c, "f0_beta", 1.0),
                                    maxwellian_from(c, "g0_beta", 1.0), c.get_long("samples"));
    std::vector<double> times = sorted_times(c, sim.T);
    VelocityGrid grid =
        VelocityGrid::make(c.get_double("grid_R", 4.5), int(c.get_long("grid_n", 9)));
    int nx = int(c.get_long("nx", 4));

    struct Piece {
        CollisionTree tree;
        TrajectorySample traj;
    };
    std::vector<Piece> pieces = parallel_map<Piece>(sim.samples, spec.workers, [&](long i) {
        EvolveResult r = simulate_sample(sim, std::uint64_t(i), times);
        return Piece{std::move(r.tree), std::move(r.traj)};
    });

    // replay spot check: the emitted tree reproduces the recorded trajectory
    for (long i = 0; i < std::min<long>(10, sim.samples); ++i) {
        const Piece& p = pieces[i];
        bool ok = true;
        for (std::size_t k = 0; k < p.traj.times.size(); ++k) {
            PhasePoint q = tree_state_at(p.tree, p.traj.times[k]);
            ok = ok && torus_dist(q.x, p.traj.states[k].x) < 1e-8 &&
                 norm(q.v - p.traj.states[k].v) < 1e-8;
        }
        chk.expect(ok, "simulate: tree replay mismatch at sample " + std::to_string(i));
    }

    std::vector<CollisionTree> corpus;
    std::vector<TrajectorySample> trajs;
    corpus.reserve(pieces.size());
    trajs.reserve(pieces.size());
    for (Piece& p : pieces) {
        corpus.push_back(std::move(p.tree));
        trajs.push_back(std::move(p.traj));
    }
    em.trees("trees.ndjson", corpus);
    marginal_csv(em, chk, "marginal.csv", trajs, times, nx, grid);
}

void run_idealized(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    JumpProcessConfig jp;
    jp.c = c.get_double("c");
    jp.T = c.get_double("T");
    jp.f0 = maxwellian_from(c, "f0_beta", 1.0);
    jp.g0 = maxwellian_from(c, "g0_beta", 1.0);
    long samples = c.get_long("samples");
    std::vector<double> times = sorted_times(c, jp.T);
    VelocityGrid grid =
        VelocityGrid::make(c.get_double("grid_R", 4.5), int(c.get_long("grid_n", 9)));
    int nx = int(c.get_long("nx", 4));

    struct Piece {
        CollisionTree tree;
        PhasePoint final_state;
        long violations = 0;
    };
    std::vector<Piece> pieces = parallel_map<Piece>(samples, spec.workers, [&](long i) {
        Rng rng(derive_seed(spec.seed, std::uint64_t(i)));
        IdealizedSample s = sample_idealized_tree(jp, rng);
        return Piece{std::move(s.tree), s.final_state, s.envelope_violations};
    });

    long violations = 0;
    for (const Piece& p : pieces) violations += p.violations;
    chk.expect(violations == 0, "idealized: clock envelope was violated");
    for (long i = 0; i < std::min<long>(10, samples); ++i) {
        PhasePoint q = tree_state_at(pieces[i].tree, jp.T);
        chk.expect(torus_dist(q.x, pieces[i].final_state.x) < 1e-9 &&
                       norm(q.v - pieces[i].final_state.v) < 1e-9,
                   "idealized: tree replay mismatch at sample " + std::to_string(i));
    }

    std::vector<CollisionTree> corpus;
    std::vector<TrajectorySample> trajs;
    corpus.reserve(pieces.size());
    trajs.reserve(pieces.size());
    for (Piece& p : pieces) {
        TrajectorySample tr;
        for (double t : times) {
            tr.times.push_back(t);
            tr.states.push_back(tree_state_at(p.tree, t));
        }
        trajs.push_back(std::move(tr));
        corpus.push_back(std::move(p.tree));
    }
    em.trees("trees.ndjson", corpus);
    marginal_csv(em, chk, "marginal.csv", trajs, times, nx, grid);
}

void run_compare(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    std::vector<long> Ns = c.get_long_list("N_list");
    double cc = c.get_double("c");
    double T = c.get_double("T");
    long samples = c.get_long("samples");
    double f_beta = c.get_double("f0_beta", 1.0);
    double g_beta = c.get_double("g0_beta", 1.0);
    double R = c.get_double("grid_R", 4.5);
    int n = int(c.get_long("grid_n", 11));
    int nx = int(c.get_long("nx", 1));
    double width = c.get_double("shell_width", 0.5);

    VelocityGrid grid = VelocityGrid::make(R, n);
    double dt = c.get_double("dt", safe_dt(cc, g_beta, R, T));
    KineticSolution sol =
        grid_boltzmann_solve(Density::maxwellian(f_beta), Density::maxwellian(g_beta), cc, grid,
                             {1.0}, dt, {T});
    std::vector<double> ref = shell_masses(sol.histogram(0, nx), width);

    Table t({"N", "eps", "samples", "l1_shell"});
    std::vector<double> gaps;
    for (long N : Ns) {
        SimConfig sim = make_sim_config(N, cc, T, spec.seed, Density::maxwellian(f_beta),
                                        Density::maxwellian(g_beta), samples);
        std::vector<TrajectorySample> trajs =
            parallel_map<TrajectorySample>(samples, spec.workers, [&](long i) {
                return simulate_sample(sim, std::uint64_t(i), {T}).traj;
            });
        std::vector<double> emp = shell_masses(empirical_marginal(trajs, T, nx, grid), width);
        double l1 = 0;
        for (std::size_t k = 0; k < ref.size(); ++k) l1 += std::fabs(emp[k] - ref[k]);
        gaps.push_back(l1);
        t.add({double(N), sim.eps, double(samples), l1});
    }
    em.csv("convergence.csv", t);
    for (std::size_t i = 1; i < gaps.size(); ++i)
        chk.expect(gaps[i] < gaps[i - 1], "compare: L1 gap did not shrink from N=" +
                                              std::to_string(Ns[i - 1]) + " to N=" +
                                              std::to_string(Ns[i]));
}

void run_tree_stats(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    std::string source = c.get_string("source", "particle");
    double cc = c.get_double("c");
    double T = c.get_double("T");
    long samples = c.get_long("samples");
    Density f0 = maxwellian_from(c, "f0_beta", 1.0);
    Density g0 = maxwellian_from(c, "g0_beta", 1.0);

    GoodTreeCaps caps;
    caps.V_cap = c.get_double("V_cap", 8.0);
    KineticConstants consts = KineticConstants::compute(f0, g0, caps.V_cap);
    double ceiling = expected_collisions_bound(consts, cc, T);
    caps.M_cap = c.get_double("M_cap", 2.0 * ceiling);
    caps.graze_tol = c.get_double("graze_tol", 1e-9);

    std::vector<CollisionTree> corpus;
    std::vector<bool> recollided;
    if (source == "particle") {
        long N = c.get_long("N");
        SimConfig sim = make_sim_config(N, cc, T, spec.seed, f0, g0, samples);
        caps.eps = sim.eps;
        struct Piece {
            CollisionTree tree;
            bool again = false;
        };
        std::vector<Piece> pieces = parallel_map<Piece>(samples, spec.workers, [&](long i) {
            EvolveResult r = simulate_sample(sim, std::uint64_t(i));
            std::set<long> seen;
            bool again = false;
            for (long p : r.partners) again = again || !seen.insert(p).second;
            return Piece{std::move(r.tree), again};
        });
        for (Piece& p : pieces) {
            corpus.push_back(std::move(p.tree));
            recollided.push_back(p.again);
        }
    } else if (source == "idealized") {
        caps.eps = c.get_double("eps", 0.01);
        JumpProcessConfig jp;
        jp.c = cc;
        jp.T = T;
        jp.f0 = f0;
        jp.g0 = g0;
        corpus = parallel_map<CollisionTree>(samples, spec.workers, [&](long i) {
            Rng rng(derive_seed(spec.seed, std::uint64_t(i)));
            return sample_idealized_tree(jp, rng).tree;
        });
        recollided.assign(corpus.size(), false);
    } else {
        throw std::invalid_argument("tree-stats: source must be particle or idealized");
    }

    std::size_t maxn = 0;
    for (const CollisionTree& tr : corpus) maxn = std::max(maxn, tr.n());
    std::vector<long> hist(maxn + 1, 0);
    double mean = 0, sq = 0;
    long too_many = 0, too_fast = 0, recoll = 0, overlap = 0, grazing = 0, good = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        double n = double(corpus[i].n());
        ++hist[corpus[i].n()];
        mean += n;
        sq += n * n;
        TreeFlags f = classify(corpus[i], caps);
        f.recollision = f.recollision || recollided[i];
        too_many += f.too_many;
        too_fast += f.too_fast;
        recoll += f.recollision;
        overlap += f.initial_overlap;
        grazing += f.grazing;
        good += f.good();
    }
    double S = double(corpus.size());
    mean /= S;
    double se = std::sqrt(std::max(0.0, sq / S - mean * mean) / S);

    Table counts({"n", "count"});
    for (std::size_t k = 0; k < hist.size(); ++k) counts.add({double(k), double(hist[k])});
    em.csv("counts.csv", counts);

    Table flags({"samples", "mean_n", "se_n", "nodes_ceiling", "frac_too_many", "frac_too_fast",
                 "frac_recollision", "frac_overlap", "frac_grazing", "frac_good"});
    flags.add({S, mean, se, ceiling, too_many / S, too_fast / S, recoll / S, overlap / S,
               grazing / S, good / S});
    em.csv("flags.csv", flags);
    em.trees("trees.ndjson", corpus);

    chk.expect(mean + 1.0 + 3.0 * se <= ceiling,
               "tree-stats: mean collision count breaches the expected-collisions ceiling");
}

void run_bound_audit(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    long N = c.get_long("N");
    double cc = c.get_double("c");
    double T = c.get_double("T");
    long samples = c.get_long("samples");
    double alpha = c.get_double("alpha", 0.1);
    Density f0 = maxwellian_from(c, "f0_beta", 1.0);
    Density g0 = maxwellian_from(c, "g0_beta", 1.0);

    SimConfig sim = make_sim_config(N, cc, T, spec.seed, f0, g0, samples);
    ScalingPlan plan = plan_scaling(sim.eps, alpha, std::max(1.0, cc));

    BoundInputs in;
    in.eps = sim.eps;
    in.t = T;
    in.T = T;
    in.c = cc;
    in.M_eps = plan.M_eps;
    in.V_eps = plan.V_eps;
    in.eta = plan.eta;
    in.delta = plan.delta;
    in.consts = KineticConstants::compute(f0, g0, in.V_eps);
    BadTreeBounds bad = bad_tree_bounds(in);

    std::vector<double> probes;
    for (int k = 1; k <= 4; ++k) probes.push_back(T * k / 4.0);

    GoodTreeCaps caps;
    caps.eps = sim.eps;
    caps.M_cap = in.M_eps;
    caps.V_cap = in.V_eps;

    struct Piece {
        double n = 0;
        bool bad = false;
        std::vector<double> speed, energy;
    };
    std::vector<Piece> pieces = parallel_map<Piece>(samples, spec.workers, [&](long i) {
        EvolveResult r = simulate_sample(sim, std::uint64_t(i), probes);
        Piece p;
        p.n = double(r.tree.n());
        std::set<long> seen;
        bool again = false;
        for (long q : r.partners) again = again || !seen.insert(q).second;
        TreeFlags f = classify(r.tree, caps);
        p.bad = again || !f.good();
        for (const PhasePoint& s : r.traj.states) {
            p.speed.push_back(norm(s.v));
            p.energy.push_back(1.0 + norm2(s.v));
        }
        return p;
    });

    double S = double(samples);
    double mean_n = 0, bad_frac = 0;
    std::vector<double> mean_speed(probes.size(), 0.0), mean_energy(probes.size(), 0.0);
    for (const Piece& p : pieces) {
        mean_n += p.n;
        bad_frac += p.bad;
        for (std::size_t k = 0; k < probes.size(); ++k) {
            mean_speed[k] += p.speed[k];
            mean_energy[k] += p.energy[k];
        }
    }
    mean_n /= S;
    bad_frac /= S;
    for (double& v : mean_speed) v /= S;
    for (double& v : mean_energy) v /= S;

    Table moments({"t", "mean_speed", "momentum_ceiling", "mean_energy", "energy_ceiling"});
    for (std::size_t k = 0; k < probes.size(); ++k) {
        double mom = momentum_bound(in.consts, cc, probes[k]);
        double en = energy_bound(in.consts, cc, probes[k]);
        moments.add({probes[k], mean_speed[k], mom, mean_energy[k], en});
        chk.expect(mean_speed[k] <= mom,
                   "bound-audit: mean speed breaches the momentum ceiling at t=" +
                       format_g17(probes[k]));
        chk.expect(mean_energy[k] <= en,
                   "bound-audit: mean energy breaches the energy ceiling at t=" +
                       format_g17(probes[k]));
    }
    em.csv("moments.csv", moments);

    double nodes_ceiling = expected_collisions_bound(in.consts, cc, T);
    Table counts({"samples", "mean_nodes", "ceiling"});
    counts.add({S, mean_n + 1.0, nodes_ceiling});
    em.csv("counts.csv", counts);
    chk.expect(mean_n + 1.0 <= nodes_ceiling,
               "bound-audit: mean node count breaches the expected-collisions ceiling");

    Table badt({"measured_bad_fraction", "overlap", "recollision", "high_collision", "velocity",
                "total_ceiling", "margin"});
    badt.add({bad_frac, bad.overlap, bad.recollision, bad.high_collision, bad.velocity,
              bad.total(), bad.total() - bad_frac});
    em.csv("badtrees.csv", badt);
    chk.expect(bad_frac <= bad.total(),
               "bound-audit: measured bad-tree fraction breaches the ceiling");
}

void run_plan(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    std::vector<double> eps_list = c.get_list("eps_list");
    std::vector<double> alpha_list = c.get_list("alpha_list");
    double cc = c.get_double("c", 1.0);

    Table t({"eps", "alpha", "c", "T", "M", "V", "eta", "delta", "predicted_error",
             "balance_spread"});
    nlohmann::json plans = nlohmann::json::array();
    for (double eps : eps_list) {
        for (double alpha : alpha_list) {
            ScalingPlan p = plan_scaling(eps, alpha, cc);
            std::array<double, 5> terms = balance_terms(p);
            double spread = 0;
            for (double x : terms) spread = std::max(spread, std::fabs(x / terms[0] - 1.0));
            t.add({p.eps, p.alpha, p.c, p.T, p.M_eps, p.V_eps, p.eta, p.delta, p.predicted_error,
                   spread});
            chk.expect(spread <= 1e-9, "plan: balance terms differ at eps=" + format_g17(eps) +
                                           " alpha=" + format_g17(alpha));
            plans.push_back({{"eps", p.eps},
                             {"alpha", p.alpha},
                             {"c", p.c},
                             {"T", p.T},
                             {"M", p.M_eps},
                             {"V", p.V_eps},
                             {"eta", p.eta},
                             {"delta", p.delta},
                             {"predicted_error", p.predicted_error}});
        }
    }
    em.csv("plan.csv", t);
    em.text("plan.json", plans.dump(2) + "\n");
}

void run_kappa(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    std::vector<double> betas = c.has("beta_list") ? c.get_list("beta_list")
                                                   : std::vector<double>{1.0};
    int n = int(c.get_long("grid_n", 12));
    double R1 = c.get_double("grid_R1", 6.0);

    Table t({"beta", "kappa", "kappa_sqrt_beta", "residual", "D11", "D22", "D33", "tensor_full",
             "tail_mass"});
    std::vector<double> scaled;
    for (double beta : betas) {
        VelocityGrid grid = VelocityGrid::make(R1 / std::sqrt(beta), n);
        KappaResult r = compute_kappa(beta, grid);
        scaled.push_back(r.kappa * std::sqrt(beta));
        t.add({beta, r.kappa, r.kappa * std::sqrt(beta), r.residual, r.tensor[0][0],
               r.tensor[1][1], r.tensor[2][2], double(r.tensor_full), r.tail_mass});
        chk.expect(r.residual <= 1e-8,
                   "kappa: cell-problem residual too large at beta=" + format_g17(beta));
        chk.expect(r.kappa > 0, "kappa: nonpositive diffusion parameter at beta=" +
                                    format_g17(beta));
    }
    em.csv("kappa.csv", t);
    for (std::size_t i = 1; i < scaled.size(); ++i)
        chk.expect(std::fabs(scaled[i] / scaled[0] - 1.0) <= 0.02,
                   "kappa: kappa*sqrt(beta) drifts across beta values");
}

void run_heat_limit(const ExperimentSpec& spec, Emitter& em, Checker& chk) {
    const Config& c = spec.config;
    std::vector<double> cs = c.get_list("c_list");
    std::vector<double> taus = c.get_list("tau_list");
    double beta = c.get_double("beta", 1.0);
    int n = int(c.get_long("grid_n", 11));
    double R = c.get_double("grid_R", 5.5 / std::sqrt(beta));
    int nx = int(c.get_long("nx", 16));
    double amp = c.get_double("amplitude", 1.0);
    if (!std::is_sorted(taus.begin(), taus.end()))
        throw std::invalid_argument("heat-limit: tau_list must be sorted");

    VelocityGrid grid = VelocityGrid::make(R, n);
    KappaResult kr = compute_kappa(beta, grid);
    std::vector<std::complex<double>> rho0{1.0, 0.5 * amp};
    HeatSolution heat = heat_solve(rho0, kr.kappa, taus);

    Table t({"c", "tau", "l1_gap", "velocity_tail_mass", "kappa"});
    std::vector<std::vector<double>> gaps(taus.size());
    for (double cc : cs) {
        std::vector<double> times;
        for (double tau : taus) times.push_back(cc * tau);
        double dt = c.get_double("dt", safe_dt(cc, beta, R, times.back()));
        KineticSolution sol = grid_boltzmann_solve(Density::maxwellian(beta),
                                                   Density::maxwellian(beta), cc, grid, rho0, dt,
                                                   times);
        DiffusiveComparison cmp = diffusive_compare(sol, heat, beta, cc, nx);
        for (std::size_t k = 0; k < taus.size(); ++k) {
            t.add({cc, taus[k], cmp.l1_gap[k], cmp.velocity_tail_mass, kr.kappa});
            gaps[k].push_back(cmp.l1_gap[k]);
        }
    }
    em.csv("heat.csv", t);
    for (std::size_t k = 0; k < taus.size(); ++k)
        for (std::size_t i = 1; i < gaps[k].size(); ++i)
            chk.expect(gaps[k][i] < gaps[k][i - 1],
                       "heat-limit: diffusive gap did not shrink with c at tau=" +
                           format_g17(taus[k]));
}

}  // namespace

std::vector<double> shell_masses(const PhaseHistogram& h, double width) {
    if (!(width > 0)) throw std::invalid_argument("shell_masses: width must be positive");
    int nshell = int(std::floor(h.grid.R / width)) + 1;
    std::vector<double> out(std::size_t(h.nx) * (nshell + 1), 0.0);
    for (int b = 0; b < h.nx; ++b) {
        for (int s = 0; s < h.grid.size(); ++s) {
            int sh = std::min(nshell - 1, int(norm(h.grid.node(s)) / width));
            out[std::size_t(b) * (nshell + 1) + sh] += h.at(b, s);
        }
        out[std::size_t(b) * (nshell + 1) + nshell] += h.at(b, h.grid.size());
    }
    return out;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
    std::filesystem::create_directories(spec.out_dir);
    ExperimentOutcome outcome;
    Emitter em{spec.out_dir, {}};
    Checker chk{&outcome.failures};

    switch (spec.kind) {
        case ExperimentKind::simulate: run_simulate(spec, em, chk); break;
        case ExperimentKind::idealized: run_idealized(spec, em, chk); break;
        case ExperimentKind::compare: run_compare(spec, em, chk); break;
        case ExperimentKind::tree_stats: run_tree_stats(spec, em, chk); break;
        case ExperimentKind::bound_audit: run_bound_audit(spec, em, chk); break;
        case ExperimentKind::plan: run_plan(spec, em, chk); break;
        case ExperimentKind::kappa: run_kappa(spec, em, chk); break;
        case ExperimentKind::heat_limit: run_heat_limit(spec, em, chk); break;
    }

    nlohmann::json manifest;
    manifest["kind"] = experiment_name(spec.kind);
    manifest["seed"] = spec.seed;
    manifest["workers"] = spec.workers;
    nlohmann::json cfg = nlohmann::json::object();
    for (const auto& [k, v] : spec.config.entries()) cfg[k] = v;
    manifest["config"] = cfg;
    manifest["config_hash"] =
        hex64(fnv1a(experiment_name(spec.kind) + "\n" + spec.config.canonical()));
    manifest["outputs"] = em.files;
    em.text("manifest.json", manifest.dump(2) + "\n");

    outcome.files = em.files;
    outcome.passed = outcome.failures.empty();
    return outcome;
}

}  // namespace rgas
