#include "rgas/tree.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace rgas {

CollisionTree prune_final(const CollisionTree& tree) {
    if (tree.markers.empty())
        throw std::invalid_argument("prune_final: tree has no collisions");
    CollisionTree out = tree;
    out.markers.pop_back();
    return out;
}

double max_velocity(const CollisionTree& tree) {
    double vmax = norm(tree.root.v);
    Vec3 v = tree.root.v;
    for (const auto& m : tree.markers) {
        vmax = std::max(vmax, norm(m.v_in));
        v = collide(v, m.v_in, m.nu).first;
        vmax = std::max(vmax, norm(v));
    }
    return vmax;
}

ReconstructedPaths reconstruct(const CollisionTree& tree, double eps) {
    if (eps <= 0) throw std::invalid_argument("reconstruct: eps must be positive");
    if (tree.horizon <= 0) throw std::invalid_argument("reconstruct: horizon must be positive");

    ReconstructedPaths p;
    p.horizon = tree.horizon;
    p.eps = eps;
    p.times.reserve(tree.n() + 1);
    p.x_at.reserve(tree.n() + 1);
    p.v_seg.reserve(tree.n() + 1);

    p.times.push_back(0.0);
    p.x_at.push_back(wrap01(tree.root.x));
    p.v_seg.push_back(tree.root.v);

    double prev_t = 0.0;
    for (const auto& m : tree.markers) {
        if (!(m.t > prev_t) || m.t > tree.horizon)
            throw std::invalid_argument("reconstruct: marker times must be strictly increasing in (0, horizon]");
        double nn = norm(m.nu);
        if (std::abs(nn - 1.0) > 1e-6)
            throw std::invalid_argument("reconstruct: marker normal is not unit length");
        Vec3 nu = m.nu / nn;

        Vec3 x_tag = wrap01(p.x_at.back() + (m.t - prev_t) * p.v_seg.back());
        auto [v_tag_post, v_bg_post] = collide(p.v_seg.back(), m.v_in, nu);

        ReconstructedPaths::BgLine line;
        line.t_contact = m.t;
        line.x_contact = wrap01(x_tag + eps * nu);
        line.v_pre = m.v_in;
        line.v_post = v_bg_post;
        p.background.push_back(line);

        p.times.push_back(m.t);
        p.x_at.push_back(x_tag);
        p.v_seg.push_back(v_tag_post);
        prev_t = m.t;
    }
    return p;
}

Vec3 ReconstructedPaths::tagged_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > 0) --i;
    return wrap01(x_at[i] + (t - times[i]) * v_seg[i]);
}

Vec3 ReconstructedPaths::tagged_velocity_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t i = static_cast<std::size_t>(it - times.begin());
    if (i > 0) --i;
    return v_seg[i];
}

Vec3 ReconstructedPaths::background_at(std::size_t j, double t) const {
    const auto& b = background.at(j);
    if (t <= b.t_contact) return wrap01(b.x_contact + (t - b.t_contact) * b.v_pre);
    return wrap01(b.x_contact + (t - b.t_contact) * b.v_post);
}

namespace {

// Minimum of |r0 + s*w| for s in [0, len].  Valid as a torus distance whenever
// the result is below ~0.25, provided r0 is the minimum image at s = 0 and
// len * |w| <= 0.25 (no other periodic image can get that close in between).
double chunk_min_dist2(const Vec3& r0, const Vec3& w, double len) {
    double ww = norm2(w);
    double s = 0.0;
    if (ww > 0) s = std::clamp(-dot(r0, w) / ww, 0.0, len);
    Vec3 r = r0 + s * w;
    return norm2(r);
}

}  // namespace

double flight_min_distance(const Vec3& xa, double ta, const Vec3& va,
                           const Vec3& xb, double tb, const Vec3& vb,
                           double t0, double t1) {
    Vec3 w = va - vb;
    double speed = norm(w);
    double span = t1 - t0;
    if (span < 0) return std::numeric_limits<double>::infinity();
    double chunk = speed > 0 ? 0.25 / speed : span;
    if (chunk <= 0 || chunk > span) chunk = span;

    double best = std::numeric_limits<double>::infinity();
    double t = t0;
    while (true) {
        double len = std::min(chunk, t1 - t);
        Vec3 ra = xa + (t - ta) * va;
        Vec3 rb = xb + (t - tb) * vb;
        Vec3 r0 = min_image(ra - rb);
        best = std::min(best, chunk_min_dist2(r0, w, len));
        t += len;
        if (t >= t1 - 1e-300 || len <= 0) break;
    }
    return std::sqrt(best);
}

double min_marker_distance(const ReconstructedPaths& paths, std::size_t j,
                           double t_excl) {
    const auto& b = paths.background.at(j);
    double best = std::numeric_limits<double>::infinity();
    std::size_t nseg = paths.v_seg.size();
    for (std::size_t i = 0; i < nseg; ++i) {
        double s0 = paths.times[i];
        double s1 = (i + 1 < nseg) ? paths.times[i + 1] : paths.horizon;
        // pre-contact leg, stopping t_excl short of the contact
        double a = s0, z = std::min(s1, b.t_contact - t_excl);
        if (z > a)
            best = std::min(best, flight_min_distance(
                                      paths.x_at[i], s0, paths.v_seg[i],
                                      b.x_contact, b.t_contact, b.v_pre, a, z));
        // post-contact leg
        a = std::max(s0, b.t_contact + t_excl);
        z = s1;
        if (z > a)
            best = std::min(best, flight_min_distance(
                                      paths.x_at[i], s0, paths.v_seg[i],
                                      b.x_contact, b.t_contact, b.v_post, a, z));
    }
    return best;
}

TreeFlags classify(const CollisionTree& tree, const GoodTreeCaps& caps) {
    if (caps.eps <= 0 || caps.eps >= 0.2)
        throw std::invalid_argument("classify: eps must lie in (0, 0.2)");
    TreeFlags flags;
    flags.too_many = static_cast<double>(tree.n()) > caps.M_cap;
    flags.too_fast = max_velocity(tree) >= caps.V_cap;

    ReconstructedPaths paths = reconstruct(tree, caps.eps);
    for (std::size_t j = 0; j < paths.background.size(); ++j) {
        const auto& b = paths.background[j];
        double closing = dot(tree.markers[j].nu, paths.v_seg[j] - b.v_pre);
        if (closing <= caps.graze_tol) flags.grazing = true;
        if (torus_dist(paths.x_at[0], paths.background_at(j, 0.0)) <= caps.eps)
            flags.initial_overlap = true;
        if (min_marker_distance(paths, j) <= caps.eps) flags.recollision = true;
    }
    return flags;
}

TreeFlags classify_dense_oracle(const CollisionTree& tree, const GoodTreeCaps& caps) {
    TreeFlags flags;
    flags.too_many = static_cast<double>(tree.n()) > caps.M_cap;
    double vmax = max_velocity(tree);
    flags.too_fast = vmax >= caps.V_cap;

    ReconstructedPaths paths = reconstruct(tree, caps.eps);
    for (std::size_t j = 0; j < paths.background.size(); ++j) {
        const auto& b = paths.background[j];
        double closing = dot(tree.markers[j].nu, paths.v_seg[j] - b.v_pre);
        if (closing <= caps.graze_tol) flags.grazing = true;
        if (torus_dist(paths.x_at[0], paths.background_at(j, 0.0)) <= caps.eps)
            flags.initial_overlap = true;
    }

    double dt = caps.eps / (10.0 * std::max(vmax, 1e-12));
    std::size_t steps = static_cast<std::size_t>(std::ceil(tree.horizon / dt));
    steps = std::min<std::size_t>(steps, 20'000'000);
    for (std::size_t k = 0; k <= steps && !flags.recollision; ++k) {
        double t = std::min(tree.horizon, k * dt);
        Vec3 xt = paths.tagged_at(t);
        for (std::size_t j = 0; j < paths.background.size(); ++j) {
            if (std::abs(t - paths.background[j].t_contact) <= 1e-9) continue;
            if (torus_dist(xt, paths.background_at(j, t)) <= caps.eps) {
                flags.recollision = true;
                break;
            }
        }
    }
    return flags;
}

std::string tree_to_json(const CollisionTree& tree) {
    nlohmann::json j;
    j["root"]["x"] = {tree.root.x[0], tree.root.x[1], tree.root.x[2]};
    j["root"]["v"] = {tree.root.v[0], tree.root.v[1], tree.root.v[2]};
    j["markers"] = nlohmann::json::array();
    for (const auto& m : tree.markers) {
        nlohmann::json mj;
        mj["t"] = m.t;
        mj["nu"] = {m.nu[0], m.nu[1], m.nu[2]};
        mj["v"] = {m.v_in[0], m.v_in[1], m.v_in[2]};
        j["markers"].push_back(mj);
    }
    j["horizon"] = tree.horizon;
    return j.dump();
}

namespace {
Vec3 vec_from_json(const nlohmann::json& a) {
    if (!a.is_array() || a.size() != 3)
        throw std::invalid_argument("tree json: expected a 3-vector");
    return Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}
}  // namespace

CollisionTree tree_from_json(const std::string& line) {
    auto j = nlohmann::json::parse(line);
    CollisionTree tree;
    tree.root.x = vec_from_json(j.at("root").at("x"));
    tree.root.v = vec_from_json(j.at("root").at("v"));
    tree.horizon = j.at("horizon").get<double>();
    for (const auto& mj : j.at("markers")) {
        CollisionMarker m;
        m.t = mj.at("t").get<double>();
        m.nu = vec_from_json(mj.at("nu"));
        m.v_in = vec_from_json(mj.at("v"));
        tree.markers.push_back(m);
    }
    return tree;
}

void write_ndjson(std::ostream& os, const std::vector<CollisionTree>& trees) {
    for (const auto& t : trees) os << tree_to_json(t) << '\n';
}

std::vector<CollisionTree> read_ndjson(std::istream& is) {
    std::vector<CollisionTree> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(tree_from_json(line));
    }
    return out;
}

}  // namespace rgas
