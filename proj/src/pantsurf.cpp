#include "irslab/pantsurf.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "irslab/error.hpp"

namespace irslab::pantsurf {

using hyp2::cplx;

PantsLengths::PantsLengths(double a, double b, double c) : l1(a), l2(b), l3(c) {
    require(a > 0 && b > 0 && c > 0 && std::isfinite(a) && std::isfinite(b) && std::isfinite(c),
            ErrorKind::InvalidArgument, "pants boundary lengths must be positive");
}

PantsGroup pants_group(const PantsLengths& l) {
    require(l.l1 > 0 && l.l2 > 0 && l.l3 > 0, ErrorKind::InvalidArgument, "pants boundary lengths must be positive");
    const double a = l.l1 / 2.0;
    const double y = 2.0 * std::cosh(l.l2 / 2.0);
    const double z = 2.0 * std::cosh(l.l3 / 2.0);
    const double ea = std::exp(a), ema = std::exp(-a);
    // tr A > 0, tr B > 0, tr AB = -z: the trace signs of a pants group.
    const double p = (-z - ema * y) / (ea - ema);
    const double s = y - p;
    const double qq = 1.0 - p * s;
    if (!(qq > 0.0)) fail(ErrorKind::NumericFailure, "hexagon solve produced no real off-diagonal entry");
    const double q = std::sqrt(qq);
    PantsGroup out{Isometry(ea, 0.0, 0.0, ema), Isometry(p, q, -q, s), l};
    const double res = std::max({std::abs(hyp2::translation_length(out.A) - l.l1),
                                 std::abs(hyp2::translation_length(out.B) - l.l2),
                                 std::abs(hyp2::translation_length(out.C()) - l.l3)});
    if (res > 1e-8) fail(ErrorKind::NumericFailure, "hexagon solve residual " + std::to_string(res));
    return out;
}

namespace {

bool in_convex(const std::array<cplx, 6>& poly, cplx k) {
    double area = 0.0;
    for (int i = 0; i < 6; ++i) {
        const cplx a = poly[i], b = poly[(i + 1) % 6];
        area += a.real() * b.imag() - a.imag() * b.real();
    }
    const double orient = area > 0 ? 1.0 : -1.0;
    for (int i = 0; i < 6; ++i) {
        const cplx a = poly[i], b = poly[(i + 1) % 6];
        const double c = (b.real() - a.real()) * (k.imag() - a.imag()) - (b.imag() - a.imag()) * (k.real() - a.real());
        if (orient * c < 0.0) return false;
    }
    return true;
}

cplx local_klein(const Isometry& to_local, const HPoint& z) { return hyp2::to_klein(to_local.apply(z)); }

HPoint geodesic_midpoint(const HPoint& a, const HPoint& b) {
    const Isometry t = Isometry::moving_i_to(a);
    const double phi = hyp2::direction_towards(a, b);
    const double d = hyp2::dist(a, b);
    return t.apply(hyp2::from_disk(std::polar(std::tanh(d / 4.0), phi)));
}

}  // namespace

bool PantsDomain::contains(const HPoint& z) const {
    const Isometry to_local = Isometry::moving_i_to(center).inverse();
    const cplx k = local_klein(to_local, z);
    return in_convex(klein1, k) || in_convex(klein2, k);
}

PantsDomain pants_domain(const PantsGroup& p) {
    const Isometry A = p.A, B = p.B, C = p.C();
    PantsDomain d;
    d.hexagon1 = {hyp2::perpendicular_foot(A, B), hyp2::perpendicular_foot(B, A), hyp2::perpendicular_foot(B, C),
                  hyp2::perpendicular_foot(C, B), hyp2::perpendicular_foot(C, A), hyp2::perpendicular_foot(A, C)};
    for (int i = 0; i < 6; ++i) d.hexagon2[i] = hyp2::reflect_across(d.hexagon1[0], d.hexagon1[1], d.hexagon1[i]);
    d.center = geodesic_midpoint(d.hexagon1[0], d.hexagon1[1]);
    const Isometry to_local = Isometry::moving_i_to(d.center).inverse();
    for (int i = 0; i < 6; ++i) {
        d.radius = std::max(d.radius, hyp2::dist(d.center, d.hexagon1[i]));
        d.klein1[i] = local_klein(to_local, d.hexagon1[i]);
        d.klein2[i] = local_klein(to_local, d.hexagon2[i]);
    }
    return d;
}

namespace {

struct DiskDraw {
    cplx w;  // disk coordinates centred at the domain center
};

DiskDraw draw_in_disk(double rho, Rng& rng) {
    const double u = rng.uniform();
    const double r = std::acosh(1.0 + u * (std::cosh(rho) - 1.0));
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return {std::polar(std::tanh(r / 2.0), phi)};
}

}  // namespace

Frame2 sample_base_frame(const PantsGroup& p, std::uint64_t seed) {
    const PantsDomain dom = pants_domain(p);
    const double rho = dom.radius * (1.0 + 1e-9);
    const Isometry from_local = Isometry::moving_i_to(dom.center);
    Rng rng(seed);
    for (;;) {
        const DiskDraw d = draw_in_disk(rho, rng);
        const cplx k = 2.0 * d.w / (1.0 + std::norm(d.w));
        if (in_convex(dom.klein1, k) || in_convex(dom.klein2, k)) {
            const double dir = rng.uniform(0.0, 2.0 * std::numbers::pi);
            return Frame2(from_local.apply(hyp2::from_disk(d.w)), dir);
        }
    }
}

double estimate_domain_area(const PantsGroup& p, int samples, std::uint64_t seed) {
    require(samples > 0, ErrorKind::InvalidArgument, "sample count must be positive");
    const PantsDomain dom = pants_domain(p);
    const double rho = dom.radius * (1.0 + 1e-9);
    Rng rng(seed);
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        const DiskDraw d = draw_in_disk(rho, rng);
        const cplx k = 2.0 * d.w / (1.0 + std::norm(d.w));
        if (in_convex(dom.klein1, k) || in_convex(dom.klein2, k)) ++hits;
    }
    return 2.0 * std::numbers::pi * (std::cosh(rho) - 1.0) * hits / samples;
}

TreeSpec TreeSpec::make(int R) {
    require(R >= 0, ErrorKind::InvalidArgument, "tree radius must be non-negative");
    require(R <= 20, ErrorKind::InvalidArgument, "tree radius too large");
    TreeSpec t;
    t.radius = R;
    t.parent.push_back(-1);
    t.depth.push_back(0);
    t.parent_slot.push_back(-1);
    t.children.push_back({-1, -1, -1});
    for (std::size_t v = 0; v < t.parent.size(); ++v) {
        if (t.depth[v] == R + 1) continue;
        for (int s = (v == 0 ? 0 : 1); s < 3; ++s) {
            const int c = static_cast<int>(t.parent.size());
            t.parent.push_back(static_cast<int>(v));
            t.depth.push_back(t.depth[v] + 1);
            t.parent_slot.push_back(s);
            t.children.push_back({-1, -1, -1});
            t.children[v][s] = c;
        }
    }
    return t;
}

int TreeSpec::pants_count() const {
    int n = 0;
    for (int d : depth) n += d <= radius;
    return n;
}

int TreeSpec::edge_at(int v, int slot) const {
    require(v >= 0 && v < static_cast<int>(parent.size()) && depth[v] <= radius && slot >= 0 && slot < 3,
            ErrorKind::InvalidArgument, "no such pants slot");
    if (v != 0 && slot == 0) return v - 1;
    return children[v][slot] - 1;
}

void validate(const LengthLaw& law) {
    std::visit(
        [](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMass>)
                require(l.l > 0, ErrorKind::InvalidArgument, "point mass must be positive");
            else if constexpr (std::is_same_v<T, Uniform>)
                require(l.a > 0 && l.b >= l.a, ErrorKind::InvalidArgument, "uniform law needs 0 < a <= b");
            else if constexpr (std::is_same_v<T, LogNormal>)
                require(l.s >= 0 && std::isfinite(l.m), ErrorKind::InvalidArgument, "lognormal needs s >= 0");
            else
                require(l.rate > 0 && l.cap > 0, ErrorKind::InvalidArgument, "truncated exponential needs rate, cap > 0");
        },
        law);
}

double draw_length(const LengthLaw& law, Rng& rng) {
    return std::visit(
        [&rng](const auto& l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMass>)
                return l.l;
            else if constexpr (std::is_same_v<T, Uniform>)
                return l.a + (l.b - l.a) * rng.uniform();
            else if constexpr (std::is_same_v<T, LogNormal>)
                return std::exp(l.m + l.s * rng.normal());
            else {
                const double u = rng.open_uniform();
                return -std::log1p(-u * -std::expm1(-l.rate * l.cap)) / l.rate;
            }
        },
        law);
}

std::string describe(const LengthLaw& law) {
    char buf[96];
    std::visit(
        [&buf](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, PointMass>)
                std::snprintf(buf, sizeof buf, "point:%.17g", l.l);
            else if constexpr (std::is_same_v<T, Uniform>)
                std::snprintf(buf, sizeof buf, "uniform:%.17g,%.17g", l.a, l.b);
            else if constexpr (std::is_same_v<T, LogNormal>)
                std::snprintf(buf, sizeof buf, "lognormal:%.17g,%.17g", l.m, l.s);
            else
                std::snprintf(buf, sizeof buf, "texp:%.17g,%.17g", l.rate, l.cap);
        },
        law);
    return buf;
}

LengthLaw parse_law(const std::string& text) {
    const auto colon = text.find(':');
    require(colon != std::string::npos, ErrorKind::InvalidArgument, "length law must look like kind:params");
    const std::string kind = text.substr(0, colon);
    std::vector<double> v;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, "bad number in length law: " + item);
        }
    }
    auto need = [&](std::size_t n) {
        require(v.size() == n, ErrorKind::InvalidArgument, "length law " + kind + " takes " + std::to_string(n) + " parameters");
    };
    LengthLaw law;
    if (kind == "point") {
        need(1);
        law = PointMass{v[0]};
    } else if (kind == "uniform") {
        need(2);
        law = Uniform{v[0], v[1]};
    } else if (kind == "lognormal") {
        need(2);
        law = LogNormal{v[0], v[1]};
    } else if (kind == "texp") {
        need(2);
        law = TruncatedExp{v[0], v[1]};
    } else {
        fail(ErrorKind::InvalidArgument, "unknown length law " + kind);
    }
    validate(law);
    return law;
}

FNAssignment sample_fn(const TreeSpec& tree, const LengthLaw& law, std::uint64_t seed) {
    validate(law);
    FNAssignment fn;
    fn.edges.resize(static_cast<std::size_t>(tree.edge_count()));
    for (std::size_t e = 0; e < fn.edges.size(); ++e) {
        Rng rng(derive_seed(seed, e));
        fn.edges[e].length = draw_length(law, rng);
        fn.edges[e].twist = rng.uniform();
    }
    return fn;
}

PantsGraph tree_graph(const TreeSpec& tree, const FNAssignment& fn) {
    require(static_cast<int>(fn.edges.size()) == tree.edge_count(), ErrorKind::InvalidArgument,
            "FN assignment must cover every tree edge");
    PantsGraph g;
    const int n = tree.pants_count();
    for (int v = 0; v < n; ++v)
        g.pants.emplace_back(fn.edges[tree.edge_at(v, 0)].length, fn.edges[tree.edge_at(v, 1)].length,
                             fn.edges[tree.edge_at(v, 2)].length);
    for (int c = 1; c < n; ++c) {
        const EdgeFN& e = fn.edges[c - 1];
        require(e.twist >= 0.0 && e.twist < 1.0, ErrorKind::InvalidArgument, "twist must lie in [0, 1)");
        g.edges.push_back({tree.parent[c], tree.parent_slot[c], c, 0, e.twist});
    }
    return g;
}

namespace {

const Isometry kFlip(0.0, -1.0, 1.0, 0.0);

std::string slot_label(int v, int s) { return "v" + std::to_string(v) + ".s" + std::to_string(s); }

double relative_distance(const Isometry& x, const Isometry& y) {
    double scale = 1.0;
    for (double e : x.entries()) scale = std::max(scale, std::abs(e));
    return hyp2::matrix_distance(x, y) / scale;
}

}  // namespace

SurfaceGroupApprox build_graph_group(const PantsGraph& graph, int root) {
    const int n = static_cast<int>(graph.pants.size());
    require(n > 0, ErrorKind::InvalidArgument, "graph has no pants");
    require(root >= 0 && root < n, ErrorKind::InvalidArgument, "root out of range");

    std::vector<std::array<int, 3>> at(n, {-1, -1, -1});
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& ed = graph.edges[e];
        require(ed.u >= 0 && ed.u < n && ed.v >= 0 && ed.v < n && ed.su >= 0 && ed.su < 3 && ed.sv >= 0 && ed.sv < 3,
                ErrorKind::InvalidArgument, "edge endpoint out of range");
        require(at[ed.u][ed.su] < 0 && at[ed.v][ed.sv] < 0 && !(ed.u == ed.v && ed.su == ed.sv),
                ErrorKind::InvalidArgument, "cuff slot used twice");
        at[ed.u][ed.su] = static_cast<int>(e);
        at[ed.v][ed.sv] = static_cast<int>(e);
        const double lu = graph.pants[ed.u][ed.su], lv = graph.pants[ed.v][ed.sv];
        require(std::abs(lu - lv) <= 1e-12 * std::max(1.0, lu), ErrorKind::InvalidArgument,
                "glued cuffs have different lengths");
    }

    std::vector<PantsGroup> groups;
    std::vector<std::array<Isometry, 3>> local_cuff(n), chart(n);
    std::vector<PantsDomain> domains;
    for (int v = 0; v < n; ++v) {
        groups.push_back(pants_group(graph.pants[v]));
        for (int s = 0; s < 3; ++s) local_cuff[v][s] = groups[v].cuff(s);
        for (int s = 0; s < 3; ++s) chart[v][s] = hyp2::cuff_chart(local_cuff[v][s], local_cuff[v][(s + 1) % 3]);
        domains.push_back(pants_domain(groups[v]));
    }

    SurfaceGroupApprox out;
    out.graph = graph;
    out.placements.assign(n, Isometry());
    std::vector<bool> placed(n, false), used(graph.edges.size(), false);

    auto gluing = [&](int u, int su, int v, int sv, double twist) {
        // X = Twist * Flip * F_v^-1, so that M_u X conjugates v's cuff onto u's cuff reversed.
        const double len = graph.pants[u][su];
        const double frac = twist - std::floor(twist);
        const Isometry x = Isometry::translation(frac * len) * kFlip * chart[v][sv].inverse();
        const Isometry lhs = x * local_cuff[v][sv] * x.inverse();
        const Isometry rhs = chart[u][su].inverse() * local_cuff[u][su].inverse() * chart[u][su];
        out.max_residual = std::max(out.max_residual, relative_distance(lhs, rhs));
        if (out.max_residual > 1e-8) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "axis matching residual %.3g on a cuff of length %.6g", out.max_residual, len);
            fail(ErrorKind::NumericFailure, buf);
        }
        return x;
    };

    placed[root] = true;
    out.generators.push_back(local_cuff[root][0]);
    out.labels.push_back(slot_label(root, 0));
    out.generators.push_back(local_cuff[root][1]);
    out.labels.push_back(slot_label(root, 1));
    std::deque<int> queue{root};
    std::vector<int> order;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        order.push_back(u);
        for (int su = 0; su < 3; ++su) {
            const int e = at[u][su];
            if (e < 0 || used[e]) continue;
            used[e] = true;
            const auto& ed = graph.edges[e];
            const bool forward = ed.u == u && ed.su == su;
            const int v = forward ? ed.v : ed.u;
            const int sv = forward ? ed.sv : ed.su;
            const Isometry x = gluing(u, su, v, sv, ed.twist);
            const Isometry mu = out.placements[u] * chart[u][su];
            if (!placed[v]) {
                placed[v] = true;
                out.placements[v] = mu * x;
                const int gs = (sv + 1) % 3;
                out.generators.push_back(out.placements[v] * local_cuff[v][gs] * out.placements[v].inverse());
                out.labels.push_back(slot_label(v, gs));
                queue.push_back(v);
            } else {
                out.generators.push_back(mu * x * out.placements[v].inverse());
                out.labels.push_back("e" + std::to_string(e));
            }
        }
    }
    require(static_cast<int>(order.size()) == n, ErrorKind::InvalidArgument, "pants graph is not connected");

    out.cuffs.resize(n);
    for (int v = 0; v < n; ++v) {
        for (int s = 0; s < 3; ++s)
            out.cuffs[v][s] = out.placements[v] * local_cuff[v][s] * out.placements[v].inverse();
        out.centers.push_back(out.placements[v].apply(domains[v].center));
        out.radii.push_back(domains[v].radius);
    }
    out.baseFrame = Frame2(out.centers[root], 0.0);
    return out;
}

SurfaceGroupApprox build_group(const TreeSpec& tree, const FNAssignment& fn) {
    SurfaceGroupApprox g = build_graph_group(tree_graph(tree, fn), 0);
    g.tree = tree;
    g.fn = fn;
    return g;
}

double star_bound(double l, int R) {
    require(l > 0 && R >= 0, ErrorKind::InvalidArgument, "star bound needs l > 0 and R >= 0");
    return std::max(0.0, std::min((l - 1.0) / 2.0, R * std::sinh(1.0 / std::sinh(l))));
}

double star_bound_arcsinh(double l, int R) {
    require(l > 0 && R >= 0, ErrorKind::InvalidArgument, "star bound needs l > 0 and R >= 0");
    return std::max(0.0, std::min((l - 1.0) / 2.0, R * std::asinh(1.0 / std::sinh(l))));
}

SegmentBounds pants_segment_bounds(double l) {
    require(l > 0, ErrorKind::InvalidArgument, "length must be positive");
    const double c = 1.0 / std::sinh(l);
    return {std::sinh(c), std::max(0.0, (l - 1.0) / 2.0), std::asinh(c)};
}

SystoleResult systole_search(const SurfaceGroupApprox& g, int W, const SearchOptions& opt) {
    require(W >= 1, ErrorKind::InvalidArgument, "W must be at least 1");
    words::WordSearch ws(g.generators, opt.cap);
    SystoleResult res;
    res.value = std::numeric_limits<double>::infinity();
    std::unordered_set<long long> classes;
    auto length_of = [](const Isometry& h) {
        const double t = std::abs(h.trace());
        if (t <= 2.0 + hyp2::kClassTol) fail(ErrorKind::NumericFailure, "non-hyperbolic element in surface group");
        return 2.0 * std::acosh(t / 2.0);
    };
    if (opt.prune)
        for (std::size_t i = 0; i < g.generators.size(); ++i)
            if (double len = length_of(g.generators[i]); len < res.value) {
                res.value = len;
                res.word = {static_cast<int>(i) + 1};
            }
    res.words = ws.run(W, [&](const Isometry& h, const std::vector<int>& w) {
        if (words::cyclically_reduced(w)) {
            const double len = length_of(h);
            classes.insert(std::llround(len * 1e9));
            if (len < res.value) {
                res.value = len;
                res.word = w;
            }
        }
        if (!opt.prune) return true;
        for (std::size_t v = 0; v < g.centers.size(); ++v)
            if (hyp2::dist(g.centers[v], h.apply(g.centers[v])) - 2.0 * g.radii[v] <= res.value) return true;
        return false;
    });
    res.classes = classes.size();
    return res;
}

double systole_oracle(const SurfaceGroupApprox& g, int W, const SearchOptions& opt) {
    return systole_search(g, W, opt).value;
}

InjResult inj_radius_search(const SurfaceGroupApprox& g, const Frame2& frame, int W, const SearchOptions& opt) {
    require(W >= 1, ErrorKind::InvalidArgument, "W must be at least 1");
    words::WordSearch ws(g.generators, opt.cap);
    const HPoint base = frame.base;
    double slack = 0.0;
    for (double r : g.radii) slack = std::max(slack, 2.0 * r);
    InjResult res;
    double best = std::numeric_limits<double>::infinity();
    if (opt.prune)
        for (std::size_t i = 0; i < g.generators.size(); ++i)
            if (double d = hyp2::dist(base, g.generators[i].apply(base)); d < best) {
                best = d;
                res.word = {static_cast<int>(i) + 1};
            }
    res.words = ws.run(W, [&](const Isometry& h, const std::vector<int>& w) {
        const double d = hyp2::dist(base, h.apply(base));
        if (d < best) {
            best = d;
            res.word = w;
        }
        return !opt.prune || d <= best + slack;
    });
    res.value = best / 2.0;
    return res;
}

double inj_radius_at(const SurfaceGroupApprox& g, const Frame2& frame, int W, const SearchOptions& opt) {
    return inj_radius_search(g, frame, W, opt).value;
}

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

nlohmann::json to_json(const SurfaceGroupApprox& g) {
    nlohmann::json j;
    j["tree"] = {{"radius", g.tree.radius}, {"parent", g.tree.parent}, {"parentSlot", g.tree.parent_slot}};
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.fn.edges) edges.push_back({{"length", num(e.length)}, {"twist", num(e.twist)}});
    j["fn"] = edges;
    nlohmann::json pants = nlohmann::json::array();
    for (const auto& p : g.graph.pants) pants.push_back({num(p.l1), num(p.l2), num(p.l3)});
    j["pants"] = pants;
    nlohmann::json gedges = nlohmann::json::array();
    for (const auto& e : g.graph.edges)
        gedges.push_back({{"u", e.u}, {"su", e.su}, {"v", e.v}, {"sv", e.sv}, {"twist", num(e.twist)}});
    j["gluings"] = gedges;
    nlohmann::json gens = nlohmann::json::array();
    for (const auto& m : g.generators) gens.push_back(hyp2::to_json(m));
    j["generators"] = gens;
    j["labels"] = g.labels;
    j["baseFrame"] = {{"x", num(g.baseFrame.base.x)}, {"y", num(g.baseFrame.base.y)}, {"direction", num(g.baseFrame.direction)}};
    return j;
}

std::string systole_csv_header() { return "seed,l,R,W,star_bound,oracle_systole"; }

std::string systole_csv_row(std::uint64_t seed, double l, int R, int W, double star, double oracle) {
    return std::to_string(seed) + "," + num(l) + "," + std::to_string(R) + "," + std::to_string(W) + "," + num(star) +
           "," + num(oracle);
}

}  // namespace irslab::pantsurf
