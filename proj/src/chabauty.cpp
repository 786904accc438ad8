#include "irslab/chabauty.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>

#include "irslab/error.hpp"

namespace irslab::chabauty {

namespace {

using Key = std::array<long long, 4>;

Key key_of(const Isometry& g) {
    Key k{};
    for (int i = 0; i < 4; ++i) k[i] = std::llround(g.entries()[i] * 1e9);
    return k;
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Keeps one representative per 1e-9 cluster; candidates are compared against kept elements
// whose rounded first entry is within two units.
class Deduper {
public:
    bool insert(const Isometry& g) {
        const long long k0 = key_of(g)[0];
        for (auto it = index_.lower_bound(k0 - 2); it != index_.end() && it->first <= k0 + 2; ++it)
            if (hyp2::matrix_distance(kept_[it->second], g) <= kDedupeTol) return false;
        // the sign convention may flip a near-zero first entry
        const long long m0 = -k0;
        for (auto it = index_.lower_bound(m0 - 2); it != index_.end() && it->first <= m0 + 2; ++it)
            if (hyp2::matrix_distance(kept_[it->second], g) <= kDedupeTol) return false;
        index_.emplace(k0, kept_.size());
        kept_.push_back(g);
        return true;
    }
    std::vector<Isometry> take() { return std::move(kept_); }

private:
    std::multimap<long long, std::size_t> index_;
    std::vector<Isometry> kept_;
};

void sort_canonical(std::vector<Isometry>& v) {
    std::stable_sort(v.begin(), v.end(), [](const Isometry& x, const Isometry& y) { return key_of(x) < key_of(y); });
}

double outside(const Isometry& g, double R) { return std::max(0.0, R * (1.0 - kBoundaryBand) - g.op_norm()) / 2.0; }

double one_sided(const BallSet& a, const BallSet& b) {
    double worst = 0.0;
    for (const auto& x : a.elements) {
        double best = outside(x, a.radiusR);
        for (const auto& y : b.elements) {
            if (best <= worst) break;
            best = std::min(best, hyp2::matrix_distance(x, y));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

BallSet ball_set(const std::vector<Isometry>& gens, double R, int W, const BallOptions& opt) {
    require(R > 0, ErrorKind::InvalidArgument, "ball radius must be positive");
    require(W >= 1, ErrorKind::InvalidArgument, "word depth must be at least 1");
    Deduper dedupe;
    const double keep = R * (1.0 + 1e-12);
    if (1.0 <= keep) dedupe.insert(Isometry());
    const double pruneNorm = R * std::exp(opt.pruneSlack / 2.0);
    if (!gens.empty()) {
        words::WordSearch search(gens, opt.cap);
        search.run(W, [&](const Isometry& g, const std::vector<int>&) {
            const double n = g.op_norm();
            if (n <= keep) dedupe.insert(g);
            return !opt.prune || n <= pruneNorm;
        });
    }
    BallSet s;
    s.elements = dedupe.take();
    sort_canonical(s.elements);
    s.radiusR = R;
    s.wordDepth = W;
    return s;
}

std::size_t count_contained(const BallSet& inner, const BallSet& outer, double tol) {
    std::size_t n = 0;
    for (const auto& x : inner.elements)
        n += std::any_of(outer.elements.begin(), outer.elements.end(),
                         [&](const Isometry& y) { return hyp2::matrix_distance(x, y) <= tol; });
    return n;
}

double proxy_distance(const BallSet& a, const BallSet& b) {
    require(a.radiusR == b.radiusR, ErrorKind::RadiusMismatch,
            "ball sets have radii " + fmt17(a.radiusR) + " and " + fmt17(b.radiusR));
    return std::max(one_sided(a, b), one_sided(b, a));
}

LatticeLimitResult lattice_limit_experiment(const glue::Word& period, const ChainGeometry& geom,
                                            const LatticeLimitOptions& opt) {
    require(!period.empty(), ErrorKind::InvalidArgument, "empty period word");
    require(opt.windowPeriods >= 1, ErrorKind::InvalidArgument, "window must cover at least one period");
    glue::Word window;
    for (int i = 0; i < 2 * opt.windowPeriods + 1; ++i) window += period;
    const int p = static_cast<int>(period.size());
    const auto open = glue::realize_chain(glue::WindowWord(window, opt.windowPeriods * p), geom.L0, geom.L1, geom.sigma);
    const BallSet longBall = ball_set(open.group.generators, opt.R, opt.W, opt.ball);

    LatticeLimitResult r;
    r.longSize = longBall.elements.size();
    for (int k : opt.ks) {
        require(k >= 1, ErrorKind::InvalidArgument, "closing period count must be positive");
        glue::Word w;
        for (int i = 0; i < k; ++i) w += period;
        const auto closed = glue::realize_chain(glue::WindowWord(w, 0), geom.L0, geom.L1, geom.sigma, {true});
        const BallSet ball = ball_set(closed.group.generators, opt.R, opt.W, opt.ball);
        r.ks.push_back(k);
        r.distances.push_back(proxy_distance(ball, longBall));
        r.closedSizes.push_back(ball.elements.size());
    }
    return r;
}

DirectionSample orbit_directions(const std::vector<Isometry>& gens, const HPoint& base, int W, std::size_t cap) {
    require(W >= 1, ErrorKind::InvalidArgument, "word depth must be at least 1");
    DirectionSample s;
    if (!gens.empty()) {
        words::WordSearch search(gens, cap);
        search.run(W, [&](const Isometry& g, const std::vector<int>&) {
            const HPoint q = g.apply(base);
            if (hyp2::dist(base, q) > 1e-9) s.angles.push_back(hyp2::direction_towards(base, q));
            return true;
        });
    }
    std::sort(s.angles.begin(), s.angles.end());
    return s;
}

double max_angular_gap(const DirectionSample& s) {
    constexpr double twoPi = 2.0 * std::numbers::pi;
    if (s.angles.size() < 2) return twoPi;
    double gap = twoPi - s.angles.back() + s.angles.front();
    for (std::size_t i = 1; i < s.angles.size(); ++i) gap = std::max(gap, s.angles[i] - s.angles[i - 1]);
    return gap;
}

double direction_density(const std::vector<Isometry>& gens, const HPoint& base, int W, std::size_t cap) {
    return max_angular_gap(orbit_directions(gens, base, W, cap));
}

nlohmann::json to_json(const BallSet& s) {
    nlohmann::json els = nlohmann::json::array();
    for (const auto& g : s.elements) els.push_back(hyp2::to_json(g));
    return {{"radiusR", s.radiusR}, {"wordDepth", s.wordDepth}, {"elements", els}};
}

BallSet ballset_from_json(const nlohmann::json& j) {
    require(j.is_object() && j.contains("elements") && j.contains("radiusR"), ErrorKind::InvalidArgument,
            "ball set JSON needs radiusR and elements");
    BallSet s;
    s.radiusR = j["radiusR"].get<double>();
    s.wordDepth = j.value("wordDepth", 0);
    for (const auto& e : j["elements"]) s.elements.push_back(hyp2::isometry_from_json(e));
    return s;
}

std::vector<Isometry> generators_from_json(const nlohmann::json& j) {
    const nlohmann::json* arr = &j;
    if (j.is_object()) {
        if (j.contains("generators")) {
            arr = &j["generators"];
        } else {
            require(j.contains("elements"), ErrorKind::InvalidArgument, "group JSON needs a generators array");
            arr = &j["elements"];
        }
    }
    require(arr->is_array(), ErrorKind::InvalidArgument, "generators must be an array of 4-element arrays");
    std::vector<Isometry> gens;
    for (const auto& e : *arr) gens.push_back(hyp2::isometry_from_json(e));
    return gens;
}

std::string lattice_limit_csv(const LatticeLimitResult& r) {
    std::ostringstream out;
    out << "k,distance,closed_size,long_size\n";
    for (std::size_t i = 0; i < r.ks.size(); ++i)
        out << r.ks[i] << ',' << fmt17(r.distances[i]) << ',' << r.closedSizes[i] << ',' << r.longSize << '\n';
    return out.str();
}

}  // namespace irslab::chabauty
