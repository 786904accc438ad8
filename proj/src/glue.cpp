#include "irslab/glue.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "irslab/error.hpp"
#include "irslab/hyp2.hpp"
#include "irslab/rng.hpp"

namespace irslab::glue {

BlockGeometry::BlockGeometry(Rational v0, Rational v1, Rational vs)
    : vol0(std::move(v0)), vol1(std::move(v1)), volSigma(std::move(vs)) {
    require(vol0 > 0 && vol1 > 0 && volSigma > 0, ErrorKind::InvalidArgument, "block volumes must be positive");
}

BlockGeometry BlockGeometry::parse(const std::string& v0, const std::string& v1, const std::string& vs) {
    return BlockGeometry(parse_rational(v0), parse_rational(v1), parse_rational(vs));
}

BlockGeometry BlockGeometry::parse(const std::string& csv) {
    std::vector<std::string> parts;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(item);
    require(parts.size() == 3, ErrorKind::InvalidArgument, "volumes must be given as v0,v1,vs");
    return parse(parts[0], parts[1], parts[2]);
}

namespace {

void require_binary(const ShiftMeasure& m) {
    symdyn::validate(m);
    bool binary = true;
    if (auto b = std::get_if<symdyn::Bernoulli>(&m)) binary = b->p.size() == 2;
    else if (auto mk = std::get_if<symdyn::Markov>(&m)) binary = mk->pi.size() == 2;
    else
        for (char c : std::get<symdyn::PeriodicOrbit>(m).word) binary = binary && (c == '0' || c == '1');
    require(binary, ErrorKind::UnsupportedMeasure, "gluing patterns are binary sequences");
}

}  // namespace

double nu_prime_weight(const BlockGeometry& geom, const ShiftMeasure& m) {
    require_binary(m);
    const double p0 = symdyn::marginal(m, 0), p1 = symdyn::marginal(m, 1);
    const double v0 = to_double(geom.vol0), v1 = to_double(geom.vol1);
    return p1 * v1 / (p0 * v0 + p1 * v1);
}

WindowWord sample_nu_prime(const BlockGeometry& geom, const ShiftMeasure& m, int length, std::uint64_t seed) {
    require_binary(m);
    const double v0 = to_double(geom.vol0), v1 = to_double(geom.vol1);
    const double vmax = std::max(v0, v1);
    for (std::uint64_t j = 0;; ++j) {
        auto w = symdyn::sample_window(m, length, derive_seed(seed, 2 * j));
        const double weight = (w.at(0) == '1' ? v1 : v0) / vmax;
        if (Rng(derive_seed(seed, 2 * j + 1)).uniform() < weight) return w;
    }
}

std::vector<std::pair<int, int>> chunks(const Word& alpha) {
    std::vector<std::pair<int, int>> out;
    for (char c : alpha) {
        const int label = symdyn::letter_value(c);
        if (!out.empty() && out.back().first == label)
            ++out.back().second;
        else
            out.emplace_back(label, 1);
    }
    return out;
}

Word decode_chunks(const std::vector<std::pair<int, int>>& runs) {
    Word w;
    for (auto [label, n] : runs) w.append(static_cast<std::size_t>(n), symdyn::letter_char(label));
    return w;
}

Rational blocks_per_chunk(const BlockGeometry& geom, const Rational& volC, int boundaryCount, int label) {
    require(volC > 0, ErrorKind::InvalidArgument, "chunk volume must be positive");
    require(boundaryCount == 1 || boundaryCount == 2, ErrorKind::InvalidArgument, "boundary count must be 1 or 2");
    require(label == 0 || label == 1, ErrorKind::InvalidArgument, "label must be 0 or 1");
    return 2 * geom.volSigma * volC / (geom.vol(label) * boundaryCount * geom.volSigma);
}

std::string to_string(Arrangement a) { return a == Arrangement::Cycle ? "cycle" : "segment"; }

void CoverHypothesis::validate() const {
    const int m = static_cast<int>(components.size());
    require(m >= 1, ErrorKind::InvalidArgument, "hypothesis has no components");
    for (const auto& c : components) {
        require(c.label == 0 || c.label == 1, ErrorKind::InvalidArgument, "component label must be 0 or 1");
        require(c.volC > 0, ErrorKind::InvalidArgument, "component volume must be positive");
    }
    for (int i = 0; i + 1 < m; ++i)
        require(components[i].label != components[i + 1].label, ErrorKind::InvalidArgument,
                "component labels must alternate");
    if (arrangement == Arrangement::Cycle) {
        require(m == 1 || components.front().label != components.back().label, ErrorKind::InvalidArgument,
                "cycle labels must alternate around the circle");
        for (const auto& c : components)
            require(c.boundaryCount == 2, ErrorKind::InvalidArgument, "cycle components have two boundary components");
    } else {
        require(m >= 2, ErrorKind::InvalidArgument, "a segment needs two endpoint components");
        for (int i = 0; i < m; ++i)
            require(components[i].boundaryCount == (i == 0 || i == m - 1 ? 1 : 2), ErrorKind::InvalidArgument,
                    "segment endpoints have one boundary component, interior components two");
    }
}

CoverHypothesis hypothesis_from_counts(Arrangement a, int firstLabel, const std::vector<int>& counts,
                                       const BlockGeometry& geom) {
    CoverHypothesis h;
    h.arrangement = a;
    const int m = static_cast<int>(counts.size());
    for (int i = 0; i < m; ++i) {
        Component c;
        c.label = (firstLabel + i) % 2;
        c.boundaryCount = a == Arrangement::Segment && (i == 0 || i == m - 1) ? 1 : 2;
        c.volC = Rational(counts[i]) * geom.vol(c.label) * c.boundaryCount / 2;
        h.components.push_back(c);
    }
    h.validate();
    return h;
}

namespace {

// Component index of run k in the cyclic run sequence.
int run_component(Arrangement a, int m, int k) {
    if (a == Arrangement::Cycle || k < m) return k;
    return 2 * m - 2 - k;
}

int run_count(Arrangement a, int m) { return a == Arrangement::Cycle ? m : 2 * m - 2; }

}  // namespace

std::optional<Word> infer_period(const CoverHypothesis& h, const BlockGeometry& geom) {
    h.validate();
    const int m = static_cast<int>(h.components.size());
    std::vector<int> counts;
    for (const auto& c : h.components) {
        const Rational n = blocks_per_chunk(geom, c.volC, c.boundaryCount, c.label);
        if (!is_integer(n) || n < 1 || n > 1'000'000) return std::nullopt;
        counts.push_back(static_cast<int>(numerator(n)));
    }
    std::vector<std::pair<int, int>> runs;
    for (int k = 0; k < run_count(h.arrangement, m); ++k) {
        const int c = run_component(h.arrangement, m, k);
        runs.emplace_back(h.components[c].label, counts[c]);
    }
    return decode_chunks(runs);
}

std::vector<std::pair<int, int>> cyclic_chunks(const Word& w) {
    auto runs = chunks(w);
    if (runs.size() > 1 && runs.front().first == runs.back().first) {
        runs.front().second += runs.back().second;
        runs.pop_back();
    }
    return runs;
}

CoverHypothesis induced_hypothesis(const Word& w, const BlockGeometry& geom) {
    require(!w.empty(), ErrorKind::InvalidArgument, "empty period word");
    const auto runs = cyclic_chunks(w);
    std::vector<int> counts;
    for (auto [label, n] : runs) counts.push_back(n);
    return hypothesis_from_counts(Arrangement::Cycle, runs.front().first, counts, geom);
}

bool factor_of_periodic(const Word& alpha, const Word& w) {
    if (w.empty()) return false;
    const std::size_t p = w.size();
    for (std::size_t r = 0; r < p; ++r) {
        bool ok = true;
        for (std::size_t i = 0; i < alpha.size() && ok; ++i) ok = alpha[i] == w[(r + i) % p];
        if (ok) return true;
    }
    return false;
}

bool cover_consistent(const WindowWord& alpha, const CoverHypothesis& h, const BlockGeometry& geom) {
    const auto w = infer_period(h, geom);
    return w && factor_of_periodic(alpha.letters, *w);
}

namespace {

struct Shape {
    Arrangement arrangement;
    int m;
    int firstLabel;
};

std::vector<Shape> grid_shapes(int maxComponents) {
    std::vector<Shape> shapes;
    for (int m = 1; m <= maxComponents; ++m)
        if (m == 1 || m % 2 == 0)
            for (int f = 0; f < 2; ++f) shapes.push_back({Arrangement::Cycle, m, f});
    for (int m = 2; m <= maxComponents; ++m)
        for (int f = 0; f < 2; ++f) shapes.push_back({Arrangement::Segment, m, f});
    return shapes;
}

long double grid_size(const SearchBudget& b) {
    long double total = 0;
    for (const auto& s : grid_shapes(b.maxComponents)) total += std::pow(static_cast<long double>(b.maxCount), s.m);
    return total;
}

void check_budget(const SearchBudget& budget) {
    require(budget.maxComponents >= 1 && budget.maxCount >= 1, ErrorKind::InvalidArgument,
            "hypothesis grid needs at least one component and count");
}

}  // namespace

SearchResult search_hypotheses(const WindowWord& alpha, const BlockGeometry& geom, const SearchBudget& budget) {
    check_budget(budget);
    const auto runs = chunks(alpha.letters);
    const int t = static_cast<int>(runs.size()) - 1;
    SearchResult res;
    res.gridSize = grid_size(budget);

    for (const auto& shape : grid_shapes(budget.maxComponents)) {
        const int m = shape.m;
        std::vector<int> counts(m, 0);
        if (shape.arrangement == Arrangement::Cycle && m == 1) {
            // a single self-glued chunk: the periodic word is constant
            for (int n = 1; n <= budget.maxCount; ++n) {
                ++res.nodes;
                ++res.leaves;
                if (t == 0 && runs[0].first == shape.firstLabel) {
                    counts[0] = n;
                    res.hypothesis = hypothesis_from_counts(shape.arrangement, shape.firstLabel, counts, geom);
                    break;
                }
            }
            if (res.hypothesis) break;
            continue;
        }
        const int r = run_count(shape.arrangement, m);
        // constraints[p][c]: alpha runs landing on component c when alpha's first run sits in run p
        std::vector<std::vector<std::vector<int>>> constraints(r, std::vector<std::vector<int>>(m));
        std::vector<int> phases;
        for (int p = 0; p < r; ++p) {
            if ((shape.firstLabel + p) % 2 != runs[0].first) continue;
            phases.push_back(p);
            for (int j = 0; j <= t; ++j)
                constraints[p][run_component(shape.arrangement, m, (p + j) % r)].push_back(j);
        }
        auto fits = [&](int p, int c, int n) {
            for (int j : constraints[p][c]) {
                const int a = runs[j].second;
                if (j == 0 || j == t ? a > n : a != n) return false;
            }
            return true;
        };
        std::function<bool(int, const std::vector<int>&)> dfs = [&](int c, const std::vector<int>& alive) {
            if (c == m) {
                ++res.leaves;
                return !alive.empty();
            }
            for (int n = 1; n <= budget.maxCount; ++n) {
                if (++res.nodes > budget.maxNodes)
                    fail(ErrorKind::Budget, "hypothesis search exceeded " + std::to_string(budget.maxNodes) + " nodes");
                std::vector<int> next;
                for (int p : alive)
                    if (fits(p, c, n)) next.push_back(p);
                if (next.empty()) continue;
                counts[c] = n;
                if (dfs(c + 1, next)) return true;
            }
            return false;
        };
        if (!phases.empty() && dfs(0, phases)) {
            res.hypothesis = hypothesis_from_counts(shape.arrangement, shape.firstLabel, counts, geom);
            break;
        }
    }
    if (res.hypothesis) {
        res.period = infer_period(*res.hypothesis, geom);
        require(res.period && factor_of_periodic(alpha.letters, *res.period), ErrorKind::NumericFailure,
                "hypothesis search returned an inconsistent hypothesis");
    }
    return res;
}

SearchResult search_hypotheses_brute(const WindowWord& alpha, const BlockGeometry& geom, const SearchBudget& budget) {
    check_budget(budget);
    SearchResult res;
    res.gridSize = grid_size(budget);
    for (const auto& shape : grid_shapes(budget.maxComponents)) {
        std::vector<int> counts(shape.m, 1);
        for (;;) {
            ++res.nodes;
            ++res.leaves;
            if (res.nodes > budget.maxNodes)
                fail(ErrorKind::Budget, "hypothesis enumeration exceeded " + std::to_string(budget.maxNodes));
            const auto h = hypothesis_from_counts(shape.arrangement, shape.firstLabel, counts, geom);
            if (cover_consistent(alpha, h, geom)) {
                res.hypothesis = h;
                res.period = infer_period(h, geom);
                return res;
            }
            int i = shape.m - 1;
            while (i >= 0 && counts[i] == budget.maxCount) counts[i--] = 1;
            if (i < 0) break;
            ++counts[i];
        }
    }
    return res;
}

double ChainRealization::internal_length(int block) const {
    require(block >= 0 && block < blocks(), ErrorKind::InvalidArgument, "block index out of range");
    return hyp2::translation_length(group.cuffs[2 * block][1]);
}

ChainRealization realize_chain(const WindowWord& alpha, double L0, double L1, double sigma,
                               const ChainOptions& opt) {
    require(L0 > 0 && L1 > 0 && sigma > 0, ErrorKind::InvalidArgument, "chain lengths must be positive");
    for (char c : alpha.letters)
        require(c == '0' || c == '1', ErrorKind::InvalidArgument, "gluing pattern must be binary");
    const int n = alpha.size();
    Rng rng(opt.seed);
    auto twist = [&]() { return opt.randomTwists ? rng.uniform() : 0.0; };

    pantsurf::PantsGraph graph;
    for (int i = 0; i < n; ++i) {
        const double L = alpha.letters[i] == '0' ? L0 : L1;
        graph.pants.emplace_back(sigma, L, sigma);
        graph.pants.emplace_back(L, sigma, sigma);
    }
    for (int i = 0; i < n; ++i) {
        graph.edges.push_back({2 * i, 1, 2 * i + 1, 0, twist()});
        if (i + 1 < n) graph.edges.push_back({2 * i + 1, 1, 2 * i + 2, 0, twist()});
    }
    if (opt.closed) graph.edges.push_back({2 * n - 1, 1, 0, 0, twist()});

    ChainRealization out;
    out.group = pantsurf::build_graph_group(graph, 2 * alpha.offsetOfZero);
    out.L0 = L0;
    out.L1 = L1;
    out.sigma = sigma;
    out.alpha = alpha.letters;
    out.rootBlock = alpha.offsetOfZero;
    out.closed = opt.closed;
    return out;
}

nlohmann::json to_json(const CoverHypothesis& h) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto& c : h.components)
        comps.push_back({{"label", c.label}, {"volC", irslab::to_string(c.volC)}, {"boundaryCount", c.boundaryCount}});
    return {{"arrangement", to_string(h.arrangement)}, {"components", comps}};
}

nlohmann::json to_json(const SearchResult& r, const SearchBudget& b) {
    nlohmann::json j;
    j["consistentHypothesis"] = r.hypothesis ? to_json(*r.hypothesis) : nlohmann::json(nullptr);
    j["period"] = r.period ? nlohmann::json(*r.period) : nlohmann::json(nullptr);
    j["budget"] = {{"maxComponents", b.maxComponents},
                   {"maxCount", b.maxCount},
                   {"maxNodes", b.maxNodes},
                   {"nodesVisited", r.nodes},
                   {"hypothesesChecked", r.leaves},
                   {"gridSize", static_cast<double>(r.gridSize)}};
    return j;
}

}  // namespace irslab::glue
