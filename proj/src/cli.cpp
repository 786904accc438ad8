#include "irslab/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include "irslab/arith.hpp"
#include "irslab/chabauty.hpp"
#include "irslab/error.hpp"
#include "irslab/glue.hpp"
#include "irslab/pantsurf.hpp"
#include "irslab/rng.hpp"
#include "irslab/symdyn.hpp"

namespace irslab::cli {

namespace {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split(s, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(trim(t), &used));
            require(used == trim(t).size(), ErrorKind::InvalidArgument, "bad number '" + t + "'");
        } catch (const std::logic_error&) {
            fail(ErrorKind::InvalidArgument, "bad number '" + t + "'");
        }
    }
    return out;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    for (double x : parse_doubles(s)) {
        require(x == std::floor(x), ErrorKind::InvalidArgument, "expected integers in '" + s + "'");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

std::optional<std::string> read_file_if_exists(const std::string& path) {
    std::error_code ec;
    if (path.empty() || !std::filesystem::is_regular_file(path, ec)) return std::nullopt;
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// "thue-morse:8,16,32,64", a file (JSON array or one word per line) or comma-separated words.
symdyn::SubshiftFamily parse_family(const std::string& source) {
    if (source.rfind("thue-morse:", 0) == 0) {
        std::vector<std::size_t> lengths;
        for (int n : parse_ints(source.substr(11))) {
            require(n > 0, ErrorKind::InvalidArgument, "Thue-Morse prefix lengths must be positive");
            lengths.push_back(static_cast<std::size_t>(n));
        }
        return symdyn::thue_morse_family(lengths);
    }
    if (auto text = read_file_if_exists(source)) {
        const auto t = trim(*text);
        if (!t.empty() && t[0] == '[') return symdyn::family_from_json(json::parse(t));
        return symdyn::family_from_lines(t);
    }
    std::string lines = source;
    std::replace(lines.begin(), lines.end(), ',', '\n');
    return symdyn::family_from_lines(lines);
}

// "thue-morse:64", "periodic:001:60[:phase]", a file holding the word, or the word itself.
symdyn::Word parse_word(const std::string& source) {
    if (source.rfind("thue-morse:", 0) == 0) return symdyn::thue_morse(parse_ints(source.substr(11)).at(0));
    if (source.rfind("periodic:", 0) == 0) {
        const auto parts = split(source.substr(9), ':');
        require(parts.size() == 2 || parts.size() == 3, ErrorKind::InvalidArgument,
                "periodic words are written periodic:<period>:<length>[:<phase>]");
        const auto& p = parts[0];
        require(!p.empty(), ErrorKind::InvalidArgument, "empty period");
        const int len = parse_ints(parts[1]).at(0);
        const int phase = parts.size() == 3 ? parse_ints(parts[2]).at(0) : 0;
        symdyn::Word w;
        for (int i = 0; i < len; ++i) w += p[(phase + i) % p.size()];
        return w;
    }
    if (auto text = read_file_if_exists(source)) {
        auto t = trim(*text);
        if (!t.empty() && t[0] == '"') t = json::parse(t).get<std::string>();
        return t;
    }
    return source;
}

symdyn::ShiftMeasure parse_measure(const std::string& source) {
    const auto colon = source.find(':');
    require(colon != std::string::npos, ErrorKind::InvalidArgument,
            "measures are bernoulli:<p0,p1,...>, markov:<row;row;...> or periodic:<word>");
    const auto kind = source.substr(0, colon), rest = source.substr(colon + 1);
    symdyn::ShiftMeasure m;
    if (kind == "bernoulli") {
        m = symdyn::Bernoulli{parse_doubles(rest)};
    } else if (kind == "markov") {
        symdyn::Markov mk;
        for (const auto& row : split(rest, ';')) mk.P.push_back(parse_doubles(row));
        // stationary vector by power iteration
        const std::size_t n = mk.P.size();
        mk.pi.assign(n, 1.0 / std::max<std::size_t>(n, 1));
        for (int it = 0; it < 10000; ++it) {
            std::vector<double> next(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n && j < mk.P[i].size(); ++j) next[j] += mk.pi[i] * mk.P[i][j];
            mk.pi = next;
        }
        m = mk;
    } else if (kind == "periodic") {
        m = symdyn::PeriodicOrbit{rest};
    } else {
        fail(ErrorKind::InvalidArgument, "unknown measure '" + kind + "'");
    }
    symdyn::validate(m);
    return m;
}

json parse_json_arg(const std::string& source) {
    if (auto text = read_file_if_exists(source)) return json::parse(*text);
    return json::parse(source);
}

long default_root(long d, long p) {
    for (long r = 1; r < p; ++r)
        if ((r * r - d) % p == 0) return r;
    fail(ErrorKind::BadEmbedding, std::to_string(d) + " is not a nonzero square modulo " + std::to_string(p));
}

bool numeric_string(const std::string& s, double& v) {
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

bool close(double a, double b) {
    if (a == b) return true;
    if (std::isnan(a) && std::isnan(b)) return true;
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

void diff_rec(const json& a, const json& b, const std::string& path, std::vector<std::string>& out) {
    if (a.is_number_float() || b.is_number_float()) {
        if (!(a.is_number() && b.is_number() && close(a.get<double>(), b.get<double>()))) out.push_back(path);
        return;
    }
    if (a.is_number() && b.is_number()) {
        if (a != b) out.push_back(path);
        return;
    }
    if (a.is_string() && b.is_string()) {
        const auto &x = a.get_ref<const std::string&>(), &y = b.get_ref<const std::string&>();
        double u = 0, v = 0;
        if (x == y) return;
        if (!(numeric_string(x, u) && numeric_string(y, v) && close(u, v))) out.push_back(path);
        return;
    }
    if (a.type() != b.type()) {
        out.push_back(path);
        return;
    }
    if (a.is_object()) {
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) {
                out.push_back(path + "/" + it.key());
                continue;
            }
            diff_rec(it.value(), b[it.key()], path + "/" + it.key(), out);
        }
        for (auto it = b.begin(); it != b.end(); ++it)
            if (!a.contains(it.key())) out.push_back(path + "/" + it.key());
        return;
    }
    if (a.is_array()) {
        if (a.size() != b.size()) {
            out.push_back(path);
            return;
        }
        for (std::size_t i = 0; i < a.size(); ++i) diff_rec(a[i], b[i], path + "/" + std::to_string(i), out);
        return;
    }
    if (a != b) out.push_back(path);
}

// Result of one command before it is wrapped into a RunRecord.
struct Result {
    Result(json o = nullptr, std::optional<std::string> c = std::nullopt) : output(std::move(o)), csv(std::move(c)) {}

    json output;
    std::optional<std::string> csv;
    int exitCode = 0;
    std::vector<std::string> warnings;
};

struct Params {
    // globals
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "json";
    std::size_t budgetWords = words::kDefaultWordCap;
    std::uint64_t budgetHypotheses = 50'000'000;
    std::string config;
    // pants
    int radius = 2;
    std::string law = "point:4";
    int wordLen = 8;
    int trials = 1;
    bool prune = false;
    // subshift / freegeo
    std::string family;
    int L = 8;
    int pmax = 16;
    std::string word;
    std::string alpha;
    std::optional<int> offset;
    int positions = 0;
    // glue
    std::string vols = "1,1,1";
    std::string measure = "bernoulli:0.5,0.5";
    int samples = 0;
    int length = 1;
    int maxComponents = 8;
    int maxCount = 16;
    std::string lengths = "1,2,1.5";
    bool closed = false;
    bool randomTwists = false;
    // arith
    std::string a, b, q, qp, sqrtSpec;
    long p = 7;
    long d = 1;
    std::optional<long> root;
    // chabauty
    std::string groupA, groupB, group;
    double R = 5.0;
    int W = 6;
    std::string base;
    std::string period = "0";
    std::string ks = "1,2,4,8,16";
    int windowPeriods = 4;
    double pruneSlack = 6.0;
    // replay
    std::string recordPath;
    std::optional<std::uint64_t> replaySeed;
};

Result cmd_pants_sample(const Params& P) {
    const auto tree = pantsurf::TreeSpec::make(P.radius);
    const auto law = pantsurf::parse_law(P.law);
    const auto fn = pantsurf::sample_fn(tree, law, P.seed);
    const auto g = pantsurf::build_group(tree, fn);
    json j = pantsurf::to_json(g);
    j["law"] = pantsurf::describe(law);
    j["maxResidual"] = fmt17(g.max_residual);
    return {j};
}

Result cmd_pants_systole(const Params& P) {
    require(P.trials >= 1, ErrorKind::InvalidArgument, "--trials must be positive");
    const auto tree = pantsurf::TreeSpec::make(P.radius);
    const auto law = pantsurf::parse_law(P.law);
    json rows = json::array();
    std::string csv = pantsurf::systole_csv_header() + "\n";
    for (int i = 0; i < P.trials; ++i) {
        const auto s = derive_seed(P.seed, static_cast<std::uint64_t>(i));
        const auto fn = pantsurf::sample_fn(tree, law, s);
        const auto g = pantsurf::build_group(tree, fn);
        double l = 1e300;
        for (const auto& e : fn.edges) l = std::min(l, e.length);
        const auto res = pantsurf::systole_search(g, P.wordLen, {P.budgetWords, P.prune});
        const double star = pantsurf::star_bound(l, P.radius);
        rows.push_back({{"trial", i},
                        {"seed", s},
                        {"minEdgeLength", fmt17(l)},
                        {"starBound", fmt17(star)},
                        {"starBoundArcsinh", fmt17(pantsurf::star_bound_arcsinh(l, P.radius))},
                        {"systole", fmt17(res.value)},
                        {"word", words::format_word(res.word)},
                        {"words", res.words}});
        csv += pantsurf::systole_csv_row(s, l, P.radius, P.wordLen, star, res.value) + "\n";
    }
    return {{{"radius", P.radius}, {"W", P.wordLen}, {"law", pantsurf::describe(law)}, {"trials", rows}}, csv};
}

Result cmd_subshift_factors(const Params& P) {
    const auto fam = parse_family(P.family);
    const auto f = symdyn::factor_set(fam, P.L);
    return {{{"L", P.L}, {"count", f.size()}, {"factors", json(std::vector<std::string>(f.begin(), f.end()))}}};
}

Result cmd_subshift_periodic(const Params& P) {
    const auto fam = parse_family(P.family);
    const auto w = symdyn::find_periodic(fam, P.L, P.pmax);
    Result r;
    if (w) {
        r.output = {{"period", *w}, {"verdict", "found"}};
    } else if (!symdyn::sft_nonempty(fam, P.L)) {
        r.output = {{"period", "none"}, {"verdict", "empty"}};
    } else {
        // cycles exist, all longer than Pmax
        r.output = {{"period", "none"}, {"verdict", "none-within-pmax"}};
        r.exitCode = 2;
        r.warnings.push_back("no periodic point of period <= " + std::to_string(P.pmax) + "; budget-relative");
    }
    r.output["L"] = P.L;
    r.output["pmax"] = P.pmax;
    return r;
}

Result cmd_freegeo_axis(const Params& P) {
    const auto g = symdyn::parse_free_word(P.word);
    const auto ax = symdyn::axis_of(g);
    const int m = P.positions > 0 ? P.positions : 2;
    return {{{"word", g.str()},
             {"conjugator", ax.conjugator.str()},
             {"core", ax.core.str()},
             {"period", ax.period},
             {"window", symdyn::to_json(ax.window(m))}}};
}

Result cmd_freegeo_embed(const Params& P) {
    const auto w = parse_word(P.alpha);
    const auto win = P.offset ? symdyn::WindowWord(w, *P.offset) : symdyn::WindowWord::centered(w);
    return {{{"alpha", symdyn::to_json(win)}, {"geodesic", symdyn::to_json(symdyn::embed_string(win))}}};
}

Result cmd_glue_nu_prime(const Params& P) {
    const auto geom = glue::BlockGeometry::parse(P.vols);
    const auto m = parse_measure(P.measure);
    const double w = glue::nu_prime_weight(geom, m);
    json j = {{"weight", fmt17(w)}, {"vols", P.vols}, {"measure", P.measure}};
    if (P.samples > 0) {
        long ones = 0;
        for (int i = 0; i < P.samples; ++i)
            ones += glue::sample_nu_prime(geom, m, P.length, derive_seed(P.seed, static_cast<std::uint64_t>(i))).at(0) ==
                    '1';
        j["samples"] = P.samples;
        j["ones"] = ones;
        j["empirical"] = fmt17(static_cast<double>(ones) / P.samples);
        j["standardError"] = fmt17(std::sqrt(w * (1 - w) / P.samples));
    }
    return {j};
}

Result cmd_glue_cover_check(const Params& P) {
    const auto geom = glue::BlockGeometry::parse(P.vols);
    const auto alpha = symdyn::WindowWord::centered(parse_word(P.alpha));
    const glue::SearchBudget budget{P.maxComponents, P.maxCount, P.budgetHypotheses};
    const auto res = glue::search_hypotheses(alpha, geom, budget);
    Result r{glue::to_json(res, budget)};
    r.output["windowLength"] = alpha.size();
    if (!res.hypothesis) {
        r.exitCode = 2;
        r.warnings.push_back("no consistent hypothesis within the budget; budget-relative verdict");
    }
    return r;
}

Result cmd_glue_realize(const Params& P) {
    const auto len = parse_doubles(P.lengths);
    require(len.size() == 3, ErrorKind::InvalidArgument, "--lengths takes L0,L1,sigma");
    const auto w = parse_word(P.alpha);
    const auto win = P.offset ? symdyn::WindowWord(w, *P.offset) : symdyn::WindowWord::centered(w);
    const auto chain = glue::realize_chain(win, len[0], len[1], len[2], {P.closed, P.randomTwists, P.seed});
    json j = pantsurf::to_json(chain.group);
    j["rootBlock"] = chain.rootBlock;
    j["closed"] = chain.closed;
    json internal = json::array();
    for (int i = 0; i < chain.blocks(); ++i) internal.push_back(fmt17(chain.internal_length(i)));
    j["internalLengths"] = internal;
    return {j};
}

arith::PadicPlace place_from(long p, long d, std::optional<long> root) {
    return arith::PadicPlace(p, d, root ? *root : default_root(d, p));
}

Result cmd_arith_hilbert(const Params& P) {
    if (P.sqrtSpec.empty()) {
        const auto a = parse_rational(P.a), b = parse_rational(P.b);
        return {json(arith::hilbert_symbol(a, b, P.p))};
    }
    const auto parts = split(P.sqrtSpec, ':');
    require(parts.size() == 2, ErrorKind::InvalidArgument, "--sqrt takes d:root");
    const long d = parse_ints(parts[0]).at(0), r = parse_ints(parts[1]).at(0);
    const arith::PadicPlace place(P.p, d, r);
    const auto a = arith::parse_quad(P.a, d), b = arith::parse_quad(P.b, d);
    return {{{"a", a.str()},
             {"b", b.str()},
             {"p", P.p},
             {"embedding", {{"root", place.rootOfD}, {"symbol", arith::hilbert_symbol(a, b, place)}}},
             {"conjugate",
              {{"root", place.conjugate().rootOfD}, {"symbol", arith::hilbert_symbol(a, b, place.conjugate())}}}}};
}

Result cmd_arith_eps(const Params& P) {
    const auto q = arith::DiagonalForm::parse(P.q, P.d);
    const auto place = place_from(P.p, P.d, P.root);
    return {{{"form", q.str()},
             {"p", P.p},
             {"embedding", {{"root", place.rootOfD}, {"eps", arith::eps_invariant(q, place)}}},
             {"conjugate", {{"root", place.conjugate().rootOfD}, {"eps", arith::eps_invariant(q, place.conjugate())}}},
             {"disc", arith::disc(q).str()}}};
}

json signature_json(const arith::SignatureProfile& s) {
    return {{"plus", s.plus}, {"minus", s.minus}, {"admissible", s.admissible}};
}

Result cmd_arith_commensurable(const Params& P) {
    const auto q = arith::DiagonalForm::parse(P.q, P.d), qp = arith::DiagonalForm::parse(P.qp, P.d);
    const auto place = place_from(P.p, P.d, P.root);
    json emb = arith::to_json(arith::similarity_obstruction(q, qp, place));
    emb["root"] = place.rootOfD;
    json conj = arith::to_json(arith::similarity_obstruction(q, qp, place.conjugate()));
    conj["root"] = place.conjugate().rootOfD;
    return {{{"q", q.str()},
             {"qp", qp.str()},
             {"p", P.p},
             {"d", P.d},
             {"verdict", emb["verdict"]},
             {"embedding", emb},
             {"conjugate", conj},
             {"signatureQ", signature_json(arith::signature_check(q))},
             {"signatureQp", signature_json(arith::signature_check(qp))}}};
}

chabauty::BallOptions ball_options(const Params& P) { return {P.budgetWords, P.prune, P.pruneSlack}; }

Result cmd_chabauty_dist(const Params& P) {
    const auto A = chabauty::ball_set(chabauty::generators_from_json(parse_json_arg(P.groupA)), P.R, P.W, ball_options(P));
    const auto B = chabauty::ball_set(chabauty::generators_from_json(parse_json_arg(P.groupB)), P.R, P.W, ball_options(P));
    return {{{"R", P.R},
             {"W", P.W},
             {"sizeA", A.elements.size()},
             {"sizeB", B.elements.size()},
             {"distance", fmt17(chabauty::proxy_distance(A, B))}}};
}

Result cmd_chabauty_limitset(const Params& P) {
    const auto gens = chabauty::generators_from_json(parse_json_arg(P.group));
    hyp2::HPoint base(0.0, 1.0);
    if (!P.base.empty()) {
        const auto xy = parse_doubles(P.base);
        require(xy.size() == 2, ErrorKind::InvalidArgument, "--base takes x,y");
        base = hyp2::HPoint(xy[0], xy[1]);
    }
    json rows = json::array();
    std::string csv = "W,gap\n";
    for (int w = 1; w <= P.W; ++w) {
        const double gap = chabauty::direction_density(gens, base, w, P.budgetWords);
        rows.push_back({{"W", w}, {"gap", fmt17(gap)}});
        csv += std::to_string(w) + "," + fmt17(gap) + "\n";
    }
    return {{{"curve", rows}}, csv};
}

Result cmd_chabauty_lattice_limit(const Params& P) {
    const auto len = parse_doubles(P.lengths);
    require(len.size() == 3, ErrorKind::InvalidArgument, "--lengths takes L0,L1,sigma");
    chabauty::LatticeLimitOptions opt;
    opt.ks = parse_ints(P.ks);
    opt.R = P.R;
    opt.W = P.W;
    opt.windowPeriods = P.windowPeriods;
    opt.ball = {P.budgetWords, true, P.pruneSlack};
    const auto r = chabauty::lattice_limit_experiment(P.period, {len[0], len[1], len[2]}, opt);
    json rows = json::array();
    for (std::size_t i = 0; i < r.ks.size(); ++i)
        rows.push_back({{"k", r.ks[i]}, {"distance", fmt17(r.distances[i])}, {"closedSize", r.closedSizes[i]}});
    return {{{"period", P.period}, {"R", P.R}, {"W", P.W}, {"longSize", r.longSize}, {"curve", rows}},
            chabauty::lattice_limit_csv(r)};
}

// Option names of an app, for argument resolution.
struct OptInfo {
    std::string lname;
    std::vector<std::string> spellings;
    bool flag;
};

std::vector<OptInfo> options_of(const CLI::App* app) {
    std::vector<OptInfo> out;
    for (const CLI::Option* o : app->get_options()) {
        if (o->get_lnames().empty() || o->get_lnames()[0] == "help") continue;
        OptInfo info{o->get_lnames()[0], {}, o->get_type_size() == 0};
        for (const auto& l : o->get_lnames()) info.spellings.push_back("--" + l);
        for (const auto& s : o->get_snames()) info.spellings.push_back("-" + s);
        out.push_back(info);
    }
    return out;
}

bool present(const std::vector<std::string>& args, const OptInfo& o) {
    for (const auto& a : args)
        for (const auto& s : o.spellings)
            if (a == s || a.rfind(s + "=", 0) == 0) return true;
    return false;
}

std::string env_name(const std::string& lname) {
    std::string s = "IRSLAB_";
    for (char c : lname) s += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Usage, "cannot read config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, ErrorKind::Usage, "config line without '=': " + line);
        std::string key = trim(line.substr(0, eq));
        while (!key.empty() && key[0] == '-') key.erase(0, 1);
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::string value_of(const std::vector<std::string>& args, const std::string& spelling) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == spelling && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind(spelling + "=", 0) == 0) return args[i].substr(spelling.size() + 1);
    }
    return "";
}

class Cli {
public:
    Cli() : app_("Invariant random subgroup lab: constructions, samplers and cross-checks", "irslab") {
        app_.fallthrough();
        app_.require_subcommand(1);
        app_.add_option("--seed", P.seed, "master seed; trial i uses splitmix64(seed ^ splitmix64(i))");
        app_.add_option("--out", P.out, "write the RunRecord JSON here");
        app_.add_option("--format", P.format, "json or csv (curves only)")->check(CLI::IsMember({"json", "csv"}));
        app_.add_option("--budget-words", P.budgetWords, "cap on enumerated words");
        app_.add_option("--budget-hypotheses", P.budgetHypotheses, "cap on covering-search nodes");
        app_.add_option("--config", P.config, "flat key=value file mirroring the flags");

        auto* pants = app_.add_subcommand("pants", "random trees of pants");
        pants->require_subcommand(1);
        auto* ps = leaf(pants, "sample", "sample FN coordinates and build the surface group", cmd_pants_sample);
        ps->add_option("--radius", P.radius, "tree radius");
        ps->add_option("--law", P.law, "point:l, uniform:a,b, lognormal:m,s or texp:rate,cap");
        auto* py = leaf(pants, "systole", "word-enumeration systole per trial", cmd_pants_systole);
        py->add_option("--radius", P.radius, "tree radius");
        py->add_option("--law", P.law, "length law");
        py->add_option("-W,--words", P.wordLen, "word length bound");
        py->add_option("--trials", P.trials, "number of seeds");
        py->add_flag("--prune", P.prune, "prune prefixes (heuristic)");

        auto* sub = app_.add_subcommand("subshift", "window subshifts");
        sub->require_subcommand(1);
        auto* sf = leaf(sub, "factors", "factor set of length L", cmd_subshift_factors);
        sf->add_option("--family", P.family, "file, comma-separated words or thue-morse:8,16,...")->required();
        sf->add_option("-L", P.L, "factor length");
        auto* sp = leaf(sub, "periodic", "least periodic point of the window SFT", cmd_subshift_periodic);
        sp->add_option("--family", P.family, "file, comma-separated words or thue-morse:8,16,...")->required();
        sp->add_option("-L", P.L, "window length");
        sp->add_option("--pmax", P.pmax, "largest period searched");

        auto* fg = app_.add_subcommand("freegeo", "free-group geodesics");
        fg->require_subcommand(1);
        auto* fa = leaf(fg, "axis", "axis of a free-group element", cmd_freegeo_axis);
        fa->add_option("--word", P.word, "element, e.g. \"f0 f1^-1\"")->required();
        fa->add_option("--positions", P.positions, "window half-width in periods");
        auto* fe = leaf(fg, "embed", "geodesic of a binary string", cmd_freegeo_embed);
        fe->add_option("--alpha", P.alpha, "word, file, thue-morse:n or periodic:w:n")->required();
        fe->add_option("--offset", P.offset, "index of position 0 (default: centered)");

        auto* gl = app_.add_subcommand("glue", "shift-space gluings");
        gl->require_subcommand(1);
        auto* gn = leaf(gl, "nu-prime", "volume-reweighted marginal", cmd_glue_nu_prime);
        gn->add_option("--vols", P.vols, "vol0,vol1,volSigma");
        gn->add_option("--measure", P.measure, "bernoulli:p0,p1, markov:rows or periodic:word");
        gn->add_option("--samples", P.samples, "Monte Carlo samples");
        gn->add_option("--length", P.length, "window length per sample");
        auto* gc = leaf(gl, "cover-check", "search covering hypotheses for a window", cmd_glue_cover_check);
        gc->add_option("--alpha", P.alpha, "word, file, thue-morse:n or periodic:w:n")->required();
        gc->add_option("--vols", P.vols, "vol0,vol1,volSigma");
        gc->add_option("--max-components", P.maxComponents, "components K");
        gc->add_option("--max-count", P.maxCount, "count bound C");
        auto* gr = leaf(gl, "realize", "build the chain group of a window", cmd_glue_realize);
        gr->add_option("--alpha", P.alpha, "word, file, thue-morse:n or periodic:w:n")->required();
        gr->add_option("--offset", P.offset, "index of position 0 (default: centered)");
        gr->add_option("--lengths", P.lengths, "L0,L1,sigma");
        gr->add_flag("--closed", P.closed, "close the chain");
        gr->add_flag("--random-twists", P.randomTwists, "seeded random twists");

        auto* ar = app_.add_subcommand("arith", "quadratic-form arithmetic");
        ar->require_subcommand(1);
        auto* ah = leaf(ar, "hilbert", "Hilbert symbol at an odd prime", cmd_arith_hilbert);
        ah->add_option("-a", P.a, "first argument")->required();
        ah->add_option("-b", P.b, "second argument")->required();
        ah->add_option("-p", P.p, "odd prime");
        ah->add_option("--sqrt", P.sqrtSpec, "d:root, read a and b in Q(sqrt d)");
        auto* ae = leaf(ar, "eps", "Hasse invariant of a diagonal form", cmd_arith_eps);
        ae->add_option("--q", P.q, "comma-separated coefficients a+b√d")->required();
        ae->add_option("-p", P.p, "odd prime");
        ae->add_option("--d", P.d, "square-free d");
        ae->add_option("--root", P.root, "root of d mod p (default: smallest)");
        auto* ac = leaf(ar, "commensurable", "similarity obstructions for two forms", cmd_arith_commensurable);
        ac->add_option("--q", P.q, "coefficients of q")->required();
        ac->add_option("--qp", P.qp, "coefficients of q'")->required();
        ac->add_option("-p", P.p, "odd prime");
        ac->add_option("--d", P.d, "square-free d");
        ac->add_option("--root", P.root, "root of d mod p (default: smallest)");

        auto* ch = app_.add_subcommand("chabauty", "ball windows and limit sets");
        ch->require_subcommand(1);
        auto* cd = leaf(ch, "dist", "proxy distance between two groups", cmd_chabauty_dist);
        cd->add_option("--groupA", P.groupA, "JSON file or inline JSON with generators")->required();
        cd->add_option("--groupB", P.groupB, "JSON file or inline JSON with generators")->required();
        cd->add_option("-R", P.R, "operator-norm radius");
        cd->add_option("-W", P.W, "word length bound");
        cd->add_flag("--prune", P.prune, "prune far prefixes (heuristic)");
        cd->add_option("--prune-slack", P.pruneSlack, "displacement slack for pruning");
        auto* cl = leaf(ch, "limitset", "largest angular gap of orbit directions", cmd_chabauty_limitset);
        cl->add_option("--group", P.group, "JSON file or inline JSON with generators")->required();
        cl->add_option("-W", P.W, "largest word length");
        cl->add_option("--base", P.base, "base point x,y (default i)");
        auto* cll = leaf(ch, "lattice-limit", "closings of a periodic chain against the open chain",
                         cmd_chabauty_lattice_limit);
        cll->add_option("--period", P.period, "period word");
        cll->add_option("--lengths", P.lengths, "L0,L1,sigma");
        cll->add_option("-R", P.R, "operator-norm radius");
        cll->add_option("-W", P.W, "word length bound");
        cll->add_option("--ks", P.ks, "numbers of periods in the closings");
        cll->add_option("--window-periods", P.windowPeriods, "periods on each side in the open chain");
        cll->add_option("--prune-slack", P.pruneSlack, "displacement slack for pruning");

        replay_ = app_.add_subcommand("replay", "re-run a RunRecord and compare outputs");
        replay_->add_option("record", P.recordPath, "RunRecord JSON file")->required();
        replay_->add_option("--replay-seed", P.replaySeed, "override the recorded seed");
    }

    // Adds explicit values for options that the command line leaves unset: IRSLAB_<NAME> first,
    // then the config file. The result is a fully explicit argument list.
    std::vector<std::string> resolve(const std::vector<std::string>& args, const EnvLookup& env) {
        std::vector<const CLI::App*> chain{&app_};
        for (const auto& a : args) {
            if (a.empty() || a[0] == '-') continue;
            const CLI::App* sub = chain.back()->get_subcommand_no_throw(a);
            if (sub) chain.push_back(sub);
        }
        if (chain.size() >= 2 && chain[1] == replay_) return args;
        std::vector<std::string> out = args;
        std::string config = value_of(args, "--config");
        if (config.empty() && env) config = env("IRSLAB_CONFIG").value_or("");
        const auto kv = config.empty() ? std::map<std::string, std::string>{} : read_config(config);
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            for (const auto& o : options_of(*it)) {
                if (o.lname == "config" || present(out, o)) continue;
                std::optional<std::string> v;
                if (env) v = env(env_name(o.lname));
                if (!v) {
                    const auto k = kv.find(o.lname);
                    if (k != kv.end()) v = k->second;
                }
                if (!v) continue;
                if (o.flag) {
                    if (*v == "1" || *v == "true" || *v == "yes" || *v == "on") out.push_back("--" + o.lname);
                } else {
                    out.push_back("--" + o.lname);
                    out.push_back(*v);
                }
            }
        }
        // the seed is always recorded
        if (value_of(out, "--seed").empty()) {
            out.push_back("--seed");
            out.push_back("0");
        }
        return out;
    }

    void parse(const std::vector<std::string>& args) {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app_.parse(rev);
    }

    std::string help() const { return app_.help(); }
    bool is_replay() const { return replay_->parsed(); }

    Result execute() {
        for (auto& [sub, fn] : leaves_)
            if (sub->parsed()) return fn(P);
        fail(ErrorKind::Usage, "no command selected");
    }

    Params P;

private:
    CLI::App* leaf(CLI::App* parent, const std::string& name, const std::string& desc, Result (*fn)(const Params&)) {
        auto* s = parent->add_subcommand(name, desc);
        leaves_.emplace_back(s, fn);
        return s;
    }

    CLI::App app_;
    CLI::App* replay_ = nullptr;
    std::vector<std::pair<CLI::App*, Result (*)(const Params&)>> leaves_;
};

std::string error_json(std::string_view kind, const std::string& message) {
    return json{{"error", {{"kind", kind}, {"message", message}}}}.dump() + "\n";
}

std::string render(const Result& r, const std::string& format) {
    if (format == "csv" && r.csv) return *r.csv;
    return r.output.dump(2) + "\n";
}

Outcome execute_args(const std::vector<std::string>& args, const EnvLookup& env, bool allowReplay);

Outcome replay(const Params& P) {
    Outcome o;
    const auto text = read_file_if_exists(P.recordPath);
    require(text.has_value(), ErrorKind::Usage, "cannot read record '" + P.recordPath + "'");
    const json rec = json::parse(*text);
    require(rec.contains("config") && rec["config"].contains("argv") && rec.contains("outputs"),
            ErrorKind::InvalidArgument, "record lacks config.argv or outputs");
    std::vector<std::string> args = rec["config"]["argv"].get<std::vector<std::string>>();
    // the rerun must not overwrite the record being verified
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--out") args.erase(args.begin() + i, args.begin() + i + 2);
    std::vector<std::string> warnings;
    const std::string version = rec.value("toolVersion", "");
    if (version != kToolVersion)
        warnings.push_back(std::string(to_string(ErrorKind::VersionMismatch)) + ": record made by '" + version +
                           "', replaying with '" + kToolVersion + "'");
    if (P.replaySeed) {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--seed") args[i + 1] = std::to_string(*P.replaySeed);
    }
    const Outcome again = execute_args(args, nullptr, false);
    std::vector<std::string> diffs;
    if (again.record.is_null()) {
        diffs.push_back("/ (rerun failed: " + trim(again.err) + ")");
    } else {
        diffs = diff_outputs(rec["outputs"], again.record["outputs"]);
        if (rec.value("exitCode", 0) != again.exitCode) diffs.push_back("/exitCode");
    }
    const bool same = diffs.empty();
    json j = {{"verdict", same ? "identical" : "mismatch"}, {"differences", diffs}, {"warnings", warnings}};
    o.out = j.dump(2) + "\n";
    for (const auto& w : warnings) o.err += "warning: " + w + "\n";
    o.exitCode = same ? 0 : 1;
    return o;
}

Outcome execute_args(const std::vector<std::string>& args, const EnvLookup& env, bool allowReplay) {
    Outcome o;
    Cli cli;
    std::vector<std::string> resolved;
    try {
        resolved = cli.resolve(args, env);
        cli.parse(resolved);
    } catch (const CLI::CallForHelp&) {
        o.out = cli.help();
        return o;
    } catch (const CLI::ParseError& e) {
        o.exitCode = 1;
        o.err = error_json("Usage", e.what()) + cli.help();
        return o;
    } catch (const Error& e) {
        o.exitCode = 1;
        o.err = error_json(to_string(e.kind()), e.what()) + cli.help();
        return o;
    }
    try {
        if (cli.is_replay()) {
            if (!allowReplay) fail(ErrorKind::Usage, "a record cannot replay a replay");
            return replay(cli.P);
        }
        const auto start = std::chrono::steady_clock::now();
        const Result r = cli.execute();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        o.exitCode = r.exitCode;
        o.out = render(r, cli.P.format);
        for (const auto& w : r.warnings) o.err += "warning: " + w + "\n";
        o.record = {{"toolVersion", kToolVersion},
                    {"config", {{"argv", resolved}, {"seed", cli.P.seed}, {"format", cli.P.format}}},
                    {"wallTimeSeconds", secs},
                    {"outputs", r.output},
                    {"warnings", r.warnings},
                    {"exitCode", r.exitCode}};
        if (r.csv) o.record["csv"] = *r.csv;
        if (!cli.P.out.empty()) {
            std::ofstream f(cli.P.out);
            require(static_cast<bool>(f), ErrorKind::InvalidArgument, "cannot write '" + cli.P.out + "'");
            f << o.record.dump(2) << "\n";
        }
    } catch (const Error& e) {
        o.exitCode = 1;
        o.err += error_json(to_string(e.kind()), e.what());
        o.record = nullptr;
    } catch (const std::exception& e) {
        o.exitCode = 1;
        o.err += error_json("InvalidArgument", e.what());
        o.record = nullptr;
    }
    return o;
}

}  // namespace

std::optional<std::string> process_env(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
}

std::vector<std::string> diff_outputs(const nlohmann::json& a, const nlohmann::json& b) {
    std::vector<std::string> out;
    diff_rec(a, b, "", out);
    return out;
}

Outcome run(const std::vector<std::string>& args, const EnvLookup& env) { return execute_args(args, env, true); }

}  // namespace irslab::cli
