// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "irslab/arith.hpp"
#include "irslab/chabauty.hpp"
#include "irslab/cli.hpp"
#include "irslab/error.hpp"
#include "irslab/glue.hpp"
#include "irslab/hyp2.hpp"
#include "irslab/pantsurf.hpp"
#include "irslab/rng.hpp"
#include "irslab/symdyn.hpp"

using namespace irslab;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int n, const std::function<Verdict()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s [%.1f s]\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !v.pass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class... T>
std::string fmt(const char* f, T... xs) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, xs...);
    return buf;
}

// ---- 1: Hilbert symbol against the conic oracle -------------------------------------------

Verdict hilbert_grid() {
    const auto t0 = std::chrono::steady_clock::now();
    long pairs = 0, mismatches = 0;
    for (long p : {3L, 5L, 7L, 11L, 13L}) {
        std::vector<Rational> g;
        for (long k = 1; k <= 10; ++k)
            for (long s : {1L, -1L})
                for (long m : {1L, p, p * p}) g.emplace_back(s * k * m);
        for (const auto& a : g)
            for (const auto& b : g) {
                mismatches += arith::hilbert_symbol(a, b, p) != arith::hilbert_oracle(a, b, p);
                ++pairs;
            }
    }
    const double t = seconds_since(t0);
    return {mismatches == 0 && t < 60.0, fmt("%ld pairs, %ld mismatches, %.1f s (limit 60 s)", pairs, mismatches, t)};
}

// ---- 2, 3: similarity obstructions over Q(sqrt 2) at p = 7 ---------------------------------

Verdict eps_example() {
    const arith::PadicPlace place(7, 2, 3);
    const auto q = arith::DiagonalForm::parse("1,1,1,1,-3√2", 2);
    const auto qp = arith::DiagonalForm::parse("7,1,1,1,-3√2", 2);
    const int epsQp = arith::eps_invariant(qp, place);
    const long u = arith::nonsquare_unit(7);
    std::ostringstream lam;
    bool allPlus = true;
    for (long l : {1L, 7L, u, 7 * u}) {
        const int e = arith::eps_invariant(q.scaled(arith::QuadElem(l, 0, 2)), place);
        allPlus &= e == 1;
        lam << " eps(" << l << "q)=" << e;
    }
    const auto r = arith::similarity_obstruction(q, qp, place);
    const bool ok = epsQp == -1 && allPlus && r.verdict == arith::Verdict::ObstructedByEps && r.epsQPrime == -1;
    return {ok, fmt("eps(q')=%d;%s; verdict %s", epsQp, lam.str().c_str(), arith::to_string(r.verdict).c_str())};
}

Verdict disc_example() {
    const arith::PadicPlace place(7, 2, 3);
    const auto q = arith::DiagonalForm::parse("1,1,1,-3√2", 2);
    const auto qp = arith::DiagonalForm::parse("7,1,1,-3√2", 2);
    const auto r = arith::similarity_obstruction(q, qp, place);
    return {r.verdict == arith::Verdict::ObstructedByDisc && !r.discClassesEqual,
            "a1/a1' = 1/7, verdict " + arith::to_string(r.verdict)};
}

// ---- 4: pants trace identities -----------------------------------------------------------

Verdict pants_traces() {
    Rng rng(4);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const pantsurf::PantsLengths l(rng.uniform(0.5, 8.0), rng.uniform(0.5, 8.0), rng.uniform(0.5, 8.0));
        const auto p = pantsurf::pants_group(l);
        for (int s = 0; s < 3; ++s) worst = std::max(worst, std::abs(hyp2::translation_length(p.cuff(s)) - l[s]));
    }
    return {worst <= 1e-9, fmt("100 triples in [0.5, 8]^3, max |length - target| = %.2e (tol 1e-9)", worst)};
}

// ---- 5: systole lower bound on truncated trees --------------------------------------------

Verdict tree_systole() {
    pantsurf::SearchOptions opt;
    opt.prune = true;
    std::ostringstream out;
    bool ok = true;
    for (double l : {4.0, 6.0})
        for (int R : {2, 3}) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto tree = pantsurf::TreeSpec::make(R);
            const double bound = pantsurf::star_bound_arcsinh(l, R);
            int violations = 0;
            double lowest = 1e300;
            for (int s = 0; s < 50; ++s) {
                const auto g = pantsurf::build_group(tree, pantsurf::sample_fn(tree, pantsurf::PointMass{l}, derive_seed(5, s)));
                const double sys = pantsurf::systole_oracle(g, 8, opt);
                lowest = std::min(lowest, sys);
                violations += sys < bound;
            }
            const double t = seconds_since(t0);
            ok &= violations == 0 && t < 300.0;
            out << fmt(" [l=%g R=%d: min systole %.6g, bound %.3g, sinh-variant %.3g, %d violations, %.1f s]", l, R,
                       lowest, bound, pantsurf::star_bound(l, R), violations, t);
        }
    return {ok, "W=8, 50 seeds per configuration:" + out.str()};
}

// ---- 6: injectivity radius percentiles under an unbounded law ------------------------------

double percentile99(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(v.size()))) - 1;
    return v[idx];
}

Verdict inj_trend() {
    const pantsurf::LengthLaw law = pantsurf::LogNormal{1.0, 0.5};
    constexpr int kSeeds = 1000, kW = 6, kBoot = 400;
    pantsurf::SearchOptions opt;
    opt.prune = true;
    opt.cap = 100'000'000;
    std::vector<std::vector<double>> values(3, std::vector<double>(kSeeds, std::nan("")));
    std::vector<bool> usable(kSeeds, true);
    for (int R = 1; R <= 3; ++R) {
        const auto tree = pantsurf::TreeSpec::make(R);
        for (int s = 0; s < kSeeds; ++s) {
            try {
                const auto g = pantsurf::build_group(tree, pantsurf::sample_fn(tree, law, derive_seed(6, s)));
                const auto frame = pantsurf::sample_base_frame(pantsurf::pants_group(g.graph.pants[0]), derive_seed(66, s));
                values[R - 1][s] = pantsurf::inj_radius_at(g, frame, kW, opt);
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NumericFailure) throw;
                usable[s] = false;
            }
        }
    }
    std::vector<int> kept;
    for (int s = 0; s < kSeeds; ++s)
        if (usable[s]) kept.push_back(s);
    std::vector<double> p99(3), se(3);
    Rng rng(606);
    for (int r = 0; r < 3; ++r) {
        std::vector<double> v;
        for (int s : kept) v.push_back(values[r][s]);
        p99[r] = percentile99(v);
        double sum = 0, sumSq = 0;
        for (int b = 0; b < kBoot; ++b) {
            std::vector<double> res(v.size());
            for (auto& x : res) x = v[rng.below(v.size())];
            const double q = percentile99(res);
            sum += q;
            sumSq += q * q;
        }
        se[r] = std::sqrt(std::max(0.0, sumSq / kBoot - (sum / kBoot) * (sum / kBoot)));
    }
    const bool ok = p99[1] >= p99[0] - se[1] && p99[2] >= p99[1] - se[2];
    return {ok, fmt("LogNormal(1, 0.5), W=%d, %zu of %d seeds (others NumericFailure): p99 = %.4f / %.4f / %.4f "
                    "for R = 1 / 2 / 3, bootstrap SE %.4f / %.4f / %.4f",
                    kW, kept.size(), kSeeds, p99[0], p99[1], p99[2], se[0], se[1], se[2])};
}

// ---- 7: periodic points of window SFTs ----------------------------------------------------

// Every length <= L factor of the bi-infinite repetition of w is a factor of some sample.
bool periodic_sound(const symdyn::Word& w, const symdyn::SubshiftFamily& fam, int L) {
    std::string rep;
    while (rep.size() < w.size() + static_cast<std::size_t>(L)) rep += w;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (int len = 1; len <= L; ++len)
            if (!symdyn::admits(rep.substr(i, static_cast<std::size_t>(len)), fam)) return false;
    return true;
}

Verdict subshift_periodicity() {
    const auto tm = symdyn::thue_morse_family({8, 16, 32, 64});
    const auto tmAnswer = symdyn::find_periodic(tm, 8, 16);
    const auto tm18 = symdyn::find_periodic(tm, 18, 16);
    const bool tmOk = !tmAnswer.has_value();

    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(7);
    int instances = 0, attempts = 0, some = 0, sound = 0;
    while (instances < 100 && attempts < 100000) {
        ++attempts;
        symdyn::SubshiftFamily fam;
        const int count = 1 + static_cast<int>(rng.below(3));
        for (int i = 0; i < count; ++i) {
            symdyn::Word w;
            const int len = 6 + static_cast<int>(rng.below(25));
            for (int j = 0; j < len; ++j) w += symdyn::letter_char(static_cast<int>(rng.below(2)));
            fam.samples.push_back(w);
        }
        const int L = 2 + static_cast<int>(rng.below(5));
        if (!symdyn::sft_nonempty(fam, L)) continue;
        ++instances;
        // a nonempty SFT has a cycle through at most 2^(L-1) block vertices
        const auto w = symdyn::find_periodic(fam, L, 1 << (L - 1));
        if (!w) continue;
        ++some;
        sound += periodic_sound(*w, fam, L) && symdyn::periodic_admissible(*w, fam, L);
    }
    const double t = seconds_since(t0);
    const bool randOk = instances == 100 && some == 100 && sound == 100 && t < 30.0;
    return {tmOk && randOk,
            fmt("Thue-Morse L=8 Pmax=16 -> %s (expected none; L=18 gives %s); random SFTs: %d nonempty of %d drawn, "
                "%d Some, %d sound, %.1f s",
                tmAnswer ? tmAnswer->c_str() : "none", tm18 ? tm18->c_str() : "none", instances, attempts, some, sound,
                t)};
}

// ---- 8: covering search -------------------------------------------------------------------

Verdict covering() {
    const auto t0 = std::chrono::steady_clock::now();
    const glue::BlockGeometry unit(1, 1, 1);
    std::string periodic;
    for (int i = 0; i < 20; ++i) periodic += "001";
    const auto alpha = symdyn::WindowWord::centered(periodic);
    const auto r = glue::search_hypotheses(alpha, unit, {});
    const auto inferred = r.hypothesis ? glue::infer_period(*r.hypothesis, unit) : std::nullopt;
    const bool consistent = r.hypothesis && glue::cover_consistent(alpha, *r.hypothesis, unit);
    const bool periodicOk = inferred && *inferred == "001" && consistent;

    const auto tmAlpha = symdyn::WindowWord::centered(symdyn::thue_morse(64));
    const auto tm = glue::search_hypotheses(tmAlpha, unit, {8, 16});
    const auto cliRun = cli::run({"glue", "cover-check", "--alpha", "thue-morse:64", "--vols", "1,1,1",
                                  "--max-components", "8", "--max-count", "16"},
                                 [](const std::string&) { return std::optional<std::string>(); });
    const double t = seconds_since(t0);
    const bool ok = periodicOk && !tm.hypothesis && cliRun.exitCode == 2 && t < 120.0;
    return {ok, fmt("(001) window of 60: period %s, consistent %s; Thue-Morse 64: %s over %llu nodes, CLI exit %d; "
                    "%.1f s (limit 120 s)",
                    inferred ? inferred->c_str() : "none", consistent ? "true" : "false",
                    tm.hypothesis ? "hypothesis found" : "no hypothesis", static_cast<unsigned long long>(tm.nodes),
                    cliRun.exitCode, t)};
}

// ---- 9: volume reweighting ------------------------------------------------------------------

Verdict nu_prime() {
    const glue::BlockGeometry geom(1, 3, 1);
    const symdyn::ShiftMeasure m = symdyn::Bernoulli{{0.5, 0.5}};
    const double w = glue::nu_prime_weight(geom, m);
    // the reweighted marginal of label 1 is p1 v1 / (p0 v0 + p1 v1)
    const double expected = 0.5 * 3 / (0.5 * 1 + 0.5 * 3);
    constexpr int kSamples = 100'000;
    long ones = 0;
    for (int i = 0; i < kSamples; ++i) ones += glue::sample_nu_prime(geom, m, 1, derive_seed(9, i)).at(0) == '1';
    const double emp = static_cast<double>(ones) / kSamples;
    return {w == 0.75 && expected == 0.75 && std::abs(emp - 0.75) <= 0.02,
            fmt("weight %.17g (exact 0.75), empirical %.5f over %d samples (tol 0.02)", w, emp, kSamples)};
}

// ---- 10: chain closings converge to the long chain -----------------------------------------

Verdict lattice_limit() {
    const auto r = chabauty::lattice_limit_experiment("0", {1.0, 2.0, 1.5});
    bool mono = true;
    std::ostringstream d;
    for (std::size_t i = 0; i < r.distances.size(); ++i) {
        if (i > 0) mono &= r.distances[i] <= r.distances[i - 1];
        d << (i ? ", " : "") << "k=" << r.ks[i] << ": " << r.distances[i];
    }
    const bool ok = mono && r.distances.size() == 5 && r.distances.back() < 1e-6;
    return {ok, "R=5, W=6, " + d.str() + " (ball of " + std::to_string(r.longSize) + " elements)"};
}

// ---- 11: north-south dynamics -----------------------------------------------------------

using Big = boost::multiprecision::cpp_bin_float_50;

const Big kBigPi = boost::math::constants::pi<Big>();

Big normalize_big(Big x) {
    const Big two = 2 * kBigPi;
    x = fmod(x, two);
    if (x < 0) x += two;
    return x;
}

// Endpoint angles of h^k(U) from the Moebius action on projective vectors, in 50 digits.
struct BigArc {
    Big start, end;
    Big length() const { return normalize_big(end - start); }
    Big complement() const { return normalize_big(start - end); }
};

BigArc big_image(const std::array<Big, 4>& P, double s, double e) {
    auto image = [&](double theta) {
        const Big half = Big(theta) / 2;
        const Big v0 = -cos(half), v1 = sin(half);
        const Big w0 = P[0] * v0 + P[1] * v1, w1 = P[2] * v0 + P[3] * v1;
        return normalize_big(2 * atan2(w1, -w0));
    };
    return {image(s), image(e)};
}

Verdict north_south() {
    Rng rng(11);
    int nestedOk = 0, oracleNestedOk = 0, decayOk = 0;
    double worstRel = 0.0, worstFactor = 1.0, worstRate = 0.0;
    for (int i = 0; i < 100; ++i) {
        hyp2::Isometry g;
        for (;;) {
            const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(-2, 2), d = rng.uniform(-2, 2);
            if (a * d - b * c > 0.1) {
                g = hyp2::Isometry(a, b, c, d);
                break;
            }
        }
        const hyp2::Isometry h = g * hyp2::Isometry::translation(rng.uniform(0.3, 3.0)) * g.inverse();
        const double ell = hyp2::translation_length(h);
        const auto fp = hyp2::fixed_points(h);
        const double towardsA = hyp2::normalize_angle(fp.attracting.theta - fp.repelling.theta);
        const double towardsB = 2 * std::numbers::pi - towardsA;
        const hyp2::Arc U{hyp2::normalize_angle(fp.repelling.theta - rng.open_uniform() * towardsB),
                          hyp2::normalize_angle(fp.repelling.theta + rng.open_uniform() * towardsA)};
        const auto arcs = hyp2::ns_iterate(h, U, 20);

        const auto& m = h.entries();
        std::array<Big, 4> P{1, 0, 0, 1};
        std::vector<BigArc> big;
        for (int k = 0; k < 20; ++k) {
            P = {P[0] * m[0] + P[1] * m[2], P[0] * m[1] + P[1] * m[3], P[2] * m[0] + P[3] * m[2], P[2] * m[1] + P[3] * m[3]};
            big.push_back(big_image(P, U.start, U.end));
        }
        bool nested = true, oracleNested = true, decay = true;
        const double c0 = U.complement_length();
        for (int k = 0; k < 20; ++k) {
            const double c = arcs[k].complement_length();
            const double rel = std::abs(c / static_cast<double>(big[k].complement()) - 1.0);
            worstRel = std::max(worstRel, rel);
            const double factor = c / (c0 * std::exp(-(k + 1) * ell));
            worstFactor = std::max(worstFactor, std::max(factor, 1.0 / factor));
            decay &= factor >= 0.5 && factor <= 2.0;
            if (k + 1 < 20) {
                nested &= arcs[k].strictly_inside(arcs[k + 1]);
                const Big off = normalize_big(big[k].start - big[k + 1].start);
                oracleNested &= off > 0 && off + big[k].length() < big[k + 1].length();
            }
        }
        const double lastRate = std::log(arcs[19].complement_length() / arcs[18].complement_length());
        worstRate = std::max(worstRate, std::abs(lastRate + ell));
        nestedOk += nested;
        oracleNestedOk += oracleNested;
        decayOk += decay;
    }
    const bool ok = nestedOk == 100 && oracleNestedOk == 100 && worstRel < 1e-9 && decayOk == 100;
    return {ok, fmt("strictly nested %d/100 (50-digit oracle %d/100), complement vs oracle max rel err %.1e; "
                    "c_k/(c_0 e^-k l) within [1/2, 2] for all k in %d/100, worst factor %.3g; "
                    "max |log(c_20/c_19) + l| = %.1e",
                    nestedOk, oracleNestedOk, worstRel, decayOk, worstFactor, worstRate)};
}

}  // namespace

int main() {
    criterion(1, hilbert_grid);
    criterion(2, eps_example);
    criterion(3, disc_example);
    criterion(4, pants_traces);
    criterion(5, tree_systole);
    criterion(6, inj_trend);
    criterion(7, subshift_periodicity);
    criterion(8, covering);
    criterion(9, nu_prime);
    criterion(10, lattice_limit);
    criterion(11, north_south);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
