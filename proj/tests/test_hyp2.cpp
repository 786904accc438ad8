#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "irslab/error.hpp"
#include "irslab/hyp2.hpp"

using namespace irslab;
using namespace irslab::hyp2;

namespace {

Isometry random_isometry(std::mt19937_64& rng, double spread = 2.0) {
    std::uniform_real_distribution<double> u(-spread, spread);
    for (;;) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        if (a * d - b * c > 0.1) return {a, b, c, d};
    }
}

Isometry random_hyperbolic(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> t(0.3, 3.0);
    const Isometry h = random_isometry(rng);
    return h * Isometry::translation(t(rng)) * h.inverse();
}

HPoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> x(-3, 3), ly(-2, 2);
    return {x(rng), std::exp(ly(rng))};
}

// Crude pattern search for min_z dist(z, g z); independent of the trace formula.
double min_displacement(const Isometry& g, HPoint start) {
    double x = start.x, ly = std::log(start.y), step = 1.0;
    auto f = [&](double xx, double yy) { return dist(HPoint(xx, std::exp(yy)), g.apply(HPoint(xx, std::exp(yy)))); };
    double best = f(x, ly);
    while (step > 1e-10) {
        bool moved = false;
        for (auto [dx, dy] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}}) {
            const double v = f(x + dx * step, ly + dy * step);
            if (v < best) {
                best = v;
                x += dx * step;
                ly += dy * step;
                moved = true;
                break;
            }
        }
        if (!moved) step /= 2;
    }
    return best;
}

}  // namespace

TEST_CASE("compose basics") {
    const Isometry g(2.0, 1.0, 1.0, 1.0);
    CHECK(matrix_distance(compose(Isometry::identity(), g), g) < 1e-15);
    CHECK((g * g.inverse()).is_identity(1e-14));
    const double e = std::numbers::e;
    const Isometry d = compose(Isometry(e, 0, 0, 1 / e), Isometry(e, 0, 0, 1 / e));
    CHECK(d.a() == doctest::Approx(e * e).epsilon(1e-15));
    CHECK(d.d() == doctest::Approx(1 / (e * e)).epsilon(1e-15));
    CHECK(std::abs(d.b()) < 1e-300);
}

TEST_CASE("canonical sign and determinant") {
    const Isometry g(-2.0, -1.0, -1.0, -1.0);
    CHECK(g.a() > 0);
    CHECK(g == Isometry(2.0, 1.0, 1.0, 1.0));
    const Isometry h(0.0, -1.0, 1.0, 0.0);
    CHECK(h.b() > 0);
    CHECK_THROWS_AS(Isometry(1.0, 2.0, 2.0, 1.0), Error);

    std::mt19937_64 rng(7);
    Isometry acc;
    for (int i = 0; i < 10000; ++i) {
        acc = acc * random_isometry(rng, 1.0);
        if (acc.op_norm() > 1e3) acc = Isometry::moving_i_to(acc.apply(HPoint(0, 1))).inverse() * acc;
    }
    CHECK(std::abs(acc.det() - 1.0) <= 1e-12);
}

TEST_CASE("classify") {
    CHECK(classify(Isometry(2, 0, 0, 0.5)) == IsometryClass::Hyperbolic);
    CHECK(classify(Isometry::rotation(std::numbers::pi / 3)) == IsometryClass::Elliptic);
    CHECK(classify(Isometry(1, 1, 0, 1)) == IsometryClass::Parabolic);
    CHECK(classify(Isometry::identity()) == IsometryClass::Elliptic);
    CHECK_THROWS_AS(classify(Isometry(1, 1, 0, 1), true), Error);
    try {
        classify(Isometry(1, 1, 0, 1), true);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::AmbiguousClass);
    }
}

TEST_CASE("translation length") {
    CHECK(translation_length(Isometry::translation(1.7)) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(translation_length(Isometry(std::exp(1.0), 0, 0, std::exp(-1.0))) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(translation_length(Isometry::rotation(1.0)), Error);

    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Isometry g = random_hyperbolic(rng);
        const Isometry h = random_isometry(rng);
        CHECK(std::abs(translation_length(h * g * h.inverse()) - translation_length(g)) <= 1e-9);
    }
    for (int i = 0; i < 10; ++i) {
        const Isometry g = random_hyperbolic(rng);
        CHECK(std::abs(min_displacement(g, random_point(rng)) - translation_length(g)) < 1e-6);
    }
}

TEST_CASE("distance") {
    CHECK(dist(HPoint(0, 1), HPoint(0, 1)) == 0.0);
    CHECK(dist(HPoint(0, 1), HPoint(0, std::numbers::e)) == doctest::Approx(1.0).epsilon(1e-14));
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const HPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
        CHECK(dist(a, c) <= dist(a, b) + dist(b, c) + 1e-12);
        const double d = dist(a, b);
        CHECK(dist(b, a) == doctest::Approx(d));
        // closed form from the definition
        const double ref = std::acosh(1 + ((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y)) / (2 * a.y * b.y));
        CHECK(std::abs(d - ref) < 1e-7 * std::max(1.0, ref));
        const Isometry g = random_isometry(rng);
        CHECK(std::abs(dist(g.apply(a), g.apply(b)) - d) < 1e-9);
    }
}

TEST_CASE("boundary points") {
    CHECK(BoundaryPoint::from_real(0.0).theta == doctest::Approx(std::numbers::pi));
    CHECK(BoundaryPoint::from_real(1e300).theta < 1e-12);
    CHECK(BoundaryPoint(-0.5).theta == doctest::Approx(2 * std::numbers::pi - 0.5));
    // x = -cot(theta/2)
    const BoundaryPoint p = BoundaryPoint::from_real(2.5);
    CHECK(-1.0 / std::tan(p.theta / 2) == doctest::Approx(2.5));
}

TEST_CASE("fixed points") {
    const Isometry g(std::numbers::e, 0, 0, 1 / std::numbers::e);
    const auto fp = fixed_points(g);
    CHECK(std::min(fp.attracting.theta, 2 * std::numbers::pi - fp.attracting.theta) < 1e-12);
    CHECK(fp.repelling.theta == doctest::Approx(std::numbers::pi));
    CHECK_THROWS_AS(fixed_points(Isometry::rotation(0.3)), Error);

    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const Isometry h = random_hyperbolic(rng);
        const auto f = fixed_points(h);
        auto close = [](double a, double b) {
            const double d = std::abs(a - b);
            return std::min(d, 2 * std::numbers::pi - d) < 1e-8;
        };
        CHECK(close(h.apply(f.attracting).theta, f.attracting.theta));
        CHECK(close(h.apply(f.repelling).theta, f.repelling.theta));
        // numeric derivative of the boundary action
        auto deriv = [&](double t) {
            const double e = 1e-6;
            double d = h.apply(BoundaryPoint(t + e)).theta - h.apply(BoundaryPoint(t - e)).theta;
            if (d > std::numbers::pi) d -= 2 * std::numbers::pi;
            if (d < -std::numbers::pi) d += 2 * std::numbers::pi;
            return std::abs(d) / (2 * e);
        };
        CHECK(deriv(f.repelling.theta) > 1.0);
        CHECK(deriv(f.attracting.theta) < 1.0);
        CHECK(deriv(f.repelling.theta) == doctest::Approx(h.boundary_derivative(f.repelling)).epsilon(1e-5));
    }
}

TEST_CASE("axis and cuff charts") {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 50; ++i) {
        const Isometry g = random_hyperbolic(rng);
        const Isometry h = Isometry::translation(4.0) * random_hyperbolic(rng) * Isometry::translation(-4.0);
        const auto f = fixed_points(g);
        const Isometry c = axis_chart(g);
        auto same = [](double a, double b) {
            const double d = std::abs(a - b);
            return std::min(d, 2 * std::numbers::pi - d) < 1e-9;
        };
        CHECK(same(c.apply(BoundaryPoint(0.0)).theta, f.attracting.theta));
        CHECK(same(c.apply(BoundaryPoint(std::numbers::pi)).theta, f.repelling.theta));
        const Isometry conj = c.inverse() * g * c;
        CHECK(std::abs(conj.b()) < 1e-9);
        CHECK(std::abs(conj.c()) < 1e-9);
        CHECK(conj.a() > 1.0);
        try {
            const Isometry fc = cuff_chart(g, h);
            const HPoint foot = fc.apply(HPoint(0, 1));
            // the foot realizes the distance from axis(h) to the chosen axis point
            const Isometry ch = axis_chart(h);
            double best = 1e300;
            for (double s = -30; s <= 30; s += 0.01)
                best = std::min(best, dist(foot, ch.apply(HPoint(0, std::exp(s)))));
            double other = 1e300;
            for (double s : {-0.3, 0.3}) {
                const HPoint q = fc.apply(HPoint(0, std::exp(s)));
                for (double t = -30; t <= 30; t += 0.01) other = std::min(other, dist(q, ch.apply(HPoint(0, std::exp(t)))));
            }
            CHECK(best < other);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::NumericFailure);
        }
    }
}

TEST_CASE("side of axis and reflection") {
    const Isometry g = Isometry::translation(1.0);
    CHECK(side_of_axis(g, HPoint(1, 1)) == 1);
    CHECK(side_of_axis(g, HPoint(-1, 1)) == -1);
    CHECK(side_of_axis(g, HPoint(0, 3)) == 0);
    CHECK(side_of_axis(g.inverse(), HPoint(1, 1)) == -1);

    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i) {
        const HPoint p = random_point(rng), q = random_point(rng), z = random_point(rng);
        const HPoint r = reflect_across(p, q, z);
        CHECK(dist(r, p) == doctest::Approx(dist(z, p)).epsilon(1e-8));
        CHECK(dist(r, q) == doctest::Approx(dist(z, q)).epsilon(1e-8));
        const HPoint back = reflect_across(p, q, r);
        CHECK(dist(back, z) < 1e-7);
    }
    const HPoint p(0, 1);
    CHECK(direction_towards(p, HPoint(0, 2)) == doctest::Approx(0.0));
    CHECK(direction_towards(p, HPoint(1, 1)) > 0.0);
}

TEST_CASE("klein model straightens geodesics") {
    const HPoint a(-1, 2), b(2, 0.5);
    const Isometry c = axis_chart(Isometry::moving_i_to(a) * Isometry::translation(1) * Isometry::moving_i_to(a).inverse());
    (void)c;
    const cplx ka = to_klein(a), kb = to_klein(b);
    // midpoint along the geodesic
    const Isometry t = Isometry::moving_i_to(a).inverse();
    const double phi = direction_towards(a, b);
    const double d = dist(a, b);
    const cplx w = std::polar(std::tanh(d / 4), phi);
    const HPoint mid = t.inverse().apply(from_disk(w));
    CHECK(dist(a, mid) == doctest::Approx(d / 2).epsilon(1e-10));
    const cplx km = to_klein(mid);
    const double cross = (kb - ka).real() * (km - ka).imag() - (kb - ka).imag() * (km - ka).real();
    CHECK(std::abs(cross) < 1e-12);
}

TEST_CASE("north-south iteration") {
    const Isometry h(std::numbers::e, 0, 0, 1 / std::numbers::e);
    const Arc U{std::numbers::pi - 0.1, std::numbers::pi + 0.1};
    CHECK(ns_iterate(h, U, 0).empty());
    const auto arcs = ns_iterate(h, U, 20);
    REQUIRE(arcs.size() == 20);
    double prev = U.complement_length();
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        const double c = arcs[k].complement_length();
        CHECK(c < prev);
        // closed form: the complement is the image of [U.end, U.start] under z -> e^{2k} z
        const double x0 = -1 / std::tan(U.end / 2), x1 = -1 / std::tan(U.start / 2);
        const double s = std::exp(2.0 * (k + 1));
        const double t0 = 2 * std::atan2(1.0, -x0 * s), t1 = 2 * std::atan2(1.0, -x1 * s);
        const double closed = (2 * std::numbers::pi - t0) + t1;
        CHECK(c == doctest::Approx(closed).epsilon(1e-6));
        prev = c;
    }
    for (std::size_t k = 0; k + 1 < arcs.size(); ++k) CHECK(arcs[k].strictly_inside(arcs[k + 1]));
    // the angle endpoints agree with a direct application of h
    const Arc direct = apply(h, U);
    CHECK(std::abs(normalize_angle(direct.start - arcs[0].start)) < 1e-12);
    CHECK(arcs[0].length() == doctest::Approx(direct.length()).epsilon(1e-12));

    CHECK_THROWS_AS(ns_iterate(h, Arc{-0.1, 0.1}, 3), Error);
    CHECK_THROWS_AS(ns_iterate(Isometry::rotation(0.5), U, 3), Error);
}

TEST_CASE("json round trip") {
    const Isometry g(1.25, -0.5, 0.75, 0.5);
    const auto j = to_json(g);
    CHECK(j.size() == 4);
    CHECK(j[0].is_string());
    CHECK(isometry_from_json(j) == g);
}
