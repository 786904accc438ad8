#include "irslab/hyp2.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "irslab/error.hpp"

namespace irslab::hyp2 {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::array<double, 2> unit(std::array<double, 2> v) {
    const double n = std::hypot(v[0], v[1]);
    return {v[0] / n, v[1] / n};
}

std::array<double, 2> eigenvector(const Isometry& g, double lambda) {
    const std::array<double, 2> v1{g.b(), lambda - g.a()};
    const std::array<double, 2> v2{lambda - g.d(), g.c()};
    const double n1 = std::hypot(v1[0], v1[1]);
    const double n2 = std::hypot(v2[0], v2[1]);
    if (std::max(n1, n2) == 0.0) fail(ErrorKind::NumericFailure, "degenerate eigenvector");
    return unit(n1 >= n2 ? v1 : v2);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

double normalize_angle(double t) {
    double r = std::fmod(t, kTwoPi);
    if (r < 0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;
    return r;
}

HPoint::HPoint(double x_, double y_) : x(x_), y(y_) {
    require(y_ > 0.0 && std::isfinite(x_) && std::isfinite(y_), ErrorKind::InvalidArgument,
            "HPoint requires finite x and y > 0");
}

BoundaryPoint::BoundaryPoint(double t) : theta(normalize_angle(t)) {}

BoundaryPoint BoundaryPoint::from_real(double x) { return BoundaryPoint(2.0 * std::atan2(1.0, -x)); }

std::array<double, 2> BoundaryPoint::projective() const {
    return {-std::cos(theta / 2.0), std::sin(theta / 2.0)};
}

Frame2::Frame2(HPoint b, double dir) : base(b), direction(normalize_angle(dir)) {}

Isometry::Isometry() : m_{1.0, 0.0, 0.0, 1.0} {}

Isometry::Isometry(double a, double b, double c, double d) : m_{a, b, c, d} { normalize(); }

Isometry::Isometry(Raw, double a, double b, double c, double d) : m_{a, b, c, d} {}

void Isometry::normalize() {
    const double dt = det();
    if (!(dt > 0.0) || !std::isfinite(dt))
        fail(ErrorKind::NumericFailure, "matrix is not orientation preserving (det = " + fmt17(dt) + ")");
    const double s = std::sqrt(dt);
    for (double& e : m_) e /= s;
    fix_sign();
}

void Isometry::renormalize_product() {
    const double dt = det();
    if (dt > 0.5 && dt < 2.0) {
        const double s = std::sqrt(dt);
        for (double& e : m_) e /= s;
    }
    for (double e : m_)
        if (!std::isfinite(e)) fail(ErrorKind::NumericFailure, "matrix entry overflow");
    fix_sign();
}

void Isometry::fix_sign() {
    for (double e : m_) {
        if (std::abs(e) > kSignTol) {
            if (e < 0)
                for (double& f : m_) f = -f;
            break;
        }
    }
}

Isometry Isometry::translation(double t) { return {std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0)}; }

Isometry Isometry::rotation(double t) {
    const double c = std::cos(t / 2.0);
    const double s = std::sin(t / 2.0);
    return {c, s, -s, c};
}

Isometry Isometry::moving_i_to(const HPoint& p) {
    const double r = std::sqrt(p.y);
    return {r, p.x / r, 0.0, 1.0 / r};
}

Isometry Isometry::inverse() const {
    Isometry r(Raw{}, m_[3], -m_[1], -m_[2], m_[0]);
    r.fix_sign();
    return r;
}

cplx Isometry::apply(cplx z) const { return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]); }

HPoint Isometry::apply(const HPoint& p) const {
    const cplx w = apply(p.z());
    // Images of points of the half-plane stay in it; guard rounding at extreme heights.
    return HPoint(w.real(), std::max(w.imag(), std::numeric_limits<double>::min()));
}

BoundaryPoint Isometry::apply(const BoundaryPoint& p) const {
    const auto v = p.projective();
    const double w0 = m_[0] * v[0] + m_[1] * v[1];
    const double w1 = m_[2] * v[0] + m_[3] * v[1];
    return BoundaryPoint(2.0 * std::atan2(w1, -w0));
}

double Isometry::boundary_derivative(const BoundaryPoint& p) const {
    const auto v = p.projective();
    const double w0 = m_[0] * v[0] + m_[1] * v[1];
    const double w1 = m_[2] * v[0] + m_[3] * v[1];
    return 1.0 / (w0 * w0 + w1 * w1);
}

double Isometry::op_norm() const {
    double f = 0;
    for (double e : m_) f += e * e;
    return std::sqrt((f + std::sqrt(std::max(f * f - 4.0, 0.0))) / 2.0);
}

bool Isometry::is_identity(double tol) const { return matrix_distance(*this, Isometry()) <= tol; }

Isometry operator*(const Isometry& g, const Isometry& h) {
    const auto& x = g.m_;
    const auto& y = h.m_;
    Isometry r(Isometry::Raw{}, x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
               x[2] * y[1] + x[3] * y[3]);
    r.renormalize_product();
    return r;
}

Isometry compose(const Isometry& g, const Isometry& h) { return g * h; }

double matrix_distance(const Isometry& g, const Isometry& h) {
    double plus = 0, minus = 0;
    for (int i = 0; i < 4; ++i) {
        plus = std::max(plus, std::abs(g.entries()[i] - h.entries()[i]));
        minus = std::max(minus, std::abs(g.entries()[i] + h.entries()[i]));
    }
    return std::min(plus, minus);
}

std::string to_string(IsometryClass c) {
    switch (c) {
        case IsometryClass::Elliptic: return "elliptic";
        case IsometryClass::Parabolic: return "parabolic";
        case IsometryClass::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

IsometryClass classify(const Isometry& g, bool strict) {
    const double t = std::abs(g.trace());
    if (std::abs(t - 2.0) <= kClassTol) {
        if (g.is_identity()) return IsometryClass::Elliptic;
        if (strict) fail(ErrorKind::AmbiguousClass, "|trace| within 1e-9 of 2");
        return IsometryClass::Parabolic;
    }
    return t > 2.0 ? IsometryClass::Hyperbolic : IsometryClass::Elliptic;
}

double translation_length(const Isometry& g) {
    if (classify(g) != IsometryClass::Hyperbolic)
        fail(ErrorKind::NotHyperbolic, "translation length needs a hyperbolic element");
    return 2.0 * std::acosh(std::abs(g.trace()) / 2.0);
}

double dist(const HPoint& z, const HPoint& w) {
    const double chord = std::abs(z.z() - w.z());
    return 2.0 * std::asinh(chord / (2.0 * std::sqrt(z.y * w.y)));
}

AxisEndpoints axis_endpoints(const Isometry& g) {
    if (classify(g) != IsometryClass::Hyperbolic)
        fail(ErrorKind::NotHyperbolic, "fixed points need a hyperbolic element");
    const double tr = g.trace();
    const double s = std::sqrt(tr * tr - 4.0);
    const double big = tr > 0 ? (tr + s) / 2.0 : (tr - s) / 2.0;
    return {eigenvector(g, big), eigenvector(g, 1.0 / big)};
}

FixedPoints fixed_points(const Isometry& g) {
    const auto ends = axis_endpoints(g);
    auto to_boundary = [](const std::array<double, 2>& v) {
        return BoundaryPoint(2.0 * std::atan2(v[1], -v[0]));
    };
    return {to_boundary(ends.attracting), to_boundary(ends.repelling)};
}

Isometry axis_chart(const Isometry& g) {
    auto [att, rep] = axis_endpoints(g);
    double dt = att[0] * rep[1] - rep[0] * att[1];
    if (dt < 0) {
        att = {-att[0], -att[1]};
        dt = -dt;
    }
    if (dt < 1e-300) fail(ErrorKind::NumericFailure, "axis endpoints coincide");
    return {att[0], rep[0], att[1], rep[1]};
}

namespace {

// Real coordinates of the endpoints of axis(h) in the chart where axis(g) is the imaginary axis.
std::pair<double, double> endpoints_in_chart(const Isometry& chart_inv, const Isometry& h) {
    const auto ends = axis_endpoints(h);
    auto map = [&](const std::array<double, 2>& v) {
        const double w0 = chart_inv.a() * v[0] + chart_inv.b() * v[1];
        const double w1 = chart_inv.c() * v[0] + chart_inv.d() * v[1];
        if (std::abs(w1) < 1e-300) fail(ErrorKind::NumericFailure, "axes share an endpoint");
        return w0 / w1;
    };
    return {map(ends.attracting), map(ends.repelling)};
}

}  // namespace

Isometry cuff_chart(const Isometry& g, const Isometry& h) {
    const Isometry chart = axis_chart(g);
    const auto [u, v] = endpoints_in_chart(chart.inverse(), h);
    if (!(u * v > 0.0)) fail(ErrorKind::NumericFailure, "axes are not ultraparallel");
    const double s = std::sqrt(u * v);
    return chart * Isometry(std::sqrt(s), 0.0, 0.0, 1.0 / std::sqrt(s));
}

HPoint perpendicular_foot(const Isometry& g, const Isometry& h) {
    return cuff_chart(g, h).apply(HPoint(0.0, 1.0));
}

int side_of_axis(const Isometry& g, const HPoint& z, double tol) {
    const cplx w = axis_chart(g).inverse().apply(z.z());
    const double r = w.real() / std::abs(w);
    if (std::abs(r) <= tol) return 0;
    return r > 0 ? 1 : -1;
}

cplx to_disk(const HPoint& p) {
    const cplx z = p.z();
    const cplx i(0.0, 1.0);
    return (z - i) / (z + i);
}

HPoint from_disk(cplx w) {
    const cplx i(0.0, 1.0);
    return HPoint(i * (1.0 + w) / (1.0 - w));
}

cplx to_klein(const HPoint& p) {
    const cplx w = to_disk(p);
    return 2.0 * w / (1.0 + std::norm(w));
}

HPoint reflect_across(const HPoint& p, const HPoint& q, const HPoint& z) {
    const Isometry t = Isometry::moving_i_to(p).inverse();
    const double phi = std::arg(to_disk(t.apply(q)));
    const cplx wz = to_disk(t.apply(z));
    const cplx wr = std::polar(1.0, 2.0 * phi) * std::conj(wz);
    return t.inverse().apply(from_disk(wr));
}

double direction_towards(const HPoint& p, const HPoint& q) {
    const Isometry t = Isometry::moving_i_to(p).inverse();
    return normalize_angle(std::arg(to_disk(t.apply(q))));
}

double Arc::length() const { return pinned() ? kTwoPi - complement_length() : normalize_angle(end - start); }

double Arc::complement_length() const { return pinned() ? startOffset - endOffset : normalize_angle(start - end); }

bool Arc::contains(const BoundaryPoint& p) const { return normalize_angle(p.theta - start) <= length(); }

bool Arc::strictly_inside(const Arc& outer) const {
    if (pinned() && outer.pinned() && pin == outer.pin)
        return endOffset < outer.endOffset && outer.startOffset < startOffset;
    const double off = normalize_angle(start - outer.start);
    return off > 0.0 && off + length() < outer.length();
}

Arc apply(const Isometry& g, const Arc& arc) {
    return {g.apply(BoundaryPoint(arc.start)).theta, g.apply(BoundaryPoint(arc.end)).theta};
}

std::vector<Arc> ns_iterate(const Isometry& h, const Arc& U, int k) {
    require(k >= 0, ErrorKind::InvalidArgument, "iteration count must be non-negative");
    const FixedPoints fp = fixed_points(h);
    if (!U.contains(fp.repelling) || U.contains(fp.attracting))
        fail(ErrorKind::BadArc, "arc must contain the repelling and avoid the attracting fixed point");
    const double tr = h.trace();
    const double mu = tr > 0 ? (tr + std::sqrt(tr * tr - 4.0)) / 2.0 : (tr - std::sqrt(tr * tr - 4.0)) / 2.0;
    const auto va = axis_endpoints(h).attracting;
    const auto vs = BoundaryPoint(U.start).projective();
    const auto ve = BoundaryPoint(U.end).projective();
    const auto cross = [](const std::array<double, 2>& x, const std::array<double, 2>& y) {
        return x[0] * y[1] - x[1] * y[0];
    };
    const double crossS = cross(va, vs), crossE = cross(va, ve);
    // Offset of the image of v under P = h^i from the attracting point. Since det P = 1 and
    // P va = mu^i va, cross(va, P v) = mu^-i cross(va, v) keeps full relative precision.
    const auto offset = [&](const std::array<double, 4>& P, const std::array<double, 2>& v, double crossV,
                            double scale) {
        const std::array<double, 2> w{P[0] * v[0] + P[1] * v[1], P[2] * v[0] + P[3] * v[1]};
        const double dot = va[0] * w[0] + va[1] * w[1];
        return 2.0 * std::atan(-crossV * scale / dot);
    };
    const auto& m = h.entries();
    std::array<double, 4> P{m[0], m[1], m[2], m[3]};
    double scale = 1.0 / mu;
    std::vector<Arc> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        Arc a;
        a.pin = fp.attracting.theta;
        a.startOffset = offset(P, vs, crossS, scale);
        if (a.startOffset <= 0.0) a.startOffset += kTwoPi;
        a.endOffset = offset(P, ve, crossE, scale);
        if (a.endOffset >= 0.0) a.endOffset -= kTwoPi;
        a.start = normalize_angle(a.pin + a.startOffset);
        a.end = normalize_angle(a.pin + a.endOffset);
        out.push_back(a);
        P = {P[0] * m[0] + P[1] * m[2], P[0] * m[1] + P[1] * m[3], P[2] * m[0] + P[3] * m[2],
             P[2] * m[1] + P[3] * m[3]};
        scale /= mu;
    }
    return out;
}

nlohmann::json to_json(const Isometry& g) {
    return nlohmann::json::array({fmt17(g.a()), fmt17(g.b()), fmt17(g.c()), fmt17(g.d())});
}

Isometry isometry_from_json(const nlohmann::json& j) {
    require(j.is_array() && j.size() == 4, ErrorKind::InvalidArgument, "isometry must be a 4-element array");
    std::array<double, 4> e{};
    for (int i = 0; i < 4; ++i) e[i] = j[i].is_string() ? std::stod(j[i].get<std::string>()) : j[i].get<double>();
    return {e[0], e[1], e[2], e[3]};
}

}  // namespace irslab::hyp2
