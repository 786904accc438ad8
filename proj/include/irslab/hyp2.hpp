#pragma once

// Hyperbolic plane kernel: PSL(2,R) isometries acting on the upper half-plane,
// with the circle at infinity parametrized by disk-model angles.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace irslab::hyp2 {

using cplx = std::complex<double>;

inline constexpr double kDetTol = 1e-12;
inline constexpr double kSignTol = 1e-12;
inline constexpr double kClassTol = 1e-9;

/// Point of the upper half-plane, y > 0.
struct HPoint {
    double x = 0.0;
    double y = 1.0;

    HPoint() = default;
    HPoint(double x_, double y_);
    explicit HPoint(cplx z) : HPoint(z.real(), z.imag()) {}

    cplx z() const { return {x, y}; }
};

/// Point of the circle at infinity, as an angle in the disk model.
/// The Cayley transform w = (z - i)/(z + i) sends the real point x to
/// theta with x = -cot(theta/2); infinity sits at theta = 0 and 0 at theta = pi.
struct BoundaryPoint {
    double theta = 0.0;

    BoundaryPoint() = default;
    explicit BoundaryPoint(double t);

    static BoundaryPoint from_real(double x);
    static BoundaryPoint infinity() { return BoundaryPoint(0.0); }
    /// Projective representative (v0, v1) with x = v0 / v1.
    std::array<double, 2> projective() const;
};

/// Unit tangent vector at a point.
struct Frame2 {
    HPoint base;
    double direction = 0.0;

    Frame2() = default;
    Frame2(HPoint b, double dir);
};

double normalize_angle(double t);

/// Element of PSL(2,R): a 2x2 matrix of determinant one up to sign.
/// Every constructor renormalizes the determinant and fixes the sign so the
/// first entry with magnitude above 1e-12 is positive.
class Isometry {
public:
    Isometry();
    Isometry(double a, double b, double c, double d);

    static Isometry identity() { return {}; }
    /// Translation by distance t along the imaginary axis (towards infinity).
    static Isometry translation(double t);
    /// Rotation by angle t about i.
    static Isometry rotation(double t);
    /// Sends i to p (and is a pure affine map z -> y z + x).
    static Isometry moving_i_to(const HPoint& p);

    double a() const { return m_[0]; }
    double b() const { return m_[1]; }
    double c() const { return m_[2]; }
    double d() const { return m_[3]; }
    const std::array<double, 4>& entries() const { return m_; }

    double trace() const { return m_[0] + m_[3]; }
    double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
    Isometry inverse() const;

    HPoint apply(const HPoint& p) const;
    cplx apply(cplx z) const;
    BoundaryPoint apply(const BoundaryPoint& p) const;
    /// |d theta' / d theta| of the boundary action at p.
    double boundary_derivative(const BoundaryPoint& p) const;

    /// Operator (spectral) norm of the normalized matrix; equals exp(dist(i, g i)/2).
    double op_norm() const;
    bool is_identity(double tol = 1e-9) const;

    friend Isometry operator*(const Isometry& g, const Isometry& h);
    friend bool operator==(const Isometry&, const Isometry&) = default;

private:
    struct Raw {};
    Isometry(Raw, double a, double b, double c, double d);
    void normalize();
    // For products of determinant-one matrices: the computed determinant is only trusted when
    // it is near 1, since for large entries ad - bc is dominated by cancellation.
    void renormalize_product();
    void fix_sign();

    std::array<double, 4> m_;
};

Isometry compose(const Isometry& g, const Isometry& h);

/// Sup-norm distance between two PSL elements (minimum over the sign ambiguity).
double matrix_distance(const Isometry& g, const Isometry& h);

enum class IsometryClass { Elliptic, Parabolic, Hyperbolic };
std::string to_string(IsometryClass c);

/// Trace-band classification with tolerance 1e-9. The identity reports as Elliptic.
/// With strict = true, traces inside the parabolic band raise AmbiguousClass.
IsometryClass classify(const Isometry& g, bool strict = false);

/// 2 arccosh(|tr g| / 2); NotHyperbolic unless classify(g) == Hyperbolic.
double translation_length(const Isometry& g);

double dist(const HPoint& z, const HPoint& w);

struct FixedPoints {
    BoundaryPoint attracting;
    BoundaryPoint repelling;
};
FixedPoints fixed_points(const Isometry& g);

/// Real-line (projective) coordinates of the fixed points of a hyperbolic g.
struct AxisEndpoints {
    std::array<double, 2> attracting;  // projective (v0, v1), x = v0 / v1
    std::array<double, 2> repelling;
};
AxisEndpoints axis_endpoints(const Isometry& g);

/// Isometry sending the imaginary axis (0 -> infinity) onto the oriented axis of
/// hyperbolic g (repelling -> attracting). Determined up to translation along the axis.
Isometry axis_chart(const Isometry& g);

/// Foot on the axis of g of the common perpendicular to the axis of h.
/// The two axes must be disjoint (ultraparallel).
HPoint perpendicular_foot(const Isometry& g, const Isometry& h);

/// Chart that sends 0, infinity, i to repelling(g), attracting(g) and the foot of
/// the common perpendicular from axis(g) to axis(h).
Isometry cuff_chart(const Isometry& g, const Isometry& h);

/// Sign of the side of the oriented axis of g that contains z:
/// +1 for the right-hand side, -1 for the left, 0 on the axis (within tol).
int side_of_axis(const Isometry& g, const HPoint& z, double tol = 1e-12);

/// Reflection of z across the geodesic through p and q.
HPoint reflect_across(const HPoint& p, const HPoint& q, const HPoint& z);

/// Hyperbolic unit-disk coordinates of a point (Cayley transform).
cplx to_disk(const HPoint& p);
HPoint from_disk(cplx w);
/// Beltrami-Klein coordinates; geodesic polygons are Euclidean polygons there.
cplx to_klein(const HPoint& p);

/// Direction (angle in [0, 2 pi)) of the geodesic from p towards q, measured in the
/// disk model recentred at p.
double direction_towards(const HPoint& p, const HPoint& q);

/// Counter-clockwise arc of the boundary circle from `start` to `end`.
/// A pinned arc also stores its endpoints as signed offsets from a point `pin` of its
/// complement (startOffset in (0, 2 pi), endOffset in (-2 pi, 0)), which keeps full relative
/// precision when the complement is far shorter than the angle resolution.
struct Arc {
    double start = 0.0;
    double end = 0.0;
    double pin = std::numeric_limits<double>::quiet_NaN();
    double startOffset = 0.0;
    double endOffset = 0.0;

    bool pinned() const { return !std::isnan(pin); }

    double length() const;
    double complement_length() const;
    bool contains(const BoundaryPoint& p) const;
    /// True if this arc lies inside `outer` with both endpoints strictly interior. Arcs pinned
    /// at the same point are compared through their offsets.
    bool strictly_inside(const Arc& outer) const;
};

Arc apply(const Isometry& g, const Arc& arc);

/// h(U), h^2(U), ..., h^k(U) for hyperbolic h and an arc U that contains the
/// repelling fixed point but not the attracting one. The results are pinned at the
/// attracting fixed point.
std::vector<Arc> ns_iterate(const Isometry& h, const Arc& U, int k);

nlohmann::json to_json(const Isometry& g);
Isometry isometry_from_json(const nlohmann::json& j);

}  // namespace irslab::hyp2
