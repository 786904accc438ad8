#include "irslab/arith.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "irslab/error.hpp"

namespace irslab::arith {

namespace {

long mod_long(const BigInt& n, long p) {
    BigInt r = n % p;
    if (r < 0) r += p;
    return static_cast<long>(r);
}

BigInt mod_big(const BigInt& n, const BigInt& m) {
    BigInt r = n % m;
    if (r < 0) r += m;
    return r;
}

long powmod(long b, long e, long m) {
    long long r = 1, x = ((b % m) + m) % m;
    while (e > 0) {
        if (e & 1) r = r * x % m;
        x = x * x % m;
        e >>= 1;
    }
    return static_cast<long>(r);
}

BigInt inverse_mod(const BigInt& a, const BigInt& m) {
    BigInt old_r = mod_big(a, m), r = m, old_s = 1, s = 0;
    while (r != 0) {
        const BigInt q = old_r / r;
        BigInt t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    require(old_r == 1, ErrorKind::NumericFailure, "element is not invertible");
    return mod_big(old_s, m);
}

void check_odd_prime(long p) {
    require(p != 2, ErrorKind::EvenPrime, "p = 2 is not supported");
    require(p > 2 && is_prime(p), ErrorKind::InvalidArgument, std::to_string(p) + " is not an odd prime");
}

BigInt isqrt(const BigInt& n) { return boost::multiprecision::sqrt(n); }

bool is_square_integer(const BigInt& n) {
    if (n < 0) return false;
    const BigInt r = isqrt(n);
    return r * r == n;
}

BigInt squarefree_part(BigInt n) {
    require(n != 0, ErrorKind::ZeroArgument, "square class of zero");
    const int sign = n < 0 ? -1 : 1;
    if (n < 0) n = -n;
    BigInt out = 1;
    for (BigInt f = 2; f * f <= n; ++f) {
        int e = 0;
        while (n % f == 0) {
            n /= f;
            ++e;
        }
        if (e % 2) out *= f;
    }
    return sign * out * n;
}

long combine_d(const QuadElem& x, const QuadElem& y) {
    if (x.d == y.d) return x.d;
    if (x.b == 0 && x.d == 1) return y.d;
    if (y.b == 0 && y.d == 1) return x.d;
    fail(ErrorKind::InvalidArgument, "elements of different quadratic fields");
}

}  // namespace

bool is_prime(long n) {
    if (n < 2) return false;
    for (long f = 2; f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

int valuation(const BigInt& n, long p) {
    require(n != 0, ErrorKind::ZeroArgument, "valuation of zero");
    BigInt m = n;
    int v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

int valuation(const Rational& q, long p) { return valuation(numerator(q), p) - valuation(denominator(q), p); }

int legendre(const BigInt& u, long p) {
    check_odd_prime(p);
    const long r = mod_long(u, p);
    if (r == 0) return 0;
    return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

long nonsquare_unit(long p) {
    check_odd_prime(p);
    for (long u = 2; u < p; ++u)
        if (legendre(u, p) == -1) return u;
    fail(ErrorKind::NumericFailure, "no nonsquare unit");
}

PadicValue to_padic(const Rational& q, long p) {
    require(q != 0, ErrorKind::ZeroArgument, "zero has no p-adic unit part");
    BigInt num = numerator(q), den = denominator(q);
    const int vn = valuation(num, p), vd = valuation(den, p);
    for (int i = 0; i < vn; ++i) num /= p;
    for (int i = 0; i < vd; ++i) den /= p;
    const long u = mod_long(num * inverse_mod(den, p), p);
    return {vn - vd, u};
}

int hilbert_symbol(const PadicValue& a, const PadicValue& b, long p) {
    check_odd_prime(p);
    int s = 1;
    const long eps = (p - 1) / 2;
    if ((std::abs(a.val) % 2) && (std::abs(b.val) % 2) && (eps % 2)) s = -s;
    if (std::abs(b.val) % 2) s *= legendre(a.unitModP, p);
    if (std::abs(a.val) % 2) s *= legendre(b.unitModP, p);
    return s;
}

int hilbert_symbol(const Rational& a, const Rational& b, long p) {
    check_odd_prime(p);
    require(a != 0 && b != 0, ErrorKind::ZeroArgument, "Hilbert symbol of zero");
    return hilbert_symbol(to_padic(a, p), to_padic(b, p), p);
}

int hilbert_oracle(const Rational& a, const Rational& b, long p) {
    check_odd_prime(p);
    require(a != 0 && b != 0, ErrorKind::ZeroArgument, "Hilbert symbol of zero");
    // scale by squares: clear denominators, then strip even powers of p
    auto reduce = [p](const Rational& q) {
        BigInt n = numerator(q) * denominator(q);
        const BigInt p2 = BigInt(p) * p;
        while (n % p2 == 0) n /= p2;
        return n;
    };
    const BigInt A = reduce(a), B = reduce(b);
    // with v(A), v(B) <= 1 a primitive solution modulo p^3 lifts (Hensel, gradient valuation <= 1)
    const long M = p * p * p;
    const long Am = mod_long(A, M), Bm = mod_long(B, M);
    std::vector<char> square(M, 0);
    for (long z = 0; z < M; ++z) square[static_cast<long long>(z) * z % M] = 1;
    auto value = [&](long x, long y) {
        return static_cast<long>((static_cast<__int128>(Am) * x % M * x + static_cast<__int128>(Bm) * y % M * y) % M);
    };
    // a primitive solution has x or y a unit and can be scaled to x = 1 or y = 1
    for (long y = 0; y < M; ++y)
        if (square[value(1, y)]) return 1;
    for (long x = 0; x < M; x += p)
        if (square[value(x, 1)]) return 1;
    return -1;
}

QuadElem::QuadElem(Rational a_, Rational b_, long d_) : a(std::move(a_)), b(std::move(b_)), d(d_) {
    require(d >= 1 && squarefree_part(BigInt(d)) == d, ErrorKind::InvalidArgument,
            "d must be a positive square-free integer");
    if (d == 1) {
        a += b;
        b = 0;
    }
}

QuadElem QuadElem::inverse() const {
    require(!is_zero(), ErrorKind::ZeroArgument, "inverse of zero");
    const Rational n = norm();
    return {a / n, -b / n, d};
}

double QuadElem::value(int sign) const {
    return to_double(a) + sign * to_double(b) * std::sqrt(static_cast<double>(d));
}

QuadElem operator+(const QuadElem& x, const QuadElem& y) { return {x.a + y.a, x.b + y.b, combine_d(x, y)}; }
QuadElem operator-(const QuadElem& x, const QuadElem& y) { return {x.a - y.a, x.b - y.b, combine_d(x, y)}; }
QuadElem operator*(const QuadElem& x, const QuadElem& y) {
    const long d = combine_d(x, y);
    return {x.a * y.a + Rational(d) * x.b * y.b, x.a * y.b + x.b * y.a, d};
}

std::string QuadElem::str() const {
    if (b == 0) return irslab::to_string(a);
    std::string rad = "√" + std::to_string(d);
    std::string bs = b == 1 ? "" : b == -1 ? "-" : irslab::to_string(b);
    if (a == 0) return bs + rad;
    if (b > 0) return irslab::to_string(a) + "+" + bs + rad;
    return irslab::to_string(a) + bs + rad;
}

long squarefree_part(long n) { return static_cast<long>(squarefree_part(BigInt(n))); }

QuadElem parse_quad(const std::string& text, long d) {
    std::string s;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == '*' || text[i] == '(' || text[i] == ')')
            continue;
        if (text.compare(i, 3, "√") == 0) {
            s += 's';
            i += 2;
        } else if (text.compare(i, 4, "sqrt") == 0) {
            s += 's';
            i += 3;
        } else {
            s += text[i];
        }
    }
    require(!s.empty(), ErrorKind::InvalidArgument, "empty coefficient");
    std::vector<std::string> terms;
    std::size_t start = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E' && s[i - 1] != '/') {
            terms.push_back(s.substr(start, i - start));
            start = i;
        }
    terms.push_back(s.substr(start));
    Rational a = 0, b = 0;
    for (auto t : terms) {
        const auto pos = t.find('s');
        if (pos == std::string::npos) {
            a += parse_rational(t);
            continue;
        }
        const std::string coef = t.substr(0, pos), rad = t.substr(pos + 1);
        require(!rad.empty(), ErrorKind::InvalidArgument, "missing radicand in '" + text + "'");
        require(rad.find_first_not_of("0123456789") == std::string::npos && std::stol(rad) == d,
                ErrorKind::InvalidArgument, "radicand in '" + text + "' differs from d = " + std::to_string(d));
        Rational c = 1;
        if (coef == "-") c = -1;
        else if (!coef.empty() && coef != "+") c = parse_rational(coef);
        b += c;
    }
    require(d != 1 || b == 0, ErrorKind::InvalidArgument, "rational coefficients expected");
    return {a, b, d};
}

bool is_rational_square(const Rational& q) {
    if (q < 0) return false;
    return is_square_integer(numerator(q)) && is_square_integer(denominator(q));
}

bool is_square(const QuadElem& x) {
    require(!x.is_zero(), ErrorKind::ZeroArgument, "square class of zero");
    if (x.b == 0) return is_rational_square(x.a) || (x.d > 1 && is_rational_square(x.a / Rational(x.d)));
    const Rational N = x.norm();
    if (!is_rational_square(N)) return false;
    const Rational n = Rational(isqrt(numerator(N))) / Rational(isqrt(denominator(N)));
    for (const Rational& m : {n, Rational(-n)}) {
        const Rational u2 = (x.a + m) / 2;
        if (u2 == 0 || !is_rational_square(u2)) continue;
        const Rational u = Rational(isqrt(numerator(u2))) / Rational(isqrt(denominator(u2)));
        const Rational v = x.b / (2 * u);
        if (u * u + Rational(x.d) * v * v == x.a) return true;
    }
    return false;
}

bool same_square_class(const QuadElem& x, const QuadElem& y) { return is_square(x * y); }

PadicPlace::PadicPlace(long p_, long d_, long root) : p(p_), d(d_), rootOfD(root) {
    check_odd_prime(p);
    require(d >= 1 && squarefree_part(d) == d, ErrorKind::InvalidArgument, "d must be a positive square-free integer");
    require(d % p != 0, ErrorKind::BadEmbedding, std::to_string(p) + " ramifies in Q(sqrt " + std::to_string(d) + ")");
    require(legendre(d, p) == 1, ErrorKind::BadEmbedding,
            std::to_string(p) + " is inert in Q(sqrt " + std::to_string(d) + "); only split primes are supported");
    require(root > 0 && root < p && (static_cast<long long>(root) * root - d) % p == 0, ErrorKind::InvalidArgument,
            std::to_string(root) + " is not a square root of " + std::to_string(d) + " mod " + std::to_string(p));
}

BigInt PadicPlace::lifted_root(int digits) const {
    const BigInt M = boost::multiprecision::pow(BigInt(p), digits);
    BigInt r = rootOfD;
    for (int prec = 1; prec < digits; prec *= 2) r = mod_big(r - (r * r - d) * inverse_mod(2 * r, M), M);
    r = mod_big(r - (r * r - d) * inverse_mod(2 * r, M), M);
    require(mod_big(r * r - d, M) == 0, ErrorKind::NumericFailure, "Hensel lifting failed");
    return r;
}

PadicValue embed(const QuadElem& x, const PadicPlace& place) {
    require(!x.is_zero(), ErrorKind::ZeroArgument, "embedding of zero");
    if (x.b == 0) return to_padic(x.a, place.p);
    require(x.d == place.d, ErrorKind::InvalidArgument, "element and place use different fields");
    constexpr int kDigits = 64;
    const long p = place.p;
    const BigInt M = boost::multiprecision::pow(BigInt(p), kDigits);
    const BigInt R = place.lifted_root(kDigits);
    const BigInt Da = denominator(x.a), Db = denominator(x.b);
    const BigInt t = mod_big(numerator(x.a) * Db + numerator(x.b) * Da * R, M);
    require(t != 0, ErrorKind::BadEmbedding, x.str() + " vanishes to working p-adic precision");
    const int vt = valuation(t, p);
    require(vt < kDigits / 2, ErrorKind::BadEmbedding, x.str() + " is too close to zero p-adically");
    PadicValue num = to_padic(Rational(t), p), den = to_padic(Rational(Da * Db), p);
    return {num.val - den.val, mod_long(BigInt(num.unitModP) * inverse_mod(den.unitModP, p), p)};
}

int hilbert_symbol(const QuadElem& a, const QuadElem& b, const PadicPlace& place) {
    return hilbert_symbol(embed(a, place), embed(b, place), place.p);
}

DiagonalForm::DiagonalForm(std::vector<QuadElem> c, long d_) : coeffs(std::move(c)), d(d_) {
    require(!coeffs.empty(), ErrorKind::InvalidArgument, "form has no coefficients");
    for (auto& x : coeffs) {
        require(!x.is_zero(), ErrorKind::InvalidArgument, "form coefficients must be nonzero");
        require(x.d == d || (x.b == 0 && x.d == 1), ErrorKind::InvalidArgument, "coefficient from another field");
        x = QuadElem(x.a, x.b, d);
    }
}

DiagonalForm DiagonalForm::parse(const std::string& text, long d) {
    std::vector<QuadElem> c;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) c.push_back(parse_quad(item, d));
    return DiagonalForm(std::move(c), d);
}

DiagonalForm DiagonalForm::scaled(const QuadElem& lambda) const {
    std::vector<QuadElem> c;
    for (const auto& x : coeffs) c.push_back(lambda * x);
    return DiagonalForm(std::move(c), d);
}

std::string DiagonalForm::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < coeffs.size(); ++i) s += (i ? "," : "") + coeffs[i].str();
    return s + ")";
}

int eps_invariant(const DiagonalForm& q, const PadicPlace& place) {
    std::vector<PadicValue> v;
    for (const auto& x : q.coeffs) v.push_back(embed(x, place));
    int e = 1;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) e *= hilbert_symbol(v[i], v[j], place.p);
    return e;
}

QuadElem disc(const DiagonalForm& q) {
    QuadElem prod(1, 0, q.d);
    for (const auto& x : q.coeffs) prod = prod * x;
    if (prod.b == 0) prod = QuadElem(Rational(squarefree_part(numerator(prod.a) * denominator(prod.a))), 0, q.d);
    return prod;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::ObstructedByDisc: return "ObstructedByDisc";
        case Verdict::ObstructedByEps: return "ObstructedByEps";
        case Verdict::NoObstructionFound: return "NoObstructionFound";
    }
    return "?";
}

SimilarityReport similarity_obstruction(const DiagonalForm& q, const DiagonalForm& qp, const PadicPlace& place) {
    require(q.size() == qp.size(), ErrorKind::LengthMismatch,
            "forms have " + std::to_string(q.size()) + " and " + std::to_string(qp.size()) + " coefficients");
    require(q.d == qp.d, ErrorKind::InvalidArgument, "forms over different fields");
    SimilarityReport r;
    r.discClassesEqual = same_square_class(disc(q), disc(qp));
    r.epsQPrime = eps_invariant(qp, place);
    if (q.size() % 2 == 0) {
        if (!r.discClassesEqual) r.verdict = Verdict::ObstructedByDisc;
        return r;
    }
    const long p = place.p, u = nonsquare_unit(p);
    const std::vector<std::pair<std::string, long>> classes{{"1", 1}, {"p", p}, {"u", u}, {"pu", p * u}};
    bool allDiffer = true;
    for (const auto& [name, value] : classes) {
        const int e = eps_invariant(q.scaled(QuadElem(value, 0, q.d)), place);
        r.table.push_back({name, value, e});
        allDiffer = allDiffer && e != r.epsQPrime;
    }
    if (allDiffer) r.verdict = Verdict::ObstructedByEps;
    return r;
}

SignatureProfile signature_check(const DiagonalForm& q) {
    SignatureProfile s;
    for (const auto& x : q.coeffs) {
        s.plus.push_back(x.value(1) > 0 ? 1 : -1);
        s.minus.push_back(x.value(-1) > 0 ? 1 : -1);
    }
    auto negatives = [](const std::vector<int>& v) { return std::count(v.begin(), v.end(), -1); };
    const auto np = negatives(s.plus), nm = negatives(s.minus);
    s.admissible = q.d > 1 && ((np == 1 && nm == 0) || (np == 0 && nm == 1));
    return s;
}

nlohmann::json to_json(const SimilarityReport& r) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : r.table) table.push_back({{"lambda", row.lambda}, {"value", row.value}, {"eps", row.eps}});
    return {{"verdict", to_string(r.verdict)},
            {"discClassesEqual", r.discClassesEqual},
            {"epsQPrime", r.epsQPrime},
            {"lambdaTable", table}};
}

}  // namespace irslab::arith
