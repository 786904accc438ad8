#pragma once

// Hilbert symbols at odd primes with an independent conic-solvability oracle, diagonal
// quadratic forms over Q(sqrt d) evaluated at a split prime, and the discriminant / Hasse
// invariant obstructions to similarity of two forms.

#include <string>
#include <vector>

#include <json.hpp>

#include "irslab/rational.hpp"

namespace irslab::arith {

bool is_prime(long n);
/// v_p(n) for n != 0.
int valuation(const BigInt& n, long p);
int valuation(const Rational& q, long p);
/// Euler's criterion: u^((p-1)/2) mod p as +1, -1 or 0.
int legendre(const BigInt& u, long p);
/// Smallest positive quadratic nonresidue mod p.
long nonsquare_unit(long p);

/// Element of Q_p known through its valuation and its unit part modulo p.
struct PadicValue {
    int val = 0;
    long unitModP = 1;
};
PadicValue to_padic(const Rational& q, long p);

int hilbert_symbol(const PadicValue& a, const PadicValue& b, long p);
int hilbert_symbol(const Rational& a, const Rational& b, long p);
/// Solvability of z^2 = a x^2 + b y^2 over Q_p decided by search for a primitive solution
/// modulo p^3 after scaling a and b by rational squares to p-valuation 0 or 1.
int hilbert_oracle(const Rational& a, const Rational& b, long p);

/// a + b sqrt(d) with d square-free and positive; d = 1 means the element is rational.
struct QuadElem {
    Rational a = 0, b = 0;
    long d = 1;

    QuadElem() = default;
    QuadElem(Rational a_, Rational b_ = 0, long d_ = 1);

    bool is_zero() const { return a == 0 && b == 0; }
    QuadElem conj() const { return {a, -b, d}; }
    Rational norm() const { return a * a - Rational(d) * b * b; }
    QuadElem inverse() const;
    double value(int sign) const;  // real embedding sqrt d -> sign * sqrt d

    friend QuadElem operator+(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator-(const QuadElem& x, const QuadElem& y);
    friend QuadElem operator*(const QuadElem& x, const QuadElem& y);
    friend bool operator==(const QuadElem& x, const QuadElem& y) { return x.a == y.a && x.b == y.b && x.d == y.d; }

    std::string str() const;
};

/// Parses "7", "-3√2", "1+2sqrt2", "1/2-sqrt(2)"; the radicand must equal d.
QuadElem parse_quad(const std::string& text, long d);
long squarefree_part(long n);
bool is_rational_square(const Rational& q);
/// x is a nonzero square in Q(sqrt d).
bool is_square(const QuadElem& x);
bool same_square_class(const QuadElem& x, const QuadElem& y);

/// Odd prime p with d a nonzero square mod p, and the chosen root r of d mod p.
struct PadicPlace {
    long p = 7;
    long d = 1;
    long rootOfD = 1;

    PadicPlace() = default;
    PadicPlace(long p_, long d_, long root);
    /// r lifted to a root of d modulo p^digits.
    BigInt lifted_root(int digits) const;
    /// The other embedding, sqrt d -> -r.
    PadicPlace conjugate() const { return PadicPlace(p, d, p - rootOfD); }
};

PadicValue embed(const QuadElem& x, const PadicPlace& place);
int hilbert_symbol(const QuadElem& a, const QuadElem& b, const PadicPlace& place);

struct DiagonalForm {
    std::vector<QuadElem> coeffs;
    long d = 1;

    DiagonalForm() = default;
    DiagonalForm(std::vector<QuadElem> c, long d_);
    /// Comma-separated coefficients.
    static DiagonalForm parse(const std::string& text, long d);
    int size() const { return static_cast<int>(coeffs.size()); }
    DiagonalForm scaled(const QuadElem& lambda) const;
    std::string str() const;
};

int eps_invariant(const DiagonalForm& q, const PadicPlace& place);
/// Product of the coefficients; the rational part is reduced to a square-free integer when
/// the product is rational.
QuadElem disc(const DiagonalForm& q);

enum class Verdict { ObstructedByDisc, ObstructedByEps, NoObstructionFound };
std::string to_string(Verdict v);

struct LambdaRow {
    std::string lambda;  // "1", "p", "u", "pu" with values
    long value;
    int eps;
};

struct SimilarityReport {
    Verdict verdict = Verdict::NoObstructionFound;
    bool discClassesEqual = true;
    int epsQPrime = 1;
    std::vector<LambdaRow> table;  // filled for forms of odd length
};

/// Even length: discriminant classes over Q(sqrt d). Odd length: eps(lambda q) against
/// eps(q') for the four square classes lambda of Q_p.
SimilarityReport similarity_obstruction(const DiagonalForm& q, const DiagonalForm& qp, const PadicPlace& place);

struct SignatureProfile {
    std::vector<int> plus;   // signs under sqrt d -> +sqrt d
    std::vector<int> minus;  // signs under sqrt d -> -sqrt d
    bool admissible = false; // one embedding of signature (n, 1), the other definite positive
};
SignatureProfile signature_check(const DiagonalForm& q);

nlohmann::json to_json(const SimilarityReport& r);

}  // namespace irslab::arith
