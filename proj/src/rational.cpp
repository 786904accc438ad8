#include "irslab/rational.hpp"

#include <cctype>

#include "irslab/error.hpp"

namespace irslab {

Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    require(!s.empty(), ErrorKind::InvalidArgument, "empty number");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        const Rational num = parse_rational(s.substr(0, slash));
        const Rational den = parse_rational(s.substr(slash + 1));
        require(den != 0, ErrorKind::InvalidArgument, "zero denominator in '" + text + "'");
        return num / den;
    }
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
    BigInt digits = 0;
    int scale = 0;
    bool seenDigit = false, seenPoint = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
        if (s[i] == '.') {
            require(!seenPoint, ErrorKind::InvalidArgument, "malformed number '" + text + "'");
            seenPoint = true;
            continue;
        }
        require(std::isdigit(static_cast<unsigned char>(s[i])), ErrorKind::InvalidArgument,
                "malformed number '" + text + "'");
        digits = digits * 10 + (s[i] - '0');
        seenDigit = true;
        if (seenPoint) --scale;
    }
    require(seenDigit, ErrorKind::InvalidArgument, "malformed number '" + text + "'");
    if (i < s.size()) {
        const std::string exp = s.substr(i + 1);
        require(!exp.empty(), ErrorKind::InvalidArgument, "malformed exponent in '" + text + "'");
        std::size_t used = 0;
        int e = 0;
        try {
            e = std::stoi(exp, &used);
        } catch (const std::exception&) {
            fail(ErrorKind::InvalidArgument, "malformed exponent in '" + text + "'");
        }
        require(used == exp.size() && e > -1000 && e < 1000, ErrorKind::InvalidArgument,
                "malformed exponent in '" + text + "'");
        scale += e;
    }
    Rational q(digits);
    const BigInt ten = boost::multiprecision::pow(BigInt(10), std::abs(scale));
    if (scale >= 0)
        q *= ten;
    else
        q /= ten;
    return negative ? -q : q;
}

std::string to_string(const Rational& q) { return q.str(); }

bool is_integer(const Rational& q) { return denominator(q) == 1; }

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace irslab
