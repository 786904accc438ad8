#pragma once

// Exact rationals for volume bookkeeping and local-field arithmetic.

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace irslab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "3", "-2/7", "0.125", "1.5e-3" exactly.
Rational parse_rational(const std::string& text);
std::string to_string(const Rational& q);
bool is_integer(const Rational& q);
double to_double(const Rational& q);

}  // namespace irslab
