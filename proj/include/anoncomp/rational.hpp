#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace anoncomp {

/// Exact rational used by the compiler and the oracles. Values in this
/// project stay small (denominators are node counts or grid sizes), so a
/// 64-bit numerator is enough.
///
/// Compare against Rational(n), not a bare integer: with Boost 1.74 under
/// C++20, rational == int picks its own reversed overload and recurses.
using Rational = boost::rational<std::int64_t>;

/// Parses "n", "-n" or "n/d". Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Serializes as "num/den" (always with a denominator).
std::string to_string(const Rational& value);

/// floor(value + 1/2), i.e. round half up.
std::int64_t round_half_up(const Rational& value);

std::int64_t floor(const Rational& value);

}  // namespace anoncomp
