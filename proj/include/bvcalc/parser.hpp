#pragma once

#include <string>

#include "bvcalc/polynomial.hpp"

namespace bvcalc {

/// Where an expression string starts inside a larger document, for diagnostics.
struct SourcePosition
{
	int line = 1;
	int column = 1;
};

/**
 * Parse a polynomial expression over `sig`.
 *
 * Grammar: sums and differences of products of factors; factors are integer
 * literals, generator names, `i`, `hbar`, parenthesized expressions, and
 * powers `a^n`. Division and negative powers are allowed only for invertible
 * constants (e.g. `1/2`, `hbar^-1`). Raising an odd generator to a power above
 * one is rejected. Errors throw ParseError carrying line and column.
 */
Polynomial parse_polynomial(const std::string &text, const SignaturePtr &sig, SourcePosition origin = {});

} // namespace bvcalc
