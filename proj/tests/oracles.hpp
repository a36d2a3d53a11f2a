#pragma once

// Closed-form oracles shared by the unit tests and the acceptance binary.

#include "bvcalc/scalar.hpp"

namespace testing_support {

using bvcalc::GaussRational;

/// Closed form of the ħ^n coefficient: (-i)^n (2m-2)(2m-4)⋯(2m-2(n-1)) · 2^m/(2·4⋯(2m-2)).
inline GaussRational tubular_oracle(unsigned m, int n)
{
	if (n == 0)
		return GaussRational();
	mpq_class prod = 1;
	for (int k = 1; k <= n - 1; ++k)
		prod *= int(2 * m) - 2 * k;
	mpq_class vol = 1;
	for (unsigned k = 0; k < m; ++k)
		vol *= 2;
	for (unsigned k = 1; k + 1 <= m; ++k)
		vol /= 2 * k;
	GaussRational phase(1);
	for (int k = 0; k < n; ++k)
		phase *= GaussRational(0, -1);
	return phase * GaussRational(prod * vol);
}

} // namespace testing_support
