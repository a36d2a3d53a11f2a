#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace bvcalc {

/// Gauss–Legendre rule on [-1, 1].
struct GaussLegendre
{
	std::vector<double> nodes;
	std::vector<double> weights;
};

/// n-point rule by Newton iteration on P_n; cached per n.
const GaussLegendre &gauss_legendre(unsigned n);

/// Worker threads used by quadrature. Defaults to 1; values < 1 are clamped.
void set_thread_count(unsigned n);
unsigned thread_count();

/**
 * Σ_{k<count} f(k), with the terms computed on up to thread_count() threads
 * and added in index order, so the result does not depend on the thread count.
 */
std::complex<double> ordered_parallel_sum(size_t count, const std::function<std::complex<double>(size_t)> &f);

/// Interval [lower, upper] split into equal panels.
struct Axis
{
	double lower = 0.0;
	double upper = 1.0;
	unsigned panels = 1;
};

/**
 * Composite tensor-product Gauss–Legendre with `order` nodes per panel:
 * ∫ f(x) dx over the box. The callback receives a point of size axes.size().
 */
std::complex<double> tensor_quadrature(const std::vector<Axis> &axes, unsigned order,
                                       const std::function<std::complex<double>(const double *)> &f);

} // namespace bvcalc
