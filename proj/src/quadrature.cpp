#include "bvcalc/quadrature.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <thread>

namespace bvcalc {

namespace {

std::atomic<unsigned> g_threads{1};

GaussLegendre compute_rule(unsigned n)
{
	GaussLegendre rule;
	rule.nodes.resize(n);
	rule.weights.resize(n);
	for (unsigned i = 0; i < n; ++i)
	{
		// Chebyshev-like initial guess, then Newton on P_n.
		double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
		double dp = 0.0;
		for (int it = 0; it < 100; ++it)
		{
			double p0 = 1.0, p1 = x;
			for (unsigned k = 2; k <= n; ++k)
			{
				double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
				p0 = p1;
				p1 = p2;
			}
			if (n == 1)
				p0 = 1.0;
			dp = n * (x * p1 - p0) / (x * x - 1.0);
			double step = p1 / dp;
			x -= step;
			if (std::abs(step) < 1e-16)
				break;
		}
		double p0 = 1.0, p1 = x;
		for (unsigned k = 2; k <= n; ++k)
		{
			double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
			p0 = p1;
			p1 = p2;
		}
		if (n == 1)
			p0 = 1.0;
		dp = n * (x * p1 - p0) / (x * x - 1.0);
		rule.nodes[i] = x;
		rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
	}
	return rule;
}

} // namespace

const GaussLegendre &gauss_legendre(unsigned n)
{
	static std::mutex mutex;
	static std::map<unsigned, GaussLegendre> cache;
	std::lock_guard lock(mutex);
	auto it = cache.find(n);
	if (it == cache.end())
		it = cache.emplace(n, compute_rule(n)).first;
	return it->second;
}

void set_thread_count(unsigned n)
{
	g_threads = n < 1 ? 1 : n;
}

unsigned thread_count()
{
	return g_threads;
}

std::complex<double> ordered_parallel_sum(size_t count, const std::function<std::complex<double>(size_t)> &f)
{
	std::vector<std::complex<double>> parts(count);
	unsigned workers = std::min<size_t>(thread_count(), count);
	if (workers <= 1)
	{
		for (size_t k = 0; k < count; ++k)
			parts[k] = f(k);
	}
	else
	{
		std::vector<std::thread> pool;
		for (unsigned w = 0; w < workers; ++w)
			pool.emplace_back([&, w] {
				for (size_t k = w; k < count; k += workers)
					parts[k] = f(k);
			});
		for (auto &t : pool)
			t.join();
	}
	std::complex<double> total = 0.0;
	for (const auto &p : parts)
		total += p;
	return total;
}

std::complex<double> tensor_quadrature(const std::vector<Axis> &axes, unsigned order,
                                       const std::function<std::complex<double>(const double *)> &f)
{
	const auto &rule = gauss_legendre(order);
	size_t dim = axes.size();
	if (dim == 0)
		return f(nullptr);
	// Parallelize over the panels of the first axis; the remaining axes are swept serially.
	return ordered_parallel_sum(axes[0].panels, [&](size_t panel0) {
		std::vector<double> point(dim);
		std::vector<size_t> idx(dim, 0); // flattened (panel, node) per axis for axes 1..dim-1
		std::vector<double> width(dim);
		for (size_t d = 0; d < dim; ++d)
			width[d] = (axes[d].upper - axes[d].lower) / axes[d].panels;
		std::complex<double> sum = 0.0;
		for (unsigned n0 = 0; n0 < order; ++n0)
		{
			double w0 = 0.5 * width[0];
			point[0] = axes[0].lower + (panel0 + 0.5) * width[0] + w0 * rule.nodes[n0];
			double weight0 = w0 * rule.weights[n0];
			std::fill(idx.begin(), idx.end(), 0);
			while (true)
			{
				double weight = weight0;
				for (size_t d = 1; d < dim; ++d)
				{
					size_t panel = idx[d] / order, node = idx[d] % order;
					double w = 0.5 * width[d];
					point[d] = axes[d].lower + (panel + 0.5) * width[d] + w * rule.nodes[node];
					weight *= w * rule.weights[node];
				}
				sum += weight * f(point.data());
				size_t d = 1;
				for (; d < dim; ++d)
				{
					if (++idx[d] < axes[d].panels * order)
						break;
					idx[d] = 0;
				}
				if (d >= dim)
					break;
			}
		}
		return sum;
	});
}

} // namespace bvcalc
