#include "bvcalc/localization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bvcalc/quadrature.hpp"

namespace bvcalc {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

} // namespace

SymplecticModel SymplecticModel::sphere()
{
	SymplecticModel s;
	s.name = "s2";
	s.m = 1;
	s.coordinates = {"u", "phi"};
	s.domain = {{-1.0, 1.0}, {0.0, 2 * pi}};
	s.hamiltonian = [](const double *x) { return x[0]; };
	s.density = [](const double *) { return 1.0; };
	// Near the poles H = ±1 ∓ (q² + p²)/2 in Darboux coordinates.
	s.fixed_points = {{"north", 1.0, {{-1.0, 0.0}, {0.0, -1.0}}, 1.0}, {"south", -1.0, {{1.0, 0.0}, {0.0, 1.0}}, 1.0}};
	return s;
}

SymplecticModel SymplecticModel::shifted(double c) const
{
	SymplecticModel out = *this;
	auto h = hamiltonian;
	out.hamiltonian = [h, c](const double *x) { return h(x) + c; };
	for (auto &p : out.fixed_points)
		p.value += c;
	return out;
}

HessianData hessian_data(const std::vector<std::vector<double>> &h)
{
	size_t n = h.size();
	for (const auto &row : h)
		if (row.size() != n)
			throw PreconditionError("Hessian must be square");
	auto a = h;
	double scale = 0.0;
	for (size_t i = 0; i < n; ++i)
		for (size_t j = 0; j < n; ++j)
		{
			if (a[i][j] != a[j][i])
				throw PreconditionError("Hessian must be symmetric");
			scale = std::max(scale, std::abs(a[i][j]));
		}
	// Cyclic Jacobi sweeps.
	for (int sweep = 0; sweep < 100; ++sweep)
	{
		double off = 0.0;
		for (size_t i = 0; i < n; ++i)
			for (size_t j = i + 1; j < n; ++j)
				off += a[i][j] * a[i][j];
		if (off <= 1e-30 * std::max(scale * scale, 1e-300))
			break;
		for (size_t p = 0; p < n; ++p)
			for (size_t q = p + 1; q < n; ++q)
			{
				if (a[p][q] == 0.0)
					continue;
				double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
				double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
				double c = 1 / std::sqrt(t * t + 1), s = t * c;
				for (size_t k = 0; k < n; ++k)
				{
					double akp = a[k][p], akq = a[k][q];
					a[k][p] = c * akp - s * akq;
					a[k][q] = s * akp + c * akq;
				}
				for (size_t k = 0; k < n; ++k)
				{
					double apk = a[p][k], aqk = a[q][k];
					a[p][k] = c * apk - s * aqk;
					a[q][k] = s * apk + c * aqk;
				}
			}
	}
	HessianData out;
	out.abs_det = 1.0;
	for (size_t i = 0; i < n; ++i)
	{
		double ev = a[i][i];
		if (std::abs(ev) <= 1e-12 * std::max(scale, 1e-300) || scale == 0.0)
			throw PreconditionError("degenerate critical point: Hessian is singular");
		out.signature += ev > 0 ? 1 : -1;
		out.abs_det *= std::abs(ev);
	}
	return out;
}

NumericIntegral dh_lhs_numeric(const SymplecticModel &model, double hbar, const LhsOptions &options)
{
	if (!(hbar > 0.0))
		throw PreconditionError("hbar must be positive");
	size_t dim = model.domain.size();
	if (dim != 2 * model.m || model.coordinates.size() != dim)
		throw PreconditionError("model domain must have 2m coordinates");
	// Estimate the number of phase periods along each axis from a coarse sample grid.
	const unsigned samples = 24;
	std::vector<unsigned> panels(dim, 2);
	std::vector<double> point(dim);
	for (size_t d = 0; d < dim; ++d)
	{
		double spread = 0.0;
		std::vector<size_t> idx(dim, 0);
		size_t total = 1;
		for (size_t k = 0; k < dim; ++k)
			total *= samples;
		// For every line parallel to axis d, the variation of H along it.
		for (size_t flat = 0; flat < total; ++flat)
		{
			size_t rest = flat;
			for (size_t k = 0; k < dim; ++k)
			{
				idx[k] = rest % samples;
				rest /= samples;
			}
			if (idx[d] != 0)
				continue;
			double lo = INFINITY, hi = -INFINITY;
			for (unsigned s = 0; s < samples; ++s)
			{
				for (size_t k = 0; k < dim; ++k)
				{
					unsigned i = k == d ? s : idx[k];
					point[k] = model.domain[k].first + (model.domain[k].second - model.domain[k].first) * i / (samples - 1);
				}
				double h = model.hamiltonian(point.data());
				lo = std::min(lo, h);
				hi = std::max(hi, h);
			}
			spread = std::max(spread, hi - lo);
		}
		double periods = spread / (2 * pi * hbar);
		panels[d] = std::max(2u, unsigned(std::ceil(options.nodes_per_period * periods / options.order)));
	}
	auto run = [&](unsigned factor) {
		std::vector<Axis> axes;
		for (size_t d = 0; d < dim; ++d)
			axes.push_back({model.domain[d].first, model.domain[d].second, panels[d] * factor});
		return tensor_quadrature(axes, options.order, [&](const double *x) {
			return model.density(x) * std::exp(cplx(0.0, model.hamiltonian(x) / hbar));
		});
	};
	unsigned factor = 1;
	cplx coarse = run(factor);
	for (unsigned r = 0; r < options.max_refinements; ++r)
	{
		factor *= 2;
		cplx fine = run(factor);
		double err = std::abs(fine - coarse);
		if (err <= options.tolerance * std::max(std::abs(fine), 1.0))
			return {fine, err, panels[0] * factor};
		coarse = fine;
	}
	throw ConvergenceError("fixed-point integral: quadrature did not resolve the oscillation");
}

cplx dh_fixed_point_sum(const SymplecticModel &model, double hbar)
{
	if (!(hbar > 0.0))
		throw PreconditionError("hbar must be positive");
	cplx sum = 0.0;
	for (const auto &p : model.fixed_points)
	{
		if (p.hessian.size() != 2 * model.m)
			throw PreconditionError("fixed point " + p.label + ": Hessian must be 2m x 2m");
		if (!(p.omega_det > 0.0))
			throw PreconditionError("fixed point " + p.label + ": det omega must be positive");
		HessianData hd = hessian_data(p.hessian);
		double mag = std::pow(2 * pi * hbar, model.m) * std::sqrt(p.omega_det / hd.abs_det);
		sum += std::polar(mag, p.value / hbar + pi * hd.signature / 4.0);
	}
	return sum;
}

std::vector<TubularTerm> tubular_series(unsigned m, int max_order)
{
	if (m == 0)
		throw PreconditionError("half-dimension m must be positive");
	// Vol(S^{2m-1}) = (2π)^m / (2·4⋯(2m-2)) = π^m · 2/(m-1)!.
	mpq_class vol = 2;
	for (unsigned k = 2; k < m; ++k)
		vol /= k;
	// (hΔ)^j h = a_j r^{-(2j+1)} r†, with Δ(r^{-k} r†) = (2m-1-k) r^{-k-1} in the radial Liouville measure.
	std::vector<TubularTerm> out;
	out.push_back({0, GaussRational(), 2 * int(m), GaussRational()});
	mpq_class a = 1;
	int k = 1;
	GaussRational minus_i(0, -1), phase = minus_i;
	for (int n = 1; n <= max_order; ++n)
	{
		// ħ^n: -iħ · (-iħ)^{n-1} a_{n-1} ε^{2m-1} ε^{-(2n-1)} Vol.
		TubularTerm t;
		t.order = n;
		t.coefficient = phase * GaussRational(a * vol);
		t.epsilon_power = 2 * int(m) - 2 * n;
		if (t.epsilon_power == 0 || t.coefficient.is_zero())
			t.limit = t.coefficient;
		else if (t.epsilon_power < 0)
			throw PreconditionError("tubular series diverges as epsilon -> 0");
		out.push_back(t);
		a *= int(2 * m) - 1 - k;
		k += 2;
		phase *= minus_i;
	}
	return out;
}

Polynomial perturbed_homotopy(const FunctionContraction &c, const DarbouxChart &chart, const Polynomial &g, int order,
                              bool *terminated)
{
	Polynomial term = c.homotopy(g);
	Polynomial total = term;
	int n = 0;
	while (!term.is_zero() && n < order)
	{
		term = c.homotopy(minus_i_hbar() * bv_laplacian(term, chart));
		total += term;
		++n;
	}
	if (terminated)
		*terminated = term.is_zero() || c.homotopy(minus_i_hbar() * bv_laplacian(term, chart)).is_zero();
	return total;
}

namespace {

/// ι̃ g = Σ (hδ)^n ι g.
Polynomial perturbed_inclusion(const FunctionContraction &c, const DarbouxChart &chart, const Polynomial &g, int order,
                               bool *terminated)
{
	Polynomial term = c.include(g);
	Polynomial total = term;
	int n = 0;
	while (!term.is_zero() && n < order)
	{
		term = c.homotopy(minus_i_hbar() * bv_laplacian(term, chart));
		total += term;
		++n;
	}
	*terminated = term.is_zero() || c.homotopy(minus_i_hbar() * bv_laplacian(term, chart)).is_zero();
	return total;
}

} // namespace

EffectiveMeasure effective_measure_series(const Polynomial &S0, const DarbouxChart &chart, const FunctionContraction &c,
                                          int order, const Polynomial &f)
{
	chart.require(S0);
	chart.require(f);
	if (!check_cme(S0, chart).is_zero())
		throw PreconditionError("S0 must satisfy {S0,S0} = 0");
	EffectiveMeasure out;
	bool t1 = false, t2 = false;
	out.homotopy = perturbed_homotopy(c, chart, f, order, &t1);
	out.projected = c.project(f) + c.project(minus_i_hbar() * bv_laplacian(out.homotopy, chart));
	out.value = perturbed_inclusion(c, chart, out.projected, order, &t2);
	out.terminated = t1 && t2;
	return out;
}

EffectiveMeasure effective_measure_series(const Polynomial &S0, const DarbouxChart &chart, const FunctionContraction &c,
                                          int order)
{
	return effective_measure_series(S0, chart, c, order, chart.constant(1));
}

} // namespace bvcalc
