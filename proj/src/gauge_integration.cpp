#include "bvcalc/gauge_integration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bvcalc/quadrature.hpp"

namespace bvcalc {

namespace {

using cplx = std::complex<double>;

bool mentions(const Polynomial &f, size_t g)
{
	for (const auto &[m, c] : f.terms())
		if (m[g] != 0)
			return true;
	return false;
}

unsigned degree_in(const Polynomial &f, size_t g)
{
	unsigned d = 0;
	for (const auto &[m, c] : f.terms())
		d = std::max<unsigned>(d, m[g]);
	return d;
}

void require_only(const Polynomial &f, const std::vector<size_t> &vars, const char *what)
{
	const auto &sig = *f.signature();
	for (size_t g = 0; g < sig.size(); ++g)
		if (std::find(vars.begin(), vars.end(), g) == vars.end() && mentions(f, g))
			throw PreconditionError(std::string(what) + " depends on " + sig[g].name +
			                        ", which is not an integration variable");
}

using GMatrix = std::vector<std::vector<GaussRational>>;

/// Exact inverse by Gauss–Jordan; nullopt if singular.
std::optional<GMatrix> invert(GMatrix a)
{
	size_t n = a.size();
	GMatrix inv(n, std::vector<GaussRational>(n));
	for (size_t i = 0; i < n; ++i)
		inv[i][i] = GaussRational(1);
	for (size_t col = 0; col < n; ++col)
	{
		size_t pivot = col;
		while (pivot < n && a[pivot][col].is_zero())
			++pivot;
		if (pivot == n)
			return std::nullopt;
		std::swap(a[pivot], a[col]);
		std::swap(inv[pivot], inv[col]);
		GaussRational s = a[col][col].inverse();
		for (size_t j = 0; j < n; ++j)
		{
			a[col][j] *= s;
			inv[col][j] *= s;
		}
		for (size_t r = 0; r < n; ++r)
		{
			if (r == col || a[r][col].is_zero())
				continue;
			GaussRational f = a[r][col];
			for (size_t j = 0; j < n; ++j)
			{
				a[r][j] -= f * a[col][j];
				inv[r][j] -= f * inv[col][j];
			}
		}
	}
	return inv;
}

/// Signs of a congruence-diagonal form of a real symmetric matrix: (positive, negative, |det|).
struct Inertia
{
	int positive = 0;
	int negative = 0;
	mpq_class abs_det = 1;
};

Inertia inertia(std::vector<std::vector<mpq_class>> a)
{
	Inertia out;
	size_t n = a.size();
	std::vector<bool> done(n, false);
	for (size_t step = 0; step < n; ++step)
	{
		size_t p = n;
		for (size_t i = 0; i < n; ++i)
			if (!done[i] && sgn(a[i][i]) != 0)
			{
				p = i;
				break;
			}
		if (p == n)
		{
			// Zero diagonal: x_i += x_j creates the pivot 2 a_ij (a congruence of determinant 1).
			size_t i = n, j = n;
			for (size_t r = 0; r < n && i == n; ++r)
				for (size_t c = 0; c < n; ++c)
					if (!done[r] && !done[c] && r != c && sgn(a[r][c]) != 0)
					{
						i = r;
						j = c;
						break;
					}
			if (i == n)
			{
				out.abs_det = 0;
				return out;
			}
			for (size_t c = 0; c < n; ++c)
				a[i][c] += a[j][c];
			for (size_t r = 0; r < n; ++r)
				a[r][i] += a[r][j];
			p = i;
		}
		mpq_class d = a[p][p];
		(sgn(d) > 0 ? out.positive : out.negative) += 1;
		out.abs_det *= abs(d);
		done[p] = true;
		for (size_t r = 0; r < n; ++r)
		{
			if (done[r] || sgn(a[r][p]) == 0)
				continue;
			mpq_class f = a[r][p] / d;
			for (size_t c = 0; c < n; ++c)
				a[r][c] -= f * a[p][c];
		}
		for (size_t c = 0; c < n; ++c)
			if (!done[c])
				a[p][c] = 0;
		for (size_t r = 0; r < n; ++r)
			if (!done[r])
				a[r][p] = 0;
	}
	return out;
}

bool positive_definite(std::vector<std::vector<mpq_class>> a)
{
	size_t n = a.size();
	for (size_t k = 0; k < n; ++k)
	{
		if (sgn(a[k][k]) <= 0)
			return false;
		for (size_t r = k + 1; r < n; ++r)
		{
			mpq_class f = a[r][k] / a[k][k];
			for (size_t c = k; c < n; ++c)
				a[r][c] -= f * a[k][c];
		}
	}
	return true;
}

cplx complex_det(std::vector<std::vector<cplx>> a)
{
	size_t n = a.size();
	cplx det = 1.0;
	for (size_t k = 0; k < n; ++k)
	{
		size_t p = k;
		for (size_t r = k + 1; r < n; ++r)
			if (std::abs(a[r][k]) > std::abs(a[p][k]))
				p = r;
		if (a[p][k] == 0.0)
			return 0.0;
		if (p != k)
		{
			std::swap(a[p], a[k]);
			det = -det;
		}
		det *= a[k][k];
		for (size_t r = k + 1; r < n; ++r)
		{
			cplx f = a[r][k] / a[k][k];
			for (size_t c = k; c < n; ++c)
				a[r][c] -= f * a[k][c];
		}
	}
	return det;
}

/**
 * det(A)^{-1/2} for A = -iK, continued from the identity along (1-t)I + tA.
 * Re A is positive semidefinite, so the path avoids singular matrices for t < 1.
 */
cplx inverse_sqrt_det(const GMatrix &K)
{
	size_t n = K.size();
	std::vector<std::vector<mpq_class>> re(n, std::vector<mpq_class>(n)), im(n, std::vector<mpq_class>(n));
	bool real = true;
	for (size_t i = 0; i < n; ++i)
		for (size_t j = 0; j < n; ++j)
		{
			re[i][j] = K[i][j].real();
			im[i][j] = K[i][j].imag();
			real = real && K[i][j].is_real();
		}
	if (real)
	{
		Inertia in = inertia(re);
		int sigma = in.positive - in.negative;
		double phase = std::numbers::pi * sigma / 4.0;
		return std::polar(1.0 / std::sqrt(in.abs_det.get_d()), phase);
	}
	if (!positive_definite(im))
		throw PreconditionError("quadratic form is neither real nor damped (imaginary part not positive definite)");
	auto at = [&](double t) {
		std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n));
		for (size_t i = 0; i < n; ++i)
			for (size_t j = 0; j < n; ++j)
				a[i][j] = t * (cplx(0.0, -1.0) * K[i][j].to_complex()) + (i == j ? 1.0 - t : 0.0);
		return complex_det(a);
	};
	const int steps = 4096;
	cplx prev = 1.0;
	double arg = 0.0;
	for (int s = 1; s <= steps; ++s)
	{
		cplx d = at(double(s) / steps);
		arg += std::arg(d / prev);
		prev = d;
	}
	return std::polar(1.0 / std::sqrt(std::abs(prev)), -arg / 2.0);
}

/// Numeric form of a polynomial in the integration variables.
struct CompiledPolynomial
{
	std::vector<cplx> coefficients;
	std::vector<std::vector<uint16_t>> exponents;

	CompiledPolynomial(const Polynomial &f, const std::vector<size_t> &vars, double hbar)
	{
		for (const auto &[m, c] : f.terms())
		{
			coefficients.push_back(c.evaluate(hbar));
			std::vector<uint16_t> e(vars.size());
			for (size_t k = 0; k < vars.size(); ++k)
				e[k] = m[vars[k]];
			exponents.push_back(std::move(e));
		}
	}

	cplx operator()(const double *x) const
	{
		cplx sum = 0.0;
		for (size_t t = 0; t < coefficients.size(); ++t)
		{
			double v = 1.0;
			for (size_t k = 0; k < exponents[t].size(); ++k)
				for (uint16_t p = 0; p < exponents[t][k]; ++p)
					v *= x[k];
			sum += coefficients[t] * v;
		}
		return sum;
	}
};

IntegralResult integrate_quadrature(const Polynomial &phase, const Polynomial &prefactor,
                                    const std::vector<size_t> &vars, double hbar, const QuadratureDomain &domain)
{
	if (domain.bounds.size() != vars.size())
		throw PreconditionError("quadrature domain needs one interval per integration variable");
	CompiledPolynomial phi(phase, vars, hbar), g(prefactor, vars, hbar);
	auto integrand = [&](const double *x) { return g(x) * std::exp(cplx(0.0, 1.0) * phi(x) / hbar); };
	auto run = [&](unsigned panels) {
		std::vector<Axis> axes;
		for (const auto &[lo, hi] : domain.bounds)
			axes.push_back({lo, hi, panels});
		return tensor_quadrature(axes, domain.order, integrand);
	};
	unsigned panels = std::max(1u, domain.panels);
	cplx coarse = run(panels);
	for (unsigned r = 0; r <= domain.max_refinements; ++r)
	{
		panels *= 2;
		cplx fine = run(panels);
		double err = std::abs(fine - coarse);
		if (err <= domain.tolerance * std::max(std::abs(fine), 1e-300))
			return {fine, IntegrationMethod::quadrature, err};
		coarse = fine;
	}
	throw ConvergenceError("quadrature did not reach relative tolerance " + std::to_string(domain.tolerance));
}

/// Koszul sign of reordering a word of odd generators into increasing index order.
int sort_sign(std::vector<size_t> word)
{
	int sign = 1;
	for (size_t i = 0; i < word.size(); ++i)
		for (size_t j = i + 1; j < word.size(); ++j)
			if (word[i] > word[j])
				sign = -sign;
	return sign;
}

struct ReducedIntegrand
{
	Polynomial body;
	Polynomial z_odd;
	Polynomial f_odd;
	std::vector<size_t> even;
};

ReducedIntegrand reduce_to_body(const Polynomial &f, const Polynomial &S, const Polynomial &psi,
                                const DarbouxChart &chart)
{
	validate_gauge_fermion(psi, chart);
	chart.require(f);
	chart.require(S);
	Polynomial SL = restrict_to_lagrangian(S, psi, chart);
	Polynomial fL = restrict_to_lagrangian(f, psi, chart);
	const auto &sig = *chart.signature();
	std::vector<size_t> odd, even;
	for (const auto &pair : chart.pairs())
		(sig[pair.coordinate].odd() ? odd : even).push_back(pair.coordinate);
	auto has_odd = [&](const Monomial &m) {
		for (size_t g : odd)
			if (m[g])
				return true;
		return false;
	};
	Polynomial body = SL.filter([&](const Monomial &m, const Scalar &) { return !has_odd(m); });
	Polynomial soul = SL - body;
	// e^{i soul/ħ} is a finite sum: every term of soul^k carries at least k odd factors.
	Scalar i_over_hbar(GaussRational::imag_unit(), -1);
	Polynomial exp_soul = chart.constant(1), term = chart.constant(1);
	for (size_t k = 1; k <= odd.size() && !term.is_zero(); ++k)
	{
		term = term * soul * (i_over_hbar * Scalar(GaussRational(mpq_class(1, k))));
		exp_soul += term;
	}
	Polynomial z_odd = berezin_integrate(exp_soul, odd);
	if (z_odd.is_zero())
		throw AdmissibilityError("gauge fermion does not fix the symmetry: the Berezin integral of e^{iS/hbar} vanishes");
	return {body, z_odd, berezin_integrate(fL * exp_soul, odd), even};
}

/// z†_i on the graph of dΨ: (-1)^{|z^i|} ∂Ψ/∂z^i, the sign that makes the graph Lagrangian for our bracket.
Polynomial graph_component(const Polynomial &psi, size_t coordinate)
{
	Polynomial d = derive(psi, coordinate, Side::left);
	return (*psi.signature())[coordinate].odd() ? -d : d;
}

} // namespace

void validate_gauge_fermion(const Polynomial &psi, const DarbouxChart &chart)
{
	chart.require(psi);
	if (psi.is_zero())
		return;
	if (!psi.has_ghost_degree(-1))
		throw PreconditionError("gauge fermion must have ghost degree -1: " + psi.to_string());
	for (size_t g = 0; g < chart.signature()->size(); ++g)
		if (chart.is_anti(g) && mentions(psi, g))
			throw PreconditionError("gauge fermion contains the anti-coordinate " + (*chart.signature())[g].name);
}

Polynomial restrict_to_lagrangian(const Polynomial &f, const Polynomial &psi, const DarbouxChart &chart)
{
	validate_gauge_fermion(psi, chart);
	chart.require(f);
	std::map<size_t, Polynomial> bindings;
	for (const auto &pair : chart.pairs())
		bindings[pair.anti] = graph_component(psi, pair.coordinate);
	return substitute(f, bindings);
}

std::vector<Polynomial> fermion_constraints(const Polynomial &psi, const DarbouxChart &chart)
{
	validate_gauge_fermion(psi, chart);
	std::vector<Polynomial> out;
	for (const auto &pair : chart.pairs())
		out.push_back(Polynomial::generator(chart.signature(), pair.anti) - graph_component(psi, pair.coordinate));
	return out;
}

Polynomial berezin_integrate(const Polynomial &f, const std::vector<size_t> &odd_vars)
{
	const auto &sig = *f.signature();
	for (size_t k = 0; k < odd_vars.size(); ++k)
	{
		if (odd_vars[k] >= sig.size())
			throw SignatureMismatch("Berezin variable index out of range");
		if (!sig[odd_vars[k]].odd())
			throw DegreeMismatch("Berezin integration over the even variable " + sig[odd_vars[k]].name);
		for (size_t j = 0; j < k; ++j)
			if (odd_vars[j] == odd_vars[k])
				throw DegreeMismatch("Berezin variable listed twice: " + sig[odd_vars[k]].name);
	}
	Polynomial out(f.signature());
	for (const auto &[m, c] : f.terms())
	{
		bool top = std::all_of(odd_vars.begin(), odd_vars.end(), [&](size_t g) { return m[g] == 1; });
		if (!top)
			continue;
		// m = s · r · β^n⋯β^1 where the word (odd factors of r, β^n, ..., β^1) sorts to m with sign s.
		Monomial r = m;
		for (size_t g : odd_vars)
			r.set(g, 0);
		std::vector<size_t> word;
		for (size_t g = 0; g < sig.size(); ++g)
			if (sig[g].odd() && r[g])
				word.push_back(g);
		for (auto it = odd_vars.rbegin(); it != odd_vars.rend(); ++it)
			word.push_back(*it);
		out.add_term(r, Scalar(sort_sign(word)) * c);
	}
	return out;
}

Polynomial berezin_integrate(const Polynomial &f, const std::vector<std::string> &odd_vars)
{
	std::vector<size_t> idx;
	for (const auto &name : odd_vars)
		idx.push_back(f.signature()->index_of(name));
	return berezin_integrate(f, idx);
}

CheckReport check_involution(const LagrangianSpec &L, const DarbouxChart &chart)
{
	std::vector<Polynomial> constraints = L.fermion ? fermion_constraints(*L.fermion, chart) : L.constraints;
	if (constraints.size() != chart.pairs().size())
		throw PreconditionError("a Lagrangian submanifold needs " + std::to_string(chart.pairs().size()) +
		                        " constraints, got " + std::to_string(constraints.size()));
	for (const auto &c : constraints)
	{
		chart.require(c);
		if (!c.ghost_degree())
			throw DegreeMismatch("constraint is not homogeneous: " + c.to_string());
	}
	CheckReport report;
	for (size_t i = 0; i < constraints.size(); ++i)
		for (size_t j = i; j < constraints.size(); ++j)
		{
			Polynomial b = poisson_bracket(constraints[i], constraints[j], chart);
			if (!b.is_zero())
				report.residuals.push_back(
				    {"{c" + std::to_string(i + 1) + ",c" + std::to_string(j + 1) + "}", std::move(b)});
		}
	return report;
}

std::string to_string(IntegrationMethod m)
{
	switch (m)
	{
	case IntegrationMethod::gaussian_exact:
		return "gaussian-exact";
	case IntegrationMethod::delta_reduced:
		return "delta-reduced";
	case IntegrationMethod::quadrature:
		return "quadrature";
	}
	return "unknown";
}

ExactGaussian integrate_even_exact(const Polynomial &phase_in, const Polynomial &prefactor_in,
                                   const std::vector<size_t> &vars, double hbar)
{
	require_same_signature(phase_in, prefactor_in);
	const auto &sig = *phase_in.signature();
	for (size_t v : vars)
		if (v >= sig.size() || sig[v].odd())
			throw DegreeMismatch("even integration over a non-even generator");
	require_only(phase_in, vars, "phase");
	require_only(prefactor_in, vars, "prefactor");
	for (const auto &[m, c] : phase_in.terms())
		if (!c.is_hbar_free())
			throw PreconditionError("exact integration needs an hbar-free phase");

	Polynomial phase = phase_in, prefactor = prefactor_in;
	std::vector<size_t> remaining = vars;
	Scalar jacobian(1);
	int deltas = 0;

	bool reduced = true;
	while (reduced)
	{
		reduced = false;
		for (size_t lambda : remaining)
		{
			if (degree_in(phase, lambda) != 1 || mentions(prefactor, lambda))
				continue;
			Polynomial L = derive(phase, lambda);
			for (size_t y : remaining)
			{
				if (y == lambda || degree_in(L, y) != 1)
					continue;
				Polynomial a = derive(L, y);
				if (!a.is_constant())
					continue;
				GaussRational av = a.constant_term().constant_term();
				if (!a.constant_term().is_hbar_free() || !av.is_real())
					continue;
				// δ(a y + rest) = δ(y - y*)/|a|.
				Polynomial ystar = -(L - a * Polynomial::generator(phase.signature(), y)) *
				                   Scalar(GaussRational(1) / av);
				Polynomial lam = Polynomial::generator(phase.signature(), lambda);
				phase = substitute(phase - lam * L, std::map<size_t, Polynomial>{{y, ystar}});
				prefactor = substitute(prefactor, std::map<size_t, Polynomial>{{y, ystar}});
				jacobian *= Scalar(GaussRational(mpq_class(1) / abs(av.real())));
				++deltas;
				std::erase(remaining, lambda);
				std::erase(remaining, y);
				reduced = true;
				break;
			}
			if (reduced)
				break;
		}
	}

	size_t n = remaining.size();
	for (size_t v : remaining)
		if (degree_in(phase, v) > 2)
			throw PreconditionError("phase is not quadratic in " + sig[v].name);
	for (const auto &[m, c] : phase.terms())
		if (m.total_degree() > 2)
			throw PreconditionError("phase is not quadratic after delta reduction");

	GMatrix K(n, std::vector<GaussRational>(n));
	std::vector<GaussRational> b(n);
	for (size_t i = 0; i < n; ++i)
	{
		Polynomial di = derive(phase, remaining[i]);
		b[i] = di.constant_term().constant_term();
		for (size_t j = 0; j < n; ++j)
			K[i][j] = derive(di, remaining[j]).constant_term().constant_term();
	}
	GaussRational c = phase.constant_term().constant_term();
	for (size_t v : remaining)
		if (!mentions(phase, v))
			throw PreconditionError("singular quadratic form: the phase does not depend on " + sig[v].name);
	auto Kinv = invert(K);
	if (!Kinv)
		throw PreconditionError("singular quadratic form");

	// Complete the square: x = y + x0, x0 = -K⁻¹b, constant c - ½ bᵀK⁻¹b.
	std::map<size_t, Polynomial> shift;
	for (size_t i = 0; i < n; ++i)
	{
		GaussRational x0;
		for (size_t j = 0; j < n; ++j)
			x0 -= (*Kinv)[i][j] * b[j];
		c += GaussRational(mpq_class(1, 2)) * b[i] * x0;
		shift[remaining[i]] =
		    Polynomial::generator(phase.signature(), remaining[i]) + Polynomial(phase.signature(), Scalar(x0));
	}
	Polynomial P = substitute(prefactor, shift);

	// Wick contraction: ⟨P⟩ = [exp(½ Σ C_ij ∂_i∂_j) P](0), C = iħK⁻¹.
	Scalar moment;
	Polynomial term = P;
	for (int k = 0; !term.is_zero(); ++k)
	{
		moment += term.constant_term();
		Polynomial next(P.signature());
		for (size_t i = 0; i < n; ++i)
		{
			Polynomial di = derive(term, remaining[i]);
			if (di.is_zero())
				continue;
			for (size_t j = 0; j < n; ++j)
			{
				if ((*Kinv)[i][j].is_zero())
					continue;
				Scalar cij(GaussRational::imag_unit() * (*Kinv)[i][j] * GaussRational(mpq_class(1, 2)), 1);
				next += cij * derive(di, remaining[j]);
			}
		}
		term = next * Scalar(GaussRational(mpq_class(1, k + 1)));
	}
	moment *= jacobian;

	cplx norm = std::exp(cplx(0.0, 1.0) * c.to_complex() / hbar);
	norm *= std::pow(2.0 * std::numbers::pi * hbar, 0.5 * n + deltas);
	if (n > 0)
		norm *= inverse_sqrt_det(K);
	return {moment, norm, deltas};
}

IntegralResult integrate_even(const Polynomial &phase, const Polynomial &prefactor, const std::vector<size_t> &vars,
                              double hbar, const EvenIntegrationOptions &options)
{
	if (!(hbar > 0.0))
		throw PreconditionError("hbar must be positive");
	if (options.scheme != IntegrationScheme::quadrature)
	{
		try
		{
			ExactGaussian g = integrate_even_exact(phase, prefactor, vars, hbar);
			return {g.normalization * g.moment.evaluate(hbar),
			        g.deltas > 0 ? IntegrationMethod::delta_reduced : IntegrationMethod::gaussian_exact, 0.0};
		}
		catch (const PreconditionError &)
		{
			if (options.scheme == IntegrationScheme::exact || !options.domain)
				throw;
		}
	}
	if (!options.domain)
		throw PreconditionError("quadrature requested without an integration domain");
	require_only(phase, vars, "phase");
	require_only(prefactor, vars, "prefactor");
	return integrate_quadrature(phase, prefactor, vars, hbar, *options.domain);
}

IntegralResult bv_integral(const Polynomial &f, const Polynomial &S, const Polynomial &psi, const DarbouxChart &chart,
                           double hbar, const BvIntegralOptions &options)
{
	auto r = reduce_to_body(f, S, psi, chart);
	return integrate_even(r.body, r.f_odd, r.even, hbar, options.even);
}

IntegralResult bv_expectation(const Polynomial &f, const Polynomial &S, const LagrangianSpec &L,
                              const DarbouxChart &chart, double hbar, const BvIntegralOptions &options)
{
	if (!L.fermion)
		throw PreconditionError("expectation values need a gauge fermion");
	auto r = reduce_to_body(f, S, *L.fermion, chart);
	IntegralResult z = integrate_even(r.body, r.z_odd, r.even, hbar, options.even);
	if (z.value == 0.0)
		throw AdmissibilityError("vanishing partition function");
	IntegralResult num = integrate_even(r.body, r.f_odd, r.even, hbar, options.even);
	IntegralResult out{num.value / z.value, z.method, 0.0};
	if (z.method == IntegrationMethod::quadrature)
		out.error = (num.error + std::abs(out.value) * z.error) / std::abs(z.value);
	return out;
}

} // namespace bvcalc
