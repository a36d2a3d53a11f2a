#include "bvcalc/master_equations.hpp"

#include <algorithm>

namespace bvcalc {

namespace {

std::string idx(size_t a) { return std::to_string(a + 1); }

bool only_base_coordinates(const Polynomial &f, const std::vector<size_t> &base)
{
	for (const auto &[m, c] : f.terms())
		for (size_t k = 0; k < m.size(); ++k)
			if (m[k] && std::find(base.begin(), base.end(), k) == base.end())
				return false;
	return true;
}

std::vector<size_t> indices(const std::vector<std::string> &names, const DarbouxChart &chart)
{
	std::vector<size_t> out;
	for (const auto &n : names)
		out.push_back(chart.signature()->index_of(n));
	return out;
}

} // namespace

bool SymmetryData::has_open_terms() const
{
	for (const auto &a : E)
		for (const auto &b : a)
			for (const auto &i : b)
				for (const auto &e : i)
					if (!e.is_zero())
						return true;
	return false;
}

void validate_symmetry(const SymmetryData &sym, const DarbouxChart &chart)
{
	const size_t n = sym.base.size(), g = sym.ghosts.size();
	const auto &sig = *chart.signature();
	for (size_t i : indices(sym.base, chart))
		if (sig[i].ghost_degree != 0 || chart.is_anti(i))
			throw PreconditionError("base coordinate '" + sig[i].name + "' must be an even coordinate of degree 0");
	for (size_t a : indices(sym.ghosts, chart))
		if (sig[a].ghost_degree != 1 || chart.is_anti(a))
			throw PreconditionError("ghost '" + sig[a].name + "' must be a coordinate of ghost degree 1");
	if (sym.rho.size() != g)
		throw PreconditionError("rho must have one row per ghost");
	for (const auto &row : sym.rho)
		if (row.size() != n)
			throw PreconditionError("rho rows must have one entry per base coordinate");
	if (sym.T.size() != g)
		throw PreconditionError("T must be ghosts x ghosts x ghosts");
	for (const auto &a : sym.T)
	{
		if (a.size() != g)
			throw PreconditionError("T must be ghosts x ghosts x ghosts");
		for (const auto &b : a)
			if (b.size() != g)
				throw PreconditionError("T must be ghosts x ghosts x ghosts");
	}
	for (size_t a = 0; a < g; ++a)
		for (size_t b = 0; b < g; ++b)
			for (size_t c = 0; c < g; ++c)
				if (sym.T[a][b][c] != -sym.T[b][a][c])
					throw PreconditionError("T must be antisymmetric in its lower indices");
	if (!sym.E.empty())
	{
		if (sym.E.size() != g)
			throw PreconditionError("E must be ghosts x ghosts x base x base");
		for (const auto &a : sym.E)
		{
			if (a.size() != g)
				throw PreconditionError("E must be ghosts x ghosts x base x base");
			for (const auto &b : a)
			{
				if (b.size() != n)
					throw PreconditionError("E must be ghosts x ghosts x base x base");
				for (const auto &i : b)
					if (i.size() != n)
						throw PreconditionError("E must be ghosts x ghosts x base x base");
			}
		}
		for (size_t a = 0; a < g; ++a)
			for (size_t b = 0; b < g; ++b)
				for (size_t i = 0; i < n; ++i)
					for (size_t j = 0; j < n; ++j)
						if (sym.E[a][b][i][j] != -sym.E[b][a][i][j] || sym.E[a][b][i][j] != -sym.E[a][b][j][i])
							throw PreconditionError("E must be antisymmetric in both index pairs");
	}
	auto base = indices(sym.base, chart);
	auto check = [&](const Polynomial &p, const char *what) {
		chart.require(p);
		if (!only_base_coordinates(p, base) || !p.has_ghost_degree(0))
			throw PreconditionError(std::string(what) + " entries must be functions of the base coordinates");
	};
	for (const auto &row : sym.rho)
		for (const auto &p : row)
			check(p, "rho");
	for (const auto &a : sym.T)
		for (const auto &b : a)
			for (const auto &p : b)
				check(p, "T");
	for (const auto &a : sym.E)
		for (const auto &b : a)
			for (const auto &i : b)
				for (const auto &p : i)
					check(p, "E");
}

Polynomial apply_symmetry(const SymmetryData &sym, size_t alpha, const Polynomial &f, const DarbouxChart &chart)
{
	Polynomial out = chart.zero();
	auto base = indices(sym.base, chart);
	for (size_t i = 0; i < base.size(); ++i)
		if (!sym.rho[alpha][i].is_zero())
			out += sym.rho[alpha][i] * derive(f, base[i]);
	return out;
}

CheckReport check_symmetry(const Polynomial &S0, const SymmetryData &sym, const DarbouxChart &chart)
{
	validate_symmetry(sym, chart);
	auto base = indices(sym.base, chart);
	chart.require(S0);
	if (!S0.has_ghost_degree(0) || !only_base_coordinates(S0, base))
		throw PreconditionError("S0 must be an even function of the base coordinates");
	const size_t n = base.size(), g = sym.ghosts.size();
	CheckReport report;
	for (size_t a = 0; a < g; ++a)
	{
		Polynomial r = apply_symmetry(sym, a, S0, chart);
		if (!r.is_zero())
			report.residuals.push_back({"X" + idx(a) + "(S0)", r});
	}
	std::vector<Polynomial> dS0;
	for (size_t i : base)
		dS0.push_back(derive(S0, i));
	for (size_t a = 0; a < g; ++a)
		for (size_t b = a + 1; b < g; ++b)
			for (size_t i = 0; i < n; ++i)
			{
				Polynomial r = apply_symmetry(sym, a, sym.rho[b][i], chart) - apply_symmetry(sym, b, sym.rho[a][i], chart);
				for (size_t c = 0; c < g; ++c)
					r -= sym.T[a][b][c] * sym.rho[c][i];
				if (!sym.E.empty())
					for (size_t j = 0; j < n; ++j)
						r -= dS0[j] * sym.E[a][b][j][i];
				if (!r.is_zero())
					report.residuals.push_back({"[X" + idx(a) + ",X" + idx(b) + "]^" + sym.base[i], r});
			}
	return report;
}

Polynomial build_S1_closed(const SymmetryData &sym, const DarbouxChart &chart)
{
	validate_symmetry(sym, chart);
	if (sym.has_open_terms())
		throw PreconditionError("symmetry has open terms (E != 0); use the open master equation solver");
	return build_S1(sym, chart);
}

Polynomial build_S1(const SymmetryData &sym, const DarbouxChart &chart)
{
	validate_symmetry(sym, chart);
	auto base = indices(sym.base, chart);
	auto ghosts = indices(sym.ghosts, chart);
	const auto &sig = chart.signature();
	Polynomial S1 = chart.zero();
	for (size_t a = 0; a < ghosts.size(); ++a)
	{
		Polynomial beta = Polynomial::generator(sig, ghosts[a]);
		for (size_t i = 0; i < base.size(); ++i)
			if (!sym.rho[a][i].is_zero())
				S1 += Polynomial::generator(sig, chart.partner(base[i])) * sym.rho[a][i] * beta;
	}
	for (size_t c = 0; c < ghosts.size(); ++c)
	{
		Polynomial anti = Polynomial::generator(sig, chart.partner(ghosts[c]));
		for (size_t a = 0; a < ghosts.size(); ++a)
			for (size_t b = 0; b < ghosts.size(); ++b)
				if (!sym.T[a][b][c].is_zero())
					S1 -= Scalar::rational(1, 2) * (anti * sym.T[a][b][c] * Polynomial::generator(sig, ghosts[a]) *
					                                Polynomial::generator(sig, ghosts[b]));
	}
	return S1;
}

Scalar minus_i_hbar()
{
	return -(Scalar::imag_unit() * Scalar::hbar());
}

Polynomial check_cme(const Polynomial &S, const DarbouxChart &chart)
{
	return poisson_bracket(S, S, chart);
}

Polynomial check_qme(const Polynomial &S, const DarbouxChart &chart)
{
	return Scalar::rational(1, 2) * poisson_bracket(S, S, chart) + minus_i_hbar() * bv_laplacian(S, chart);
}

Polynomial delta_bv(const Polynomial &S, const Polynomial &f, const DarbouxChart &chart)
{
	return poisson_bracket(S, f, chart) + minus_i_hbar() * bv_laplacian(f, chart);
}

} // namespace bvcalc
