#include "bvcalc/bv_calculus.hpp"

namespace bvcalc {

DarbouxChart::DarbouxChart(SignaturePtr sig, std::vector<DarbouxPair> pairs, std::string measure)
    : sig_(std::move(sig)), pairs_(std::move(pairs)), measure_(std::move(measure))
{
	if (measure_ != "lebesgue" && measure_ != "constant")
		throw PreconditionError("unsupported reference measure '" + measure_ +
		                        "' (only constant-coefficient measures: lebesgue, constant)");
	const size_t n = sig_->size();
	anti_.assign(n, false);
	partner_.assign(n, 0);
	pair_index_.assign(n, 0);
	std::vector<bool> seen(n, false);
	for (size_t k = 0; k < pairs_.size(); ++k)
	{
		const auto &[z, a] = pairs_[k];
		if (z >= n || a >= n)
			throw SignatureMismatch("chart pair refers to unknown generator");
		if (z == a || seen[z] || seen[a])
			throw PreconditionError("chart pairs must be disjoint");
		seen[z] = seen[a] = true;
		const Generator &gz = (*sig_)[z];
		const Generator &ga = (*sig_)[a];
		if (ga.ghost_degree != -gz.ghost_degree - 1)
			throw DegreeMismatch("anti-coordinate '" + ga.name + "' of '" + gz.name + "' must have ghost degree " +
			                     std::to_string(-gz.ghost_degree - 1));
		anti_[a] = true;
		partner_[z] = a;
		partner_[a] = z;
		pair_index_[z] = pair_index_[a] = k;
	}
	for (size_t i = 0; i < n; ++i)
		if (!seen[i])
			throw PreconditionError("generator '" + (*sig_)[i].name + "' belongs to no Darboux pair");
}

DarbouxChart DarbouxChart::from_coordinates(const std::vector<CoordinateSpec> &coords, std::string measure)
{
	std::vector<Generator> gens;
	std::vector<DarbouxPair> pairs;
	for (const auto &c : coords)
	{
		pairs.push_back({gens.size(), gens.size() + 1});
		gens.push_back({c.name, c.ghost_degree});
		gens.push_back({c.anti_name, -c.ghost_degree - 1});
	}
	return DarbouxChart(make_signature(std::move(gens)), std::move(pairs), std::move(measure));
}

DarbouxChart DarbouxChart::from_names(SignaturePtr sig, const std::vector<std::pair<std::string, std::string>> &pairs,
                                      std::string measure)
{
	std::vector<DarbouxPair> idx;
	for (const auto &[z, a] : pairs)
		idx.push_back({sig->index_of(z), sig->index_of(a)});
	return DarbouxChart(std::move(sig), std::move(idx), std::move(measure));
}

void DarbouxChart::require(const Polynomial &f) const
{
	if (!f.is_zero())
		require_same_signature(sig_, f.signature());
}

bool parity_of(const Polynomial &f, const char *what)
{
	auto p = f.parity();
	if (!p)
		throw DegreeMismatch(std::string(what) + " must have definite parity");
	return *p;
}

Polynomial poisson_bracket(const Polynomial &f, const Polynomial &g, const DarbouxChart &chart)
{
	chart.require(f);
	chart.require(g);
	Polynomial out = chart.zero();
	if (f.is_zero() || g.is_zero())
		return out;
	const Signature &sig = *chart.signature();
	for (const auto &[z, a] : chart.pairs())
	{
		Polynomial fz = derive(f, z, Side::right);
		Polynomial fa = derive(f, a, Side::right);
		Polynomial term = chart.zero();
		if (!fz.is_zero())
			term += fz * derive(g, a, Side::left);
		if (!fa.is_zero())
			term -= fa * derive(g, z, Side::left);
		if (sig[z].odd())
			out -= term;
		else
			out += term;
	}
	return out;
}

Polynomial bv_laplacian(const Polynomial &f, const DarbouxChart &chart)
{
	chart.require(f);
	Polynomial out = chart.zero();
	for (const auto &[z, a] : chart.pairs())
	{
		Polynomial fa = derive(f, a);
		if (!fa.is_zero())
			out += derive(fa, z);
	}
	return out;
}

Semidensity delta_on_semidensity(const Semidensity &s, const DarbouxChart &chart)
{
	if (s.exponent_action)
		throw PreconditionError("Δ on exponential semidensities is not defined here; use the quantum master equation");
	return {bv_laplacian(s.payload, chart), std::nullopt};
}

Polynomial lie_derivative(const Polynomial &Q, const Polynomial &f, const DarbouxChart &chart)
{
	if (!Q.ghost_degree())
		throw DegreeMismatch("Lie derivative needs a homogeneous Q");
	bool q_odd = parity_of(Q, "Q");
	Polynomial out = Q * bv_laplacian(f, chart);
	Polynomial second = bv_laplacian(Q * f, chart);
	if (q_odd)
		out += second;
	else
		out -= second;
	return out;
}

Semidensity lie_derivative(const Polynomial &Q, const Semidensity &s, const DarbouxChart &chart)
{
	if (s.exponent_action)
		throw PreconditionError("Lie derivative on exponential semidensities is not supported");
	return {lie_derivative(Q, s.payload, chart), std::nullopt};
}

} // namespace bvcalc
