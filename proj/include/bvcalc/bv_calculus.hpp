#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bvcalc/polynomial.hpp"

namespace bvcalc {

struct DarbouxPair
{
	size_t coordinate;
	size_t anti;
};

/// A coordinate z together with the name of its anti-coordinate z† (ghost degree -|z|-1).
struct CoordinateSpec
{
	std::string name;
	int ghost_degree = 0;
	std::string anti_name;
};

/**
 * Darboux chart: generators paired as (z^i, z†_i) with |z†_i| = -|z^i| - 1,
 * every generator in exactly one pair. Carries a label for the reference
 * measure Ω; only constant-coefficient (Lebesgue-type) measures are supported.
 */
class DarbouxChart
{
public:
	DarbouxChart(SignaturePtr sig, std::vector<DarbouxPair> pairs, std::string measure = "lebesgue");

	/// Builds the signature z^1, z†_1, z^2, z†_2, ... from coordinate specs.
	static DarbouxChart from_coordinates(const std::vector<CoordinateSpec> &coords, std::string measure = "lebesgue");
	/// Pairs given by generator names over an existing signature.
	static DarbouxChart from_names(SignaturePtr sig, const std::vector<std::pair<std::string, std::string>> &pairs,
	                               std::string measure = "lebesgue");

	const SignaturePtr &signature() const { return sig_; }
	const std::vector<DarbouxPair> &pairs() const { return pairs_; }
	const std::string &measure() const { return measure_; }

	bool is_anti(size_t generator) const { return anti_[generator]; }
	size_t partner(size_t generator) const { return partner_[generator]; }
	/// Index of the pair containing `generator`.
	size_t pair_of(size_t generator) const { return pair_index_[generator]; }

	Polynomial zero() const { return Polynomial(sig_); }
	Polynomial constant(const Scalar &c) const { return Polynomial(sig_, c); }
	Polynomial var(const std::string &name) const { return Polynomial::generator(sig_, name); }

	/// Throws SignatureMismatch unless f lives over this chart's signature.
	void require(const Polynomial &f) const;

private:
	SignaturePtr sig_;
	std::vector<DarbouxPair> pairs_;
	std::string measure_;
	std::vector<bool> anti_;
	std::vector<size_t> partner_;
	std::vector<size_t> pair_index_;
};

/**
 * Odd Poisson bracket
 *   {f,g} = Σ_i (-1)^{|z^i|} ( f∂←_{z^i} ∂→_{z†_i}g - f∂←_{z†_i} ∂→_{z^i}g ),
 * normalized so that {z^i, z†_i} = (-1)^{|z^i|}; in particular {x, x†} = 1 for even x.
 */
Polynomial poisson_bracket(const Polynomial &f, const Polynomial &g, const DarbouxChart &chart);

/// BV Laplacian Δ = Σ_i ∂→_{z^i} ∂→_{z†_i} for a constant reference measure.
Polynomial bv_laplacian(const Polynomial &f, const DarbouxChart &chart);

/// Semidensity in normal form f·Ω, optionally wrapped as e^{iS/ħ}·f.
struct Semidensity
{
	Polynomial payload;
	std::optional<Polynomial> exponent_action;
};

/// [fΩ] -> [(Δf)Ω]. Exponential payloads are rejected.
Semidensity delta_on_semidensity(const Semidensity &s, const DarbouxChart &chart);

/// L_Q = QΔ - (-1)^{|Q|} ΔQ applied to a polynomial payload. Q must be homogeneous.
Polynomial lie_derivative(const Polynomial &Q, const Polynomial &f, const DarbouxChart &chart);
Semidensity lie_derivative(const Polynomial &Q, const Semidensity &s, const DarbouxChart &chart);

/// Parity of a homogeneous polynomial; throws DegreeMismatch for inhomogeneous parity.
bool parity_of(const Polynomial &f, const char *what);

} // namespace bvcalc
