#pragma once

#include <string>
#include <vector>

#include "bvcalc/bv_calculus.hpp"

namespace bvcalc {

/**
 * Symmetry data on the base coordinates x^i:
 *   X_α = ρ^i_α ∂_i,
 *   [X_α, X_β] = T^γ_{αβ} X_γ + dS₀⌐E_{αβ},  (dS₀⌐E_{αβ})^i = ∂_j S₀ E^{ji}_{αβ}.
 * Index layout: rho[α][i], T[α][β][γ] = T^γ_{αβ}, E[α][β][i][j] = E^{ij}_{αβ}.
 * An empty E means E = 0.
 */
struct SymmetryData
{
	std::vector<std::string> base;
	std::vector<std::string> ghosts;
	std::vector<std::vector<Polynomial>> rho;
	std::vector<std::vector<std::vector<Polynomial>>> T;
	std::vector<std::vector<std::vector<std::vector<Polynomial>>>> E;

	bool has_open_terms() const;
};

struct Residual
{
	std::string label;
	Polynomial value;
};

struct CheckReport
{
	std::vector<Residual> residuals;

	bool ok() const { return residuals.empty(); }
};

/// Shape and antisymmetry checks; throws PreconditionError.
void validate_symmetry(const SymmetryData &sym, const DarbouxChart &chart);

/// X_α applied to a function of the base coordinates.
Polynomial apply_symmetry(const SymmetryData &sym, size_t alpha, const Polynomial &f, const DarbouxChart &chart);

/// Residuals of X_α(S₀) = 0 and of the closure relation; only nonzero residuals are reported.
CheckReport check_symmetry(const Polynomial &S0, const SymmetryData &sym, const DarbouxChart &chart);

/// S₁ = x†_i ρ^i_α β^α - ½ β†_γ T^γ_{αβ} β^α β^β. Requires E = 0.
Polynomial build_S1_closed(const SymmetryData &sym, const DarbouxChart &chart);

/// The same expression without the E = 0 requirement: the first-order seed for the open solver.
Polynomial build_S1(const SymmetryData &sym, const DarbouxChart &chart);

/// {S,S}.
Polynomial check_cme(const Polynomial &S, const DarbouxChart &chart);

/// ½{S,S} - iħ ΔS.
Polynomial check_qme(const Polynomial &S, const DarbouxChart &chart);

/// δ_BV f = {S,f} - iħ Δf.
Polynomial delta_bv(const Polynomial &S, const Polynomial &f, const DarbouxChart &chart);

/// -iħ as a Scalar.
Scalar minus_i_hbar();

} // namespace bvcalc
