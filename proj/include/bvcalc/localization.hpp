#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "bvcalc/hpt.hpp"

namespace bvcalc {

/// Isolated critical point of H, described in local Darboux coordinates.
struct FixedPoint
{
	std::string label;
	double value = 0.0;
	/// Hessian H_{,ij} (2m × 2m, symmetric).
	std::vector<std::vector<double>> hessian;
	/// det ω_{ij} at the point; 1 in Darboux coordinates.
	double omega_det = 1.0;
};

/**
 * Compact symplectic 2m-manifold parameterized by a coordinate box, with the
 * Liouville density ω^m/m! written against dx¹⋯dx^{2m}, and the critical
 * points of H.
 */
struct SymplecticModel
{
	std::string name;
	unsigned m = 1;
	std::vector<std::string> coordinates;
	std::vector<std::pair<double, double>> domain;
	std::function<double(const double *)> hamiltonian;
	std::function<double(const double *)> density;
	std::vector<FixedPoint> fixed_points;

	/// S² with H = cos θ in coordinates u = cos θ ∈ [-1,1], φ ∈ [0,2π]; ω^1/1! = du dφ.
	static SymplecticModel sphere();
	/// The same model with H + c.
	SymplecticModel shifted(double c) const;
};

struct HessianData
{
	/// Number of positive minus number of negative eigenvalues.
	int signature = 0;
	double abs_det = 0.0;
};

/// Signature and |det| of a real symmetric matrix (Jacobi rotations). Throws PreconditionError if degenerate.
HessianData hessian_data(const std::vector<std::vector<double>> &h);

struct LhsOptions
{
	/// Gauss–Legendre nodes per panel.
	unsigned order = 12;
	/// Minimum nodes per period of the phase along each axis.
	unsigned nodes_per_period = 20;
	double tolerance = 1e-12;
	unsigned max_refinements = 6;
};

struct NumericIntegral
{
	std::complex<double> value;
	/// |I(2n) - I(n)| for the last refinement.
	double error = 0.0;
	unsigned panels = 0;
};

/// ∫ e^{iH/ħ} ω^m/m! by refined tensor Gauss–Legendre. Throws ConvergenceError if the tolerance is not met.
NumericIntegral dh_lhs_numeric(const SymplecticModel &model, double hbar, const LhsOptions &options = {});

/**
 * Σ_p (2πħ)^m e^{iH(p)/ħ} e^{iπσ_p/4} √det ω_p / √|det H_{,ij}(p)|, the
 * stationary-phase reading of the fixed-point formula. Throws PreconditionError
 * for a degenerate or wrongly sized Hessian.
 */
std::complex<double> dh_fixed_point_sum(const SymplecticModel &model, double hbar);

/**
 * Contribution of ħ^n to the small-sphere integral around a critical point with
 * local model H = H(p) + r²/2:
 *   coefficient · ħ^n · π^m · ε^{epsilon_power} · e^{iH(p)/ħ} √det ω / √det H_{,ij}.
 * `limit` is the ε → 0 value of the coefficient (zero when epsilon_power > 0).
 */
struct TubularTerm
{
	int order = 0;
	GaussRational coefficient;
	int epsilon_power = 0;
	GaussRational limit;
};

/// Terms n = 0 .. max_order for half-dimension m, from the radial recursion of h̃ = Σ(-iħ)^n (hΔ)^n h with h = r†/r.
std::vector<TubularTerm> tubular_series(unsigned m, int max_order);

struct EffectiveMeasure
{
	/// ι̃ p̃ f.
	Polynomial value;
	/// p̃ f.
	Polynomial projected;
	/// h̃ f.
	Polynomial homotopy;
	/// True if every series stopped before the order bound.
	bool terminated = false;
};

/// h̃ g = Σ_{n<=order} (hδ)^n h g with δ = -iħΔ; `terminated` reports whether the series ended.
Polynomial perturbed_homotopy(const FunctionContraction &c, const DarbouxChart &chart, const Polynomial &g, int order,
                              bool *terminated = nullptr);

/**
 * Perturb the contraction of δ₀ = {S₀,·} by -iħΔ and return ι̃p̃(f) with its
 * ingredients. Satisfies ι̃p̃f - f = h̃ δ_BV f + δ_BV h̃ f with δ_BV = δ₀ - iħΔ
 * whenever the series terminate. For S₀ = ½xᵀAx and f in the Koszul variables,
 * p̃ f is the Fresnel moment ⟨f⟩ with covariance iħA⁻¹.
 */
EffectiveMeasure effective_measure_series(const Polynomial &S0, const DarbouxChart &chart, const FunctionContraction &c,
                                          int order, const Polynomial &f);
EffectiveMeasure effective_measure_series(const Polynomial &S0, const DarbouxChart &chart, const FunctionContraction &c,
                                          int order);

} // namespace bvcalc
