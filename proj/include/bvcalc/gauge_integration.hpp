#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "bvcalc/master_equations.hpp"

namespace bvcalc {

/// Throws PreconditionError unless Ψ is odd of ghost degree -1 and free of anti-coordinates.
void validate_gauge_fermion(const Polynomial &psi, const DarbouxChart &chart);

/**
 * f restricted to the graph of dΨ: z†_i = (-1)^{|z^i|} ∂Ψ/∂z^i (left derivative).
 * The sign on odd coordinates makes the graph Lagrangian for the bracket with
 * {z, z†} = (-1)^{|z|}; for even z it is the plain substitution.
 */
Polynomial restrict_to_lagrangian(const Polynomial &f, const Polynomial &psi, const DarbouxChart &chart);

/// The constraints z†_i - (-1)^{|z^i|} ∂Ψ/∂z^i cutting out the graph of dΨ.
std::vector<Polynomial> fermion_constraints(const Polynomial &psi, const DarbouxChart &chart);

/**
 * Berezin integral over the listed odd generators β^1, ..., β^n: the r with
 * f = r·β^n⋯β^1 + (terms missing some β^k). Throws DegreeMismatch for an even
 * or repeated variable.
 */
Polynomial berezin_integrate(const Polynomial &f, const std::vector<size_t> &odd_vars);
Polynomial berezin_integrate(const Polynomial &f, const std::vector<std::string> &odd_vars);

/// A Lagrangian submanifold, given by a gauge fermion or by explicit constraints.
struct LagrangianSpec
{
	std::optional<Polynomial> fermion;
	std::vector<Polynomial> constraints;

	static LagrangianSpec from_fermion(Polynomial psi) { return {std::move(psi), {}}; }
	static LagrangianSpec from_constraints(std::vector<Polynomial> c) { return {std::nullopt, std::move(c)}; }
};

/**
 * Brackets {c_i, c_j} for all i <= j; only nonzero ones are reported, labelled
 * "{c1,c2}". A fermion spec is checked through its induced constraints.
 * Throws PreconditionError unless there are exactly as many constraints as Darboux pairs.
 */
CheckReport check_involution(const LagrangianSpec &L, const DarbouxChart &chart);

enum class IntegrationMethod
{
	gaussian_exact,
	delta_reduced,
	quadrature
};

std::string to_string(IntegrationMethod m);

struct IntegralResult
{
	std::complex<double> value;
	IntegrationMethod method = IntegrationMethod::gaussian_exact;
	/// Zero for the exact methods; |I(n) - I(2n)| for quadrature.
	double error = 0.0;
};

enum class IntegrationScheme
{
	/// Delta-reduction and Gaussian if possible, else quadrature if a domain is given.
	automatic,
	exact,
	quadrature
};

struct QuadratureDomain
{
	/// Bounds per integration variable, in the order of the variable list.
	std::vector<std::pair<double, double>> bounds;
	unsigned order = 8;
	unsigned panels = 16;
	/// Relative tolerance on |I(n) - I(2n)|; failure raises ConvergenceError.
	double tolerance = 1e-10;
	unsigned max_refinements = 4;
};

struct EvenIntegrationOptions
{
	IntegrationScheme scheme = IntegrationScheme::automatic;
	std::optional<QuadratureDomain> domain;
};

/**
 * ∫ g(x) e^{i φ(x)/ħ} dx over the listed even generators. Both φ and g may
 * depend only on those generators.
 *
 * Exact path: every variable λ entering φ linearly, with g free of λ, and
 * whose coefficient contains some other variable y linearly with a real
 * constant coefficient a, is integrated to 2πħ/|a| δ(y - y*). The remaining
 * phase must be c + b·x + ½ xᵀKx with K invertible and either real (Fresnel,
 * phase e^{iπσ/4}) or with positive definite imaginary part (damped).
 * Moments use the covariance iħK⁻¹.
 */
IntegralResult integrate_even(const Polynomial &phase, const Polynomial &prefactor, const std::vector<size_t> &vars,
                              double hbar, const EvenIntegrationOptions &options = {});

/// Exact Gaussian result split into its ħ-polynomial moment and its numeric normalization.
struct ExactGaussian
{
	/// Wick moment of the prefactor, including delta Jacobians and the i/ħ powers it carries.
	Scalar moment;
	/// e^{i c/ħ} (2πħ)^{n/2+k} det(-iK)^{-1/2} at the requested ħ, k the number of deltas.
	std::complex<double> normalization;
	int deltas = 0;
};

/// The exact path of integrate_even; throws PreconditionError when it does not apply.
ExactGaussian integrate_even_exact(const Polynomial &phase, const Polynomial &prefactor,
                                   const std::vector<size_t> &vars, double hbar);

struct BvIntegralOptions
{
	EvenIntegrationOptions even;
};

/**
 * ∫_L f e^{iS/ħ}: restrict to the graph of dΨ, expand the soul part of the
 * exponent, Berezin-integrate over the odd coordinates in chart order, and
 * integrate the even coordinates. Throws AdmissibilityError if the Berezin
 * integral of e^{iS/ħ} vanishes identically (the gauge does not fix the symmetry).
 */
IntegralResult bv_integral(const Polynomial &f, const Polynomial &S, const Polynomial &psi, const DarbouxChart &chart,
                           double hbar, const BvIntegralOptions &options = {});

/// ⟨f⟩ = ∫_L f e^{iS/ħ} / ∫_L e^{iS/ħ}. Throws AdmissibilityError if the denominator vanishes.
IntegralResult bv_expectation(const Polynomial &f, const Polynomial &S, const LagrangianSpec &L,
                              const DarbouxChart &chart, double hbar, const BvIntegralOptions &options = {});

} // namespace bvcalc
