#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bvcalc/linear_algebra.hpp"
#include "bvcalc/master_equations.hpp"

namespace bvcalc {

/**
 * Contraction of (M, d_M) onto (N, d_N) in matrix form:
 * p: M -> N, iota: N -> M, h: M -> M, with
 *   p·ι = id,  ι·p - id = h·d_M + d_M·h,  h² = h·ι = p·h = 0.
 */
struct Contraction
{
	Matrix d_M;
	Matrix d_N;
	Matrix p;
	Matrix iota;
	Matrix h;
};

struct MatrixResidual
{
	std::string axiom;
	Matrix value;
};

struct ContractionReport
{
	std::vector<MatrixResidual> residuals;

	bool ok() const { return residuals.empty(); }
};

/// Exact residuals of all contraction axioms; only nonzero ones are reported. Throws on shape mismatch.
ContractionReport validate_contraction(const Contraction &c);

struct PerturbedContraction
{
	Contraction contraction;
	/// True if (hδ)^n vanished for some n <= order, so the series are exact.
	bool terminated = false;
	/// Number of series terms kept (n = 0 .. terms-1).
	int terms = 0;
	/// Max modulus (at hbar = 1) of the first omitted (hδ)^n; zero when terminated.
	double truncation_residual = 0.0;
};

/**
 * Perturbation lemma: d_M -> d_M + δ,
 *   δ̃ = d_N + Σ p δ (hδ)^n ι,  ι̃ = Σ (hδ)^n ι,  p̃ = Σ p (δh)^n,  h̃ = Σ (hδ)^n h.
 * Throws PreconditionError if (d_M + δ)² ≠ 0.
 */
PerturbedContraction perturb_contraction(const Contraction &c, const Matrix &delta, int order);

/// Contraction acting directly on polynomials (no basis truncation).
class FunctionContraction
{
public:
	virtual ~FunctionContraction() = default;
	virtual Polynomial differential(const Polynomial &f) const = 0;
	virtual Polynomial project(const Polynomial &f) const = 0;
	virtual Polynomial include(const Polynomial &g) const = 0;
	virtual Polynomial homotopy(const Polynomial &f) const = 0;
	/// Basis of the small space N up to the given total degree (optionally one ghost degree).
	virtual PolynomialBasis cohomology_basis(unsigned max_degree, std::optional<int> ghost = std::nullopt) const = 0;
};

/// Contraction with its bases.
struct BasedContraction
{
	Contraction maps;
	PolynomialBasis M;
	PolynomialBasis N;
};

/**
 * Koszul contraction for S₀ = const + ½ A_{ij} x^i x^j with A invertible.
 *
 * The Koszul variables are the coordinates appearing in S₀; all other
 * generators are spectators. δ₀ = {S₀,·} = Σ (A x)_i ∂/∂x†_i,
 * p sets Koszul x and x† to zero, ι is the inclusion, and on the component
 * of combined x/x† weight w > 0
 *   h = -(1/w) Σ x†_i (A⁻¹)^{ij} ∂/∂x^j.
 * S₀ without coordinates (a constant) gives the identity contraction.
 */
class KoszulContraction : public FunctionContraction
{
public:
	KoszulContraction(const Polynomial &S0, const DarbouxChart &chart);

	Polynomial differential(const Polynomial &f) const override;
	Polynomial project(const Polynomial &f) const override;
	Polynomial include(const Polynomial &g) const override { return g; }
	Polynomial homotopy(const Polynomial &f) const override;
	PolynomialBasis cohomology_basis(unsigned max_degree, std::optional<int> ghost = std::nullopt) const override;

	const std::vector<size_t> &koszul_variables() const { return vars_; }
	/// Inverse Hessian, indexed like koszul_variables().
	const std::vector<std::vector<GaussRational>> &inverse_hessian() const { return inverse_; }
	const DarbouxChart &chart() const { return chart_; }
	const Polynomial &action() const { return S0_; }

	/// Matrices on all monomials of total degree <= max_degree.
	BasedContraction matrix_form(unsigned max_degree) const;

private:
	bool is_koszul(size_t generator) const { return koszul_[generator]; }

	DarbouxChart chart_;
	Polynomial S0_;
	std::vector<size_t> vars_;
	std::vector<bool> koszul_;
	std::vector<std::vector<GaussRational>> inverse_;
};

/// koszul_contraction(S0, chart, N) as named matrices.
BasedContraction koszul_contraction(const Polynomial &S0, const DarbouxChart &chart, unsigned max_degree);

/// Polynomial-level view of a matrix contraction.
class MatrixFunctionContraction : public FunctionContraction
{
public:
	explicit MatrixFunctionContraction(BasedContraction c) : c_(std::move(c)) {}

	Polynomial differential(const Polynomial &f) const override;
	Polynomial project(const Polynomial &f) const override;
	Polynomial include(const Polynomial &g) const override;
	Polynomial homotopy(const Polynomial &f) const override;
	PolynomialBasis cohomology_basis(unsigned max_degree, std::optional<int> ghost = std::nullopt) const override;

private:
	BasedContraction c_;
};

struct ObstructionReport
{
	/// Order at which the linear equation has no solution.
	int order = 0;
	/// Witness of the nonzero class.
	Polynomial representative;
	bool solvable = false;
	std::string description;
};

struct OpenCmeOptions
{
	int max_order = 12;
	/// Degree of the truncated cohomology basis used for δ₀-closed adjustments.
	unsigned basis_degree = 4;
	/// Require h(S₁) = 0.
	bool strict_side_condition = false;
};

struct OpenCmeSolution
{
	Polynomial S;
	/// S_0, S_1, S_2, ... (S_k = 0 beyond the last entry).
	std::vector<Polynomial> terms;
	/// T_k for k = 0.. (T_0 = T_1 = 0 placeholders).
	std::vector<Polynomial> T;
	/// Orders at which a δ₀-closed adjustment ι(g) was added to S_{k-1}.
	std::vector<int> adjusted_orders;
};

/**
 * Solve {S,S} = 0 for S = S₀ + S₁ + S₂ + ... by S_k = h(T_k)/k!,
 * T_k = (k!/2) Σ_{i+j=k, i,j>=1} {S_i, S_j}. When p(T_k) ≠ 0 the equation
 * k!·p{S₁, ι g} = -p(T_k) is solved for g in the truncated cohomology basis
 * and ι g is added to S_{k-1}. Throws PreconditionError if δ₀S₁ ≠ 0, if
 * p{S₁,S₁} ≠ 0, or if max_order is exceeded.
 */
std::variant<OpenCmeSolution, ObstructionReport> solve_open_cme(const Polynomial &S0, const Polynomial &S1,
                                                                const FunctionContraction &c, const DarbouxChart &chart,
                                                                const OpenCmeOptions &options = {});

/// δ_BRST g = p{S₁, ι g}.
Polynomial brst_apply(const FunctionContraction &c, const Polynomial &S1, const Polynomial &g, const DarbouxChart &chart);

/// Matrix of δ_BRST between truncated cohomology bases.
Matrix brst_operator(const FunctionContraction &c, const Polynomial &S1, const DarbouxChart &chart,
                     const PolynomialBasis &domain, const PolynomialBasis &codomain);

struct QmeOptions
{
	int max_order = 3;
	/// Total degree bound for the counterterm ansatz.
	unsigned basis_degree = 6;
};

struct QmeSolution
{
	/// S = S̃ + Σ (iħ)^n T_n.
	Polynomial S;
	/// T_1, T_2, ... up to max_order.
	std::vector<Polynomial> counterterms;
	/// True if check_qme(S) vanishes identically (not only to the requested order).
	bool exact = false;
};

/**
 * Solve {S̃, T_n} = Δ T_{n-1} - ½ Σ_{a+b=n, a,b>=1} {T_a, T_b} (T_0 = S̃) order by
 * order over ghost-degree-0 polynomials of bounded degree. If some order has no
 * solution, returns an ObstructionReport whose representative is (iħ)^n times
 * the negated right-hand side (for n = 1: -iħ ΔS̃). Throws if {S̃,S̃} ≠ 0.
 */
std::variant<QmeSolution, ObstructionReport> solve_qme_counterterms(const Polynomial &S_tilde,
                                                                   const DarbouxChart &chart,
                                                                   const QmeOptions &options = {});

} // namespace bvcalc
