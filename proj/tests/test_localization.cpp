#include <doctest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "bvcalc/gauge_integration.hpp"
#include "bvcalc/localization.hpp"
#include "bvcalc/numeric_expr.hpp"
#include "models.hpp"
#include "oracles.hpp"
#include "random_poly.hpp"

using namespace bvcalc;
using namespace testing_support;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

double rel(cplx a, cplx b)
{
	return std::abs(a - b) / std::abs(b);
}

} // namespace

TEST_CASE("numeric expressions")
{
	NumericExpr e("2*sin(u)^2 + cos(u)^2 - x/4 + 2^3^0 - -1", {"u", "x"});
	double v[2] = {0.3, 2.0};
	CHECK(e.evaluate(v) == doctest::Approx(2 * std::pow(std::sin(0.3), 2) + std::pow(std::cos(0.3), 2) - 0.5 + 2 + 1));
	CHECK(evaluate_constant("2*pi") == doctest::Approx(2 * pi));
	CHECK(evaluate_constant("-2^2") == -4.0);
	CHECK(evaluate_constant("1.5e1 + sqrt(4) + exp(0) + abs(-1) + log(1) + tan(0)") == 19.0);
	try
	{
		NumericExpr bad("1 + foo(x)", {"x"}, {3, 10});
		FAIL("expected a parse error");
	}
	catch (const ParseError &err)
	{
		CHECK(err.line == 3);
		CHECK(err.column == 14);
	}
	CHECK_THROWS_AS(evaluate_constant("(1 + 2"), ParseError);
	CHECK_THROWS_AS(evaluate_constant("1 +"), ParseError);
	CHECK_THROWS_AS(evaluate_constant("sin 2"), ParseError);
}

TEST_CASE("hessian signature")
{
	auto d = hessian_data({{0, 2}, {2, 0}});
	CHECK(d.signature == 0);
	CHECK(d.abs_det == doctest::Approx(4));
	d = hessian_data({{2, 1, 0}, {1, 2, 0}, {0, 0, -5}});
	CHECK(d.signature == 1);
	CHECK(d.abs_det == doctest::Approx(15));
	CHECK_THROWS_AS(hessian_data({{1, 1}, {1, 1}}), PreconditionError);
	CHECK_THROWS_AS(hessian_data({{1, 0}, {2, 1}}), PreconditionError);
}

TEST_CASE("Duistermaat-Heckman on the sphere")
{
	auto s2 = SymplecticModel::sphere();
	auto start = std::chrono::steady_clock::now();
	for (double hbar : {0.5, 1.0, 2.0})
	{
		INFO(hbar);
		cplx oracle = 4 * pi * hbar * std::sin(1 / hbar);
		auto lhs = dh_lhs_numeric(s2, hbar);
		cplx rhs = dh_fixed_point_sum(s2, hbar);
		CHECK(rel(lhs.value, oracle) < 1e-12);
		CHECK(rel(rhs, oracle) < 1e-13);
		CHECK(rel(lhs.value, rhs) < 1e-8);
		CHECK(lhs.error < 1e-10);
	}
	CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 10.0);
	CHECK(std::abs(dh_lhs_numeric(s2, 1.0).value - 10.57423) < 1e-5);
	CHECK(std::abs(dh_lhs_numeric(s2, 0.5).value - 5.71328) < 1e-5);

	// H ≡ 0: the symplectic volume.
	auto flat = s2;
	flat.hamiltonian = [](const double *) { return 0.0; };
	CHECK(rel(dh_lhs_numeric(flat, 1.0).value, 4 * pi) < 1e-13);

	// Phase equivariance under H -> H + c.
	for (double c : {0.7, -2.0})
	{
		cplx factor = std::polar(1.0, c / 1.5);
		CHECK(rel(dh_fixed_point_sum(s2.shifted(c), 1.5), factor * dh_fixed_point_sum(s2, 1.5)) < 1e-13);
		CHECK(rel(dh_lhs_numeric(s2.shifted(c), 1.5).value, factor * dh_lhs_numeric(s2, 1.5).value) < 1e-11);
	}

	auto degenerate = s2;
	degenerate.fixed_points[0].hessian = {{0, 0}, {0, -1}};
	CHECK_THROWS_AS(dh_fixed_point_sum(degenerate, 1.0), PreconditionError);
	CHECK_THROWS_AS(dh_fixed_point_sum(s2, 0.0), PreconditionError);
	LhsOptions tight;
	tight.max_refinements = 0;
	CHECK_THROWS_AS(dh_lhs_numeric(s2, 1.0, tight), ConvergenceError);
}

TEST_CASE("single critical point: damped plane oscillator")
{
	// H = r²/2 in polar coordinates with Liouville density r e^{-εr²}:
	// ∫ = π/(ε - i/(2ħ)), which tends to the one-term sum 2πiħ as ε -> 0.
	const double hbar = 1.0;
	double previous = INFINITY;
	for (double eps : {1e-2, 1e-3})
	{
		INFO(eps);
		double R = std::sqrt(40 / eps);
		NumericExpr density("r*exp(-" + std::to_string(eps) + "*r^2)", {"r", "phi"});
		NumericExpr hamiltonian("r^2/2", {"r", "phi"});
		SymplecticModel plane;
		plane.m = 1;
		plane.coordinates = {"r", "phi"};
		plane.domain = {{0.0, R}, {0.0, 2 * pi}};
		plane.hamiltonian = [&](const double *x) { return hamiltonian.evaluate(x); };
		plane.density = [&](const double *x) { return density.evaluate(x); };
		plane.fixed_points = {{"origin", 0.0, {{1, 0}, {0, 1}}, 1.0}};
		cplx damped = pi / cplx(eps, -1 / (2 * hbar));
		auto lhs = dh_lhs_numeric(plane, hbar);
		CHECK(rel(lhs.value, damped) < 1e-9);
		cplx one_term = dh_fixed_point_sum(plane, hbar);
		CHECK(rel(one_term, cplx(0, 2 * pi * hbar)) < 1e-14);
		double gap = rel(lhs.value, one_term);
		CHECK(gap < 3 * eps * hbar);
		CHECK(gap < previous);
		previous = gap;
	}
}

TEST_CASE("tubular series")
{
	for (unsigned m : {1u, 2u, 3u})
	{
		auto terms = tubular_series(m, 2 * int(m) + 3);
		REQUIRE(terms.size() == 2 * m + 4);
		for (const auto &t : terms)
		{
			INFO("m=" << m << " n=" << t.order);
			CHECK(t.coefficient == tubular_oracle(m, t.order));
			if (t.order < int(m))
			{
				CHECK(t.epsilon_power > 0);
				CHECK(t.limit.is_zero());
			}
			else if (t.order > int(m))
			{
				CHECK(t.coefficient.is_zero());
				CHECK(t.limit.is_zero());
			}
			else
			{
				CHECK(t.epsilon_power == 0);
				// (-2πiħ)^m: coefficient of ħ^m π^m is (-2i)^m.
				GaussRational closed(1);
				for (unsigned k = 0; k < m; ++k)
					closed *= GaussRational(0, -2);
				CHECK(t.limit == closed);
			}
		}
	}
	CHECK(tubular_series(1, 0).front().coefficient.is_zero());
	CHECK_THROWS_AS(tubular_series(0, 3), PreconditionError);
}

TEST_CASE("effective measure from the perturbed Koszul contraction")
{
	auto chart = DarbouxChart::from_coordinates({{"x", 0, "xd"}, {"y", 0, "yd"}, {"beta", 1, "betad"}});
	Polynomial S0 = parse(chart, "x^2/2");
	KoszulContraction k(S0, chart);

	auto one = effective_measure_series(S0, chart, k, 4);
	CHECK(one.terminated);
	CHECK(one.value == chart.constant(1));

	auto x2 = effective_measure_series(S0, chart, k, 1, parse(chart, "x^2"));
	CHECK(x2.terminated);
	CHECK(x2.projected == parse(chart, "i*hbar"));
	CHECK(x2.value == parse(chart, "i*hbar"));
	CHECK(x2.homotopy == parse(chart, "-x*xd"));
	CHECK(effective_measure_series(S0, chart, k, 4, parse(chart, "5")).value == chart.constant(5));

	// ι̃p̃f - f = h̃ δ_BV f + δ_BV h̃ f on random inputs, and agreement with the matrix perturbation lemma.
	auto based = k.matrix_form(4);
	Matrix delta =
	    operator_matrix(based.M, based.M, [&](const Polynomial &f) { return minus_i_hbar() * bv_laplacian(f, chart); });
	auto perturbed = perturb_contraction(based.maps, delta, 10);
	REQUIRE(perturbed.terminated);
	PolyGen gen(chart.signature(), 4, 3);
	for (int t = 0; t < 60; ++t)
	{
		Polynomial f = gen.homogeneous(gen.ghost_degree(), 5);
		auto em = effective_measure_series(S0, chart, k, 10, f);
		REQUIRE(em.terminated);
		Polynomial rhs = perturbed_homotopy(k, chart, delta_bv(S0, f, chart), 10) + delta_bv(S0, em.homotopy, chart);
		CHECK(em.value - f == rhs);
		auto col = based.M.coordinates(f);
		auto via_matrix = (perturbed.contraction.iota * perturbed.contraction.p).apply(col);
		CHECK(based.M.polynomial(via_matrix) == em.value);
	}

	// For S₀ = ½xᵀAx, p̃f is the Fresnel moment with covariance iħA⁻¹.
	auto two = DarbouxChart::from_coordinates({{"x", 0, "xd"}, {"y", 0, "yd"}});
	Polynomial S2 = parse(two, "x^2 + x*y - y^2/2");
	KoszulContraction k2(S2, two);
	std::vector<size_t> vars = {two.signature()->index_of("x"), two.signature()->index_of("y")};
	PolyGen gen2(two.signature(), 6, 8);
	for (int t = 0; t < 30; ++t)
	{
		Polynomial f = gen2.homogeneous(0, 6);
		auto em = effective_measure_series(S2, two, k2, 10, f);
		REQUIRE(em.projected.is_constant());
		CHECK(em.projected.constant_term() == integrate_even_exact(S2, f, vars, 1.0).moment);
	}
	CHECK_THROWS_AS(effective_measure_series(parse(chart, "x^2/2 + 3*xd*beta"), chart, k, 2), PreconditionError);
}
