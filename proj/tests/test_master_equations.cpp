#include <doctest.h>

#include "models.hpp"
#include "random_poly.hpp"

using namespace bvcalc;
using namespace testing_support;

namespace {

/// Oracle for closure: compare operators X_a X_b - X_b X_a and T^c_{ab} X_c on probe functions.
bool closes_as_operators(const GaugeModel &m, const std::vector<Polynomial> &probes)
{
	const size_t g = m.sym.ghosts.size();
	auto X = [&](size_t a, const Polynomial &f) { return apply_symmetry(m.sym, a, f, m.chart); };
	for (const auto &f : probes)
		for (size_t a = 0; a < g; ++a)
			for (size_t b = 0; b < g; ++b)
			{
				Polynomial lhs = X(a, X(b, f)) - X(b, X(a, f));
				Polynomial rhs = m.chart.zero();
				for (size_t c = 0; c < g; ++c)
					rhs += m.sym.T[a][b][c] * X(c, f);
				if (lhs != rhs)
					return false;
			}
	return true;
}

} // namespace

TEST_CASE("symmetry checks")
{
	auto shift = shift_model();
	CHECK(check_symmetry(shift.S0, shift.sym, shift.chart).ok());

	auto so3 = so3_model();
	CHECK(check_symmetry(so3.S0, so3.sym, so3.chart).ok());
	std::vector<Polynomial> probes = {parse(so3.chart, "x1"), parse(so3.chart, "x2^2*x3"),
	                                  parse(so3.chart, "x1*x2*x3 + x3^3")};
	CHECK(closes_as_operators(so3, probes));

	// Wrong structure constant: T^3_{12} = 2 instead of 1.
	auto bad = so3;
	bad.sym.T[0][1][2] = bad.chart.constant(2);
	bad.sym.T[1][0][2] = bad.chart.constant(-2);
	CHECK_FALSE(closes_as_operators(bad, probes));
	auto report = check_symmetry(bad.S0, bad.sym, bad.chart);
	REQUIRE(report.residuals.size() == 2);
	// Residual is [X1,X2] - 2 X3 = -X3, with X3 = x2 ∂_1 - x1 ∂_2.
	CHECK(report.residuals[0].label == "[X1,X2]^x1");
	CHECK(report.residuals[0].value == parse(bad.chart, "-x2"));
	CHECK(report.residuals[1].value == parse(bad.chart, "x1"));

	auto affine = affine_model();
	CHECK(check_symmetry(affine.S0, affine.sym, affine.chart).ok());
	CHECK(closes_as_operators(affine, {parse(affine.chart, "x^2*y"), parse(affine.chart, "y^3 + x")}));

	auto open = open_toy_model();
	CHECK(check_symmetry(open.S0, open.sym, open.chart).ok());
	auto closed_attempt = open;
	closed_attempt.sym.E.clear();
	CHECK_FALSE(check_symmetry(closed_attempt.S0, closed_attempt.sym, closed_attempt.chart).ok());

	auto not_invariant = shift;
	not_invariant.S0 = parse(shift.chart, "x^2/2 + y");
	auto r = check_symmetry(not_invariant.S0, not_invariant.sym, not_invariant.chart);
	REQUIRE(r.residuals.size() == 1);
	CHECK(r.residuals[0].value == shift.chart.constant(1));
}

TEST_CASE("symmetry shape errors")
{
	auto m = so3_model();
	auto bad = m;
	bad.sym.rho.pop_back();
	CHECK_THROWS_AS(check_symmetry(m.S0, bad.sym, m.chart), PreconditionError);
	bad = m;
	bad.sym.T[0][1][2] = m.chart.constant(5);
	CHECK_THROWS_AS(check_symmetry(m.S0, bad.sym, m.chart), PreconditionError);
	CHECK_THROWS_AS(check_symmetry(parse(m.chart, "x1*b1"), m.sym, m.chart), PreconditionError);
}

TEST_CASE("closed S1 construction")
{
	auto shift = shift_model();
	CHECK(build_S1_closed(shift.sym, shift.chart) == parse(shift.chart, "yd*beta"));

	auto two = DarbouxChart::from_coordinates(
	    {{"x", 0, "xd"}, {"y", 0, "yd"}, {"z", 0, "zd"}, {"b1", 1, "b1d"}, {"b2", 1, "b2d"}});
	SymmetryData sym;
	sym.base = {"x", "y", "z"};
	sym.ghosts = {"b1", "b2"};
	sym.rho = {{two.zero(), two.constant(1), two.zero()}, {two.zero(), two.zero(), two.constant(1)}};
	sym.T = zero_T(two, 2);
	CHECK(build_S1_closed(sym, two) == parse(two, "yd*b1 + zd*b2"));

	auto so3 = so3_model();
	Polynomial S1 = build_S1_closed(so3.sym, so3.chart);
	Polynomial expected = so3.chart.zero();
	for (int i = 1; i <= 3; ++i)
		for (int j = 1; j <= 3; ++j)
			for (int k = 1; k <= 3; ++k)
			{
				int e = levi_civita(i, j, k);
				if (!e)
					continue;
				auto v = [&](const std::string &n, int a) { return so3.chart.var(n + std::to_string(a)); };
				expected += Scalar(e) * (so3.chart.var("x" + std::to_string(i) + "d") * v("x", j) * v("b", k));
				expected -= Scalar::rational(e, 2) * (so3.chart.var("b" + std::to_string(k) + "d") * v("b", i) * v("b", j));
			}
	CHECK(S1 == expected);
	CHECK(S1.ghost_degree() == 0);
	CHECK(check_cme(so3.S0 + S1, so3.chart).is_zero());
	CHECK(check_qme(so3.S0 + S1, so3.chart).is_zero());

	auto affine = affine_model();
	CHECK(check_cme(affine.S0 + build_S1_closed(affine.sym, affine.chart), affine.chart).is_zero());

	// Without the ½ the master equation fails.
	Polynomial doubled = S1 + (S1 - linear_S1(so3));
	CHECK_FALSE(check_cme(so3.S0 + doubled, so3.chart).is_zero());

	CHECK_THROWS_AS(build_S1_closed(open_toy_model().sym, open_toy_model().chart), PreconditionError);
}

TEST_CASE("master equation examples")
{
	auto shift = shift_model();
	auto &chart = shift.chart;
	CHECK(check_cme(parse(chart, "x^2/2 + yd*beta"), chart).is_zero());
	CHECK(check_qme(parse(chart, "x^2/2 + yd*beta"), chart).is_zero());
	// β†β is odd of ghost degree -1, so its cross terms with y†β cancel by graded antisymmetry.
	Polynomial odd_term = parse(chart, "3*betad*beta");
	CHECK(poisson_bracket(odd_term, parse(chart, "yd*beta"), chart) ==
	      -poisson_bracket(parse(chart, "yd*beta"), odd_term, chart));
	CHECK(check_cme(parse(chart, "x^2/2 + yd*beta") + odd_term, chart).is_zero());
	// A degree-0 term that does not preserve S0: {S,S} = 2{x^2/2, 3x†β} = 6xβ.
	Polynomial S = parse(chart, "x^2/2 + yd*beta + 3*xd*beta");
	CHECK(check_cme(S, chart) == parse(chart, "6*x*beta"));

	Polynomial scaling = parse(chart, "x^2/2 + yd*y*beta");
	CHECK(check_cme(scaling, chart).is_zero());
	// Δ(y† y β) = ∂_y ∂_{y†}(y† y β) = β.
	CHECK(bv_laplacian(scaling, chart) == parse(chart, "beta"));
	CHECK(check_qme(scaling, chart) == parse(chart, "-i*hbar*beta"));
}

TEST_CASE("delta_bv")
{
	auto shift = shift_model();
	auto &chart = shift.chart;
	Polynomial S = parse(chart, "x^2/2 + yd*beta");
	CHECK(delta_bv(S, chart.constant(1), chart).is_zero());
	CHECK(delta_bv(S, parse(chart, "x^2"), chart).is_zero());

	auto so3 = so3_model();
	Polynomial S3 = so3.S0 + build_S1_closed(so3.sym, so3.chart);
	PolyGen gen(so3.chart.signature(), 3, 4242u);
	for (int n = 0; n < 60; ++n)
	{
		Polynomial f = gen.homogeneous();
		REQUIRE(delta_bv(S3, delta_bv(S3, f, so3.chart), so3.chart).is_zero());
	}
	// Invariant functions are annihilated by {S0 + S1, ·}.
	for (const char *inv : {"x1^2 + x2^2 + x3^2", "(x1^2 + x2^2 + x3^2)^2 - 3"})
		CHECK(poisson_bracket(S3, parse(so3.chart, inv), so3.chart).is_zero());
	CHECK_FALSE(poisson_bracket(S3, parse(so3.chart, "x1"), so3.chart).is_zero());
}
