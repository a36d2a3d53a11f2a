// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include "bvcalc/gauge_integration.hpp"
#include "bvcalc/hpt.hpp"
#include "bvcalc/localization.hpp"
#include "identity_suite.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace bvcalc;
using namespace testing_support;
using cplx = std::complex<double>;

namespace {

// Pinned tolerances and sizes.
constexpr size_t identity_inputs = 1000;
constexpr double identity_seconds = 60.0;
constexpr double dh_tolerance = 1e-8;
constexpr double dh_seconds = 10.0;
constexpr double gauge_tolerance = 1e-9;
constexpr unsigned anomaly_basis_degree = 6;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

struct Outcome
{
	bool pass = true;
	std::string detail;

	void require(bool ok, const std::string &what)
	{
		if (!ok && pass)
		{
			pass = false;
			detail = what;
		}
	}
};

Outcome identities()
{
	Outcome out;
	auto t0 = Clock::now();
	auto st = run_identity_suite(identity_inputs, 20240601u);
	double t = seconds_since(t0);
	out.require(st.inputs >= identity_inputs, "too few inputs");
	out.require(st.failures == 0, st.first_failure);
	out.require(t < identity_seconds, "runtime " + std::to_string(t) + " s");
	if (out.pass)
	{
		char buf[160];
		std::snprintf(buf, sizeof buf, "%zu inputs, %zu checks, all residuals zero, %.1f s", st.inputs, st.checks, t);
		out.detail = buf;
	}
	return out;
}

Matrix rows(const std::vector<std::vector<long>> &r)
{
	Matrix m(r.size(), r[0].size());
	for (size_t i = 0; i < r.size(); ++i)
		for (size_t j = 0; j < r[i].size(); ++j)
			m(i, j) = Scalar(r[i][j]);
	return m;
}

// Direct summation with A = Σ (δh)^n δ:
//   ι̃ = ι + hAι,  p̃ = p + pAh,  h̃ = h + hAh,  d̃_N = d_N + pAι.
Contraction direct_perturbation(const Contraction &c, const Matrix &delta)
{
	Matrix A = delta, term = delta;
	for (size_t n = 0; n < delta.rows() + 1; ++n)
	{
		term = delta * (c.h * term);
		if (term.is_zero())
			break;
		A += term;
	}
	return {c.d_M + delta, c.d_N + c.p * A * c.iota, c.p + c.p * A * c.h, c.iota + c.h * A * c.iota,
	        c.h + c.h * A * c.h};
}

Outcome perturbation_lemma()
{
	Outcome out;
	struct Case
	{
		std::string name;
		Contraction c;
		Matrix delta;
	};
	std::vector<Case> cases;
	cases.push_back({"three-dimensional complex",
	                 {rows({{0, 0, 0}, {0, 0, 0}, {0, 1, 0}}), Matrix(1, 1), rows({{1, 0, 0}}), rows({{1}, {0}, {0}}),
	                  rows({{0, 0, 0}, {0, 0, -1}, {0, 0, 0}})},
	                 rows({{0, 0, 0}, {0, 0, 0}, {1, 0, 0}})});
	auto koszul = [&](const std::string &name, const DarbouxChart &chart, const std::string &S0, unsigned degree) {
		KoszulContraction k(parse(chart, S0), chart);
		auto b = k.matrix_form(degree);
		Matrix delta = operator_matrix(b.M, b.M, [&](const Polynomial &f) { return minus_i_hbar() * bv_laplacian(f, chart); });
		cases.push_back({name, b.maps, delta});
	};
	auto small = DarbouxChart::from_coordinates({{"x", 0, "xd"}, {"y", 0, "yd"}, {"beta", 1, "betad"}});
	koszul("Koszul x^2/2", small, "x^2/2", 3);
	koszul("Koszul coupled Hessian", small, "x^2/2 + x*y - y^2/2", 3);
	koszul("Koszul open toy", open_toy_model().chart, "x^2/2", 2);
	koszul("Koszul so(3) quadratic", so3_model().chart, "(x1^2 + x2^2 + x3^2)/2", 2);
	koszul("Koszul affine", affine_model().chart, "z^2/2", 2);

	size_t checked = 0;
	for (const auto &cs : cases)
	{
		out.require(validate_contraction(cs.c).ok(), cs.name + ": contraction residual");
		auto r = perturb_contraction(cs.c, cs.delta, 64);
		out.require(r.terminated, cs.name + ": perturbation did not terminate");
		out.require(validate_contraction(r.contraction).ok(), cs.name + ": perturbed contraction residual");
		Contraction d = direct_perturbation(cs.c, cs.delta);
		out.require(r.contraction.iota == d.iota && r.contraction.p == d.p && r.contraction.h == d.h &&
		                r.contraction.d_N == d.d_N,
		            cs.name + ": series differs from direct summation");
		++checked;
	}
	if (out.pass)
		out.detail = std::to_string(checked) + " contractions, all residuals exactly zero, series match direct sums";
	return out;
}

Outcome closed_cme()
{
	Outcome out;
	for (auto [name, model] : {std::pair{"so(3)", so3_model()}, std::pair{"affine", affine_model()}})
	{
		out.require(check_symmetry(model.S0, model.sym, model.chart).ok(), std::string(name) + ": symmetry residual");
		Polynomial S = model.S0 + build_S1_closed(model.sym, model.chart);
		out.require(check_cme(S, model.chart).is_zero(), std::string(name) + ": {S,S} != 0");
	}
	if (out.pass)
		out.detail = "so(3) and affine: {S0 + S1, S0 + S1} = 0 exactly";
	return out;
}

Outcome open_cme()
{
	Outcome out;
	auto toy = open_toy_model();
	KoszulContraction k(toy.S0, toy.chart);
	auto result = solve_open_cme(toy.S0, build_S1(toy.sym, toy.chart), k, toy.chart);
	if (!std::holds_alternative<OpenCmeSolution>(result))
	{
		out.require(false, "open toy obstructed");
		return out;
	}
	auto sol = std::get<OpenCmeSolution>(result);
	out.require(sol.terms.size() >= 3 && !sol.terms[2].is_zero(), "S2 vanishes");
	out.require(check_cme(sol.S, toy.chart).is_zero(), "open toy: {S,S} != 0");
	std::string S2 = sol.terms.size() >= 3 ? sol.terms[2].to_string() : "";

	for (auto [model, quadratic] : {std::pair{so3_model(), "(x1^2 + x2^2 + x3^2)/2"}, std::pair{affine_model(), "z^2/2"}})
	{
		Polynomial S0 = parse(model.chart, quadratic);
		Polynomial S1 = build_S1_closed(model.sym, model.chart);
		KoszulContraction kc(S0, model.chart);
		auto r = solve_open_cme(S0, S1, kc, model.chart);
		if (!std::holds_alternative<OpenCmeSolution>(r))
		{
			out.require(false, "closed input obstructed");
			continue;
		}
		auto &s = std::get<OpenCmeSolution>(r);
		out.require(s.S == S0 + S1, "closed input: S != S0 + S1");
		for (const auto &T : s.T)
			out.require(T.is_zero(), "closed input: nonzero T_k");
	}
	if (out.pass)
		out.detail = "open toy S2 = " + S2 + ", {S,S} = 0; closed inputs give S0 + S1";
	return out;
}

Outcome duistermaat_heckman()
{
	Outcome out;
	auto s2 = SymplecticModel::sphere();
	auto t0 = Clock::now();
	double worst = 0.0;
	for (double h : {0.5, 1.0, 2.0})
	{
		cplx oracle = 4 * std::numbers::pi * h * std::sin(1 / h);
		cplx lhs = dh_lhs_numeric(s2, h).value;
		cplx rhs = dh_fixed_point_sum(s2, h);
		worst = std::max({worst, rel(lhs, rhs), rel(lhs, oracle), rel(rhs, oracle)});
	}
	double t = seconds_since(t0);
	char buf[160];
	std::snprintf(buf, sizeof buf, "max relative difference %.2e (tolerance %.0e), %.2f s", worst, dh_tolerance, t);
	out.require(worst < dh_tolerance, buf);
	out.require(t < dh_seconds, buf);
	out.detail = buf;
	return out;
}

Outcome tubular()
{
	Outcome out;
	for (unsigned m : {1u, 2u, 3u})
		for (const auto &term : tubular_series(m, 2 * int(m) + 2))
		{
			std::string where = "m=" + std::to_string(m) + " n=" + std::to_string(term.order);
			out.require(term.coefficient == tubular_oracle(m, term.order), where + ": coefficient");
			if (term.order != int(m))
				out.require(term.limit.is_zero(), where + ": nonzero limit");
			else
			{
				GaussRational closed(1);
				for (unsigned k = 0; k < m; ++k)
					closed *= GaussRational(0, -2);
				out.require(term.epsilon_power == 0 && term.limit == closed, where + ": not (-2 pi i hbar)^m");
			}
		}
	if (out.pass)
		out.detail = "m = 1, 2, 3: only n = m survives, equal to (-2 pi i hbar)^m";
	return out;
}

Outcome gauge_independence()
{
	Outcome out;
	auto toy = toy_gauge_model();
	double worst = 0.0, fresnel = 0.0;
	for (double h : {0.5, 1.0, 2.0})
		for (const char *obs : {"x^2", "x^4 + 2*x^2", "x^3 + x"})
		{
			Polynomial f = parse(toy.chart, obs);
			cplx ref = bv_expectation(f, toy.S, LagrangianSpec::from_fermion(toy.fermion(0)), toy.chart, h).value;
			for (long c : {1L, 2L})
			{
				cplx v = bv_expectation(f, toy.S, LagrangianSpec::from_fermion(toy.fermion(c)), toy.chart, h).value;
				worst = std::max(worst, std::abs(v - ref) / std::max(std::abs(ref), 1.0));
			}
			if (std::string(obs) == "x^2")
				fresnel = std::max(fresnel, rel(ref, cplx(0.0, h)));
		}
	char buf[160];
	std::snprintf(buf, sizeof buf, "max gauge spread %.2e, <x^2> vs i hbar %.2e (tolerance %.0e)", worst, fresnel,
	              gauge_tolerance);
	out.require(worst <= gauge_tolerance && fresnel <= gauge_tolerance, buf);
	out.detail = buf;
	return out;
}

Outcome anomaly()
{
	Outcome out;
	auto chart = DarbouxChart::from_coordinates({{"x", 0, "xd"}, {"y", 0, "yd"}, {"beta", 1, "betad"}});
	QmeOptions opts;
	opts.max_order = 2;
	opts.basis_degree = anomaly_basis_degree;
	auto volume = solve_qme_counterterms(parse(chart, "x^2/2 + yd*beta"), chart, opts);
	if (auto *q = std::get_if<QmeSolution>(&volume))
		for (const auto &t : q->counterterms)
			out.require(t.is_zero(), "volume-preserving model: nonzero counterterm");
	else
		out.require(false, "volume-preserving model obstructed");
	auto scaling = solve_qme_counterterms(parse(chart, "x^2/2 + yd*y*beta"), chart, opts);
	if (auto *o = std::get_if<ObstructionReport>(&scaling))
	{
		out.require(o->order == 1, "scaling obstruction at order " + std::to_string(o->order));
		out.require(o->representative == parse(chart, "-i*hbar*beta"),
		            "scaling representative " + o->representative.to_string());
	}
	else
		out.require(false, "scaling model: no obstruction found");
	if (out.pass)
		out.detail = "zero counterterms; scaling obstructed by -i*hbar*beta (basis degree <= " +
		             std::to_string(anomaly_basis_degree) + ")";
	return out;
}

} // namespace

int main()
{
	const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
	    {"algebraic identity suite", identities},
	    {"perturbation lemma", perturbation_lemma},
	    {"closed-symmetry master equation", closed_cme},
	    {"open-symmetry solver", open_cme},
	    {"Duistermaat-Heckman on the sphere", duistermaat_heckman},
	    {"tubular series", tubular},
	    {"gauge independence", gauge_independence},
	    {"anomaly detection", anomaly},
	};
	int failed = 0;
	for (size_t i = 0; i < criteria.size(); ++i)
	{
		Outcome o;
		try
		{
			o = criteria[i].second();
		}
		catch (const std::exception &e)
		{
			o.pass = false;
			o.detail = std::string("exception: ") + e.what();
		}
		failed += !o.pass;
		std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
		std::fflush(stdout);
	}
	return failed;
}
