#include "bvcalc/hpt.hpp"

#include <map>

namespace bvcalc {

namespace {

void require_shape(const Matrix &m, size_t rows, size_t cols, const char *name)
{
	if (m.rows() != rows || m.cols() != cols)
		throw std::invalid_argument(std::string("contraction map ") + name + " has shape " + std::to_string(m.rows()) +
		                            "x" + std::to_string(m.cols()) + ", expected " + std::to_string(rows) + "x" +
		                            std::to_string(cols));
}

Polynomial sum(const std::vector<Polynomial> &terms, const DarbouxChart &chart)
{
	Polynomial s = chart.zero();
	for (const auto &t : terms)
		s += t;
	return s;
}

Scalar factorial(int k)
{
	long f = 1;
	for (int i = 2; i <= k; ++i)
		f *= i;
	return Scalar(f);
}

} // namespace

ContractionReport validate_contraction(const Contraction &c)
{
	const size_t m = c.d_M.rows(), n = c.d_N.rows();
	require_shape(c.d_M, m, m, "d_M");
	require_shape(c.d_N, n, n, "d_N");
	require_shape(c.p, n, m, "p");
	require_shape(c.iota, m, n, "iota");
	require_shape(c.h, m, m, "h");
	ContractionReport report;
	auto add = [&](const char *axiom, Matrix value) {
		if (!value.is_zero())
			report.residuals.push_back({axiom, std::move(value)});
	};
	add("d_M^2", c.d_M * c.d_M);
	add("d_N^2", c.d_N * c.d_N);
	add("p d_M - d_N p", c.p * c.d_M - c.d_N * c.p);
	add("d_M iota - iota d_N", c.d_M * c.iota - c.iota * c.d_N);
	add("p iota - id", c.p * c.iota - Matrix::identity(n));
	add("iota p - id - (h d_M + d_M h)", c.iota * c.p - Matrix::identity(m) - (c.h * c.d_M + c.d_M * c.h));
	add("h^2", c.h * c.h);
	add("h iota", c.h * c.iota);
	add("p h", c.p * c.h);
	return report;
}

PerturbedContraction perturb_contraction(const Contraction &c, const Matrix &delta, int order)
{
	const size_t m = c.d_M.rows();
	require_shape(delta, m, m, "delta");
	Matrix D = c.d_M + delta;
	if (!(D * D).is_zero())
		throw PreconditionError("perturbed differential (d_M + delta) does not square to zero");

	Matrix A = c.h * delta;
	Matrix power = Matrix::identity(m);
	Matrix series(m, m);
	PerturbedContraction out;
	int n = 0;
	for (; n <= order; ++n)
	{
		series += power;
		power = power * A;
		if (power.is_zero())
		{
			out.terminated = true;
			++n;
			break;
		}
	}
	out.terms = n;
	if (!out.terminated)
		out.truncation_residual = power.max_abs(1.0);

	Contraction &r = out.contraction;
	r.d_M = D;
	r.iota = series * c.iota;
	r.h = series * c.h;
	r.p = c.p + c.p * delta * r.h;
	r.d_N = c.d_N + c.p * delta * r.iota;
	return out;
}

KoszulContraction::KoszulContraction(const Polynomial &S0, const DarbouxChart &chart) : chart_(chart), S0_(S0)
{
	chart_.require(S0);
	const auto &sig = *chart_.signature();
	koszul_.assign(sig.size(), false);
	if (S0.is_zero())
		S0_ = chart_.zero();
	for (const auto &[m, c] : S0.terms())
	{
		if (!c.is_hbar_free())
			throw PreconditionError("S0 must not depend on hbar");
		for (size_t k = 0; k < m.size(); ++k)
			if (m[k] && !koszul_[k])
			{
				if (chart_.is_anti(k) || sig[k].ghost_degree != 0)
					throw PreconditionError("S0 may only depend on even coordinates of ghost degree 0, found '" +
					                        sig[k].name + "'");
				koszul_[k] = true;
			}
	}
	for (size_t k = 0; k < sig.size(); ++k)
		if (koszul_[k])
			vars_.push_back(k);

	const size_t n = vars_.size();
	std::vector<std::vector<GaussRational>> A(n, std::vector<GaussRational>(n));
	Polynomial quadratic(chart_.signature(), S0.constant_term());
	for (size_t i = 0; i < n; ++i)
		for (size_t j = 0; j < n; ++j)
		{
			Polynomial second = derive(derive(S0, vars_[i]), vars_[j]);
			if (!second.is_constant())
				throw PreconditionError("S0 is not quadratic; the Koszul contraction needs S0 = c + x^T A x / 2 "
				                        "(supply a contraction for general shells)");
			A[i][j] = second.constant_term().constant_term();
			quadratic += Scalar::rational(1, 2) * Scalar(A[i][j]) *
			             (Polynomial::generator(chart_.signature(), vars_[i]) *
			              Polynomial::generator(chart_.signature(), vars_[j]));
		}
	if (quadratic != S0)
		throw PreconditionError("S0 has linear terms; its critical point must sit at the origin");

	std::vector<SparseVector> columns(n);
	for (size_t j = 0; j < n; ++j)
		for (size_t i = 0; i < n; ++i)
			if (!A[i][j].is_zero())
				columns[j][i] = A[i][j];
	ExactSolver solver(columns, n);
	if (solver.rank() != n)
		throw PreconditionError("degenerate Hessian of S0");
	inverse_.assign(n, std::vector<GaussRational>(n));
	for (size_t k = 0; k < n; ++k)
	{
		auto col = solver.solve({{k, GaussRational(1)}});
		for (size_t i = 0; i < n; ++i)
			inverse_[i][k] = (*col)[i];
	}
}

Polynomial KoszulContraction::differential(const Polynomial &f) const
{
	return poisson_bracket(S0_, f, chart_);
}

Polynomial KoszulContraction::project(const Polynomial &f) const
{
	chart_.require(f);
	return f.filter([&](const Monomial &m, const Scalar &) {
		for (size_t k : vars_)
			if (m[k] || m[chart_.partner(k)])
				return false;
		return true;
	});
}

Polynomial KoszulContraction::homotopy(const Polynomial &f) const
{
	chart_.require(f);
	const auto &sig = chart_.signature();
	std::map<unsigned, Polynomial> by_weight;
	for (const auto &[m, c] : f.terms())
	{
		unsigned w = 0;
		for (size_t k : vars_)
			w += m[k] + m[chart_.partner(k)];
		if (w == 0)
			continue;
		auto it = by_weight.try_emplace(w, Polynomial(sig)).first;
		it->second.add_term(m, c);
	}
	Polynomial out(sig);
	for (const auto &[w, part] : by_weight)
	{
		Polynomial acc(sig);
		for (size_t j = 0; j < vars_.size(); ++j)
		{
			Polynomial dj = derive(part, vars_[j]);
			if (dj.is_zero())
				continue;
			for (size_t i = 0; i < vars_.size(); ++i)
				if (!inverse_[i][j].is_zero())
					acc += Scalar(inverse_[i][j]) * (Polynomial::generator(sig, chart_.partner(vars_[i])) * dj);
		}
		out -= Scalar(GaussRational(mpq_class(1, w))) * acc;
	}
	return out;
}

PolynomialBasis KoszulContraction::cohomology_basis(unsigned max_degree, std::optional<int> ghost) const
{
	auto all = PolynomialBasis::truncated(chart_.signature(), max_degree, ghost);
	std::vector<Monomial> kept;
	for (const auto &m : all.monomials())
	{
		bool spectator = true;
		for (size_t k : vars_)
			if (m[k] || m[chart_.partner(k)])
				spectator = false;
		if (spectator)
			kept.push_back(m);
	}
	return PolynomialBasis(chart_.signature(), std::move(kept));
}

BasedContraction KoszulContraction::matrix_form(unsigned max_degree) const
{
	BasedContraction out{{}, PolynomialBasis::truncated(chart_.signature(), max_degree), cohomology_basis(max_degree)};
	auto d = [&](const Polynomial &f) { return differential(f); };
	out.maps.d_M = operator_matrix(out.M, out.M, d);
	out.maps.d_N = operator_matrix(out.N, out.N, [&](const Polynomial &g) { return project(differential(include(g))); });
	out.maps.p = operator_matrix(out.M, out.N, [&](const Polynomial &f) { return project(f); });
	out.maps.iota = operator_matrix(out.N, out.M, [&](const Polynomial &g) { return include(g); });
	out.maps.h = operator_matrix(out.M, out.M, [&](const Polynomial &f) { return homotopy(f); });
	return out;
}

BasedContraction koszul_contraction(const Polynomial &S0, const DarbouxChart &chart, unsigned max_degree)
{
	return KoszulContraction(S0, chart).matrix_form(max_degree);
}

namespace {

Polynomial apply_matrix(const Matrix &m, const PolynomialBasis &from, const PolynomialBasis &to, const Polynomial &f)
{
	return to.polynomial(m.apply(from.coordinates(f)));
}

} // namespace

Polynomial MatrixFunctionContraction::differential(const Polynomial &f) const
{
	return apply_matrix(c_.maps.d_M, c_.M, c_.M, f);
}

Polynomial MatrixFunctionContraction::project(const Polynomial &f) const
{
	return apply_matrix(c_.maps.p, c_.M, c_.N, f);
}

Polynomial MatrixFunctionContraction::include(const Polynomial &g) const
{
	return apply_matrix(c_.maps.iota, c_.N, c_.M, g);
}

Polynomial MatrixFunctionContraction::homotopy(const Polynomial &f) const
{
	return apply_matrix(c_.maps.h, c_.M, c_.M, f);
}

PolynomialBasis MatrixFunctionContraction::cohomology_basis(unsigned max_degree, std::optional<int> ghost) const
{
	std::vector<Monomial> kept;
	for (const auto &m : c_.N.monomials())
		if (m.total_degree() <= max_degree && (!ghost || m.ghost_degree(*c_.N.signature()) == *ghost))
			kept.push_back(m);
	return PolynomialBasis(c_.N.signature(), std::move(kept));
}

Polynomial brst_apply(const FunctionContraction &c, const Polynomial &S1, const Polynomial &g, const DarbouxChart &chart)
{
	return c.project(poisson_bracket(S1, c.include(g), chart));
}

Matrix brst_operator(const FunctionContraction &c, const Polynomial &S1, const DarbouxChart &chart,
                     const PolynomialBasis &domain, const PolynomialBasis &codomain)
{
	return operator_matrix(domain, codomain, [&](const Polynomial &g) { return brst_apply(c, S1, g, chart); });
}

namespace {

/// Columns of a linear map on a basis, with codomain monomials indexed on demand.
struct LinearProblem
{
	std::vector<SparseVector> columns;
	std::map<Monomial, size_t> rows;

	size_t row(const Monomial &m)
	{
		auto [it, inserted] = rows.emplace(m, rows.size());
		return it->second;
	}

	SparseVector vectorize(const Polynomial &f)
	{
		SparseVector v;
		for (const auto &[m, c] : f.terms())
		{
			if (!c.is_hbar_free())
				throw PreconditionError("linear solve needs hbar-free polynomials");
			v[row(m)] = c.constant_term();
		}
		return v;
	}

	void add_column(const Polynomial &image) { columns.push_back(vectorize(image)); }

	std::optional<std::vector<GaussRational>> solve(const Polynomial &rhs)
	{
		SparseVector b = vectorize(rhs);
		ExactSolver solver(columns, rows.size());
		return solver.solve(b);
	}
};

} // namespace

std::variant<OpenCmeSolution, ObstructionReport> solve_open_cme(const Polynomial &S0, const Polynomial &S1,
                                                                const FunctionContraction &c, const DarbouxChart &chart,
                                                                const OpenCmeOptions &options)
{
	chart.require(S0);
	chart.require(S1);
	if (!S1.has_ghost_degree(0))
		throw PreconditionError("S1 must have ghost degree 0");
	Polynomial closed = c.differential(S1);
	if (!closed.is_zero())
		throw PreconditionError("delta_0 S1 != 0, residual: " + closed.to_string());
	if (options.strict_side_condition)
	{
		Polynomial hs = c.homotopy(S1);
		if (!hs.is_zero())
			throw PreconditionError("side condition h(S1) = 0 violated, h(S1) = " + hs.to_string());
	}
	Polynomial T2 = poisson_bracket(S1, S1, chart);
	Polynomial pT2 = c.project(T2);
	if (!pT2.is_zero())
		throw PreconditionError("{S1,S1} is not delta_0-exact, p{S1,S1} = " + pT2.to_string());

	OpenCmeSolution sol;
	sol.terms = {S0, S1};
	sol.T = {chart.zero(), chart.zero()};
	auto term = [&](size_t i) -> const Polynomial & { return sol.terms[i]; };
	auto compute_T = [&](int k) {
		Polynomial acc = chart.zero();
		for (int i = 1; i < k; ++i)
		{
			size_t j = static_cast<size_t>(k - i);
			if (static_cast<size_t>(i) < sol.terms.size() && j < sol.terms.size() && !term(i).is_zero() &&
			    !term(j).is_zero())
				acc += poisson_bracket(term(i), term(j), chart);
		}
		return factorial(k) * Scalar::rational(1, 2) * acc;
	};

	int last = 1;
	for (int k = 2;; ++k)
	{
		if (k > 2 * last)
			break;
		if (k > options.max_order)
			throw PreconditionError("open master equation series did not terminate by order " +
			                        std::to_string(options.max_order) +
			                        "; residual {S,S} at cutoff: " + check_cme(sum(sol.terms, chart), chart).to_string());
		Polynomial Tk = compute_T(k);
		Polynomial pTk = c.project(Tk);
		if (!pTk.is_zero())
		{
			if (k < 3)
				throw PreconditionError("p(T_2) != 0");
			// Adjust S_{k-1} by a delta_0-closed term iota(g), with k!·p{S1, iota g} = -p(T_k).
			auto basis = c.cohomology_basis(options.basis_degree, 0);
			LinearProblem problem;
			for (size_t j = 0; j < basis.size(); ++j)
				problem.add_column(factorial(k) * brst_apply(c, S1, basis.element(j), chart));
			auto x = problem.solve(-pTk);
			if (!x)
			{
				ObstructionReport rep;
				rep.order = k;
				rep.representative = pTk;
				rep.description = "p(T_" + std::to_string(k) +
				                  ") is not in the image of the BRST operator on the truncated cohomology basis";
				return rep;
			}
			sol.terms[static_cast<size_t>(k - 1)] += c.include(basis.polynomial(*x));
			sol.adjusted_orders.push_back(k);
			Tk = compute_T(k);
			if (!c.project(Tk).is_zero())
				throw PreconditionError("internal: adjustment did not remove p(T_k)");
		}
		Polynomial Sk = c.homotopy(Tk);
		Sk *= factorial(k).inverse();
		sol.T.push_back(Tk);
		sol.terms.push_back(Sk);
		if (!Sk.is_zero())
			last = k;
	}
	while (sol.terms.size() > 2 && sol.terms.back().is_zero())
		sol.terms.pop_back();
	sol.S = sum(sol.terms, chart);
	Polynomial residual = check_cme(sol.S, chart);
	if (!residual.is_zero())
		throw PreconditionError("solved action fails the classical master equation, residual: " + residual.to_string());
	return sol;
}

std::variant<QmeSolution, ObstructionReport> solve_qme_counterterms(const Polynomial &S_tilde,
                                                                   const DarbouxChart &chart,
                                                                   const QmeOptions &options)
{
	chart.require(S_tilde);
	Polynomial cme = check_cme(S_tilde, chart);
	if (!cme.is_zero())
		throw PreconditionError("classical master equation fails for the input action, {S,S} = " + cme.to_string());

	const Scalar ih = Scalar::imag_unit() * Scalar::hbar();
	auto basis = PolynomialBasis::truncated(chart.signature(), options.basis_degree, 0);
	LinearProblem problem;
	for (size_t j = 0; j < basis.size(); ++j)
		problem.add_column(poisson_bracket(S_tilde, basis.element(j), chart));

	std::vector<Polynomial> T = {S_tilde};
	QmeSolution sol;
	for (int n = 1; n <= options.max_order; ++n)
	{
		Polynomial rhs = bv_laplacian(T[static_cast<size_t>(n - 1)], chart);
		Polynomial quad = chart.zero();
		for (int a = 1; a < n; ++a)
			quad += poisson_bracket(T[static_cast<size_t>(a)], T[static_cast<size_t>(n - a)], chart);
		rhs -= Scalar::rational(1, 2) * quad;
		Polynomial Tn = chart.zero();
		if (!rhs.is_zero())
		{
			auto x = problem.solve(rhs);
			if (!x)
			{
				ObstructionReport rep;
				rep.order = n;
				Scalar power(1);
				for (int k = 0; k < n; ++k)
					power *= ih;
				rep.representative = power * (-rhs);
				rep.description = "no ghost-degree-0 polynomial of degree <= " + std::to_string(options.basis_degree) +
				                  " solves {S,T_" + std::to_string(n) + "} = " + rhs.to_string();
				return rep;
			}
			Tn = basis.polynomial(*x);
		}
		T.push_back(Tn);
		sol.counterterms.push_back(Tn);
	}
	sol.S = S_tilde;
	Scalar power(1);
	for (const auto &Tn : sol.counterterms)
	{
		power *= ih;
		sol.S += power * Tn;
	}
	Polynomial qme = check_qme(sol.S, chart);
	sol.exact = qme.is_zero();
	if (!qme.truncate_hbar(options.max_order).is_zero())
		throw PreconditionError("internal: counterterms do not solve the quantum master equation to the requested order");
	return sol;
}

} // namespace bvcalc
