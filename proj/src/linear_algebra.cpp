#include "bvcalc/linear_algebra.hpp"

#include <algorithm>
#include <cmath>

namespace bvcalc {

Matrix Matrix::identity(size_t n)
{
	Matrix m(n, n);
	for (size_t i = 0; i < n; ++i)
		m(i, i) = Scalar(1);
	return m;
}

bool Matrix::is_zero() const
{
	return std::all_of(data_.begin(), data_.end(), [](const Scalar &s) { return s.is_zero(); });
}

double Matrix::max_abs(double hbar_value) const
{
	double m = 0.0;
	for (const auto &s : data_)
		if (!s.is_zero())
			m = std::max(m, std::abs(s.evaluate(hbar_value)));
	return m;
}

size_t Matrix::nonzeros() const
{
	return static_cast<size_t>(std::count_if(data_.begin(), data_.end(), [](const Scalar &s) { return !s.is_zero(); }));
}

void Matrix::require_shape(const Matrix &o, const char *op) const
{
	if (rows_ != o.rows_ || cols_ != o.cols_)
		throw std::invalid_argument(std::string("matrix shape mismatch in ") + op);
}

Matrix &Matrix::operator+=(const Matrix &o)
{
	require_shape(o, "+");
	for (size_t i = 0; i < data_.size(); ++i)
		if (!o.data_[i].is_zero())
			data_[i] += o.data_[i];
	return *this;
}

Matrix &Matrix::operator-=(const Matrix &o)
{
	require_shape(o, "-");
	for (size_t i = 0; i < data_.size(); ++i)
		if (!o.data_[i].is_zero())
			data_[i] -= o.data_[i];
	return *this;
}

Matrix operator*(const Matrix &a, const Matrix &b)
{
	if (a.cols_ != b.rows_)
		throw std::invalid_argument("matrix shape mismatch in *");
	Matrix out(a.rows_, b.cols_);
	for (size_t i = 0; i < a.rows_; ++i)
		for (size_t k = 0; k < a.cols_; ++k)
		{
			const Scalar &aik = a(i, k);
			if (aik.is_zero())
				continue;
			for (size_t j = 0; j < b.cols_; ++j)
			{
				const Scalar &bkj = b(k, j);
				if (!bkj.is_zero())
					out(i, j) += aik * bkj;
			}
		}
	return out;
}

Matrix operator*(const Scalar &c, Matrix a)
{
	for (auto &s : a.data_)
		if (!s.is_zero())
			s = c * s;
	return a;
}

std::vector<Scalar> Matrix::apply(const std::vector<Scalar> &v) const
{
	if (v.size() != cols_)
		throw std::invalid_argument("vector length mismatch");
	std::vector<Scalar> out(rows_);
	for (size_t i = 0; i < rows_; ++i)
		for (size_t j = 0; j < cols_; ++j)
			if (!(*this)(i, j).is_zero() && !v[j].is_zero())
				out[i] += (*this)(i, j) * v[j];
	return out;
}

ExactSolver::ExactSolver(std::vector<SparseVector> columns, size_t rows) : columns_(std::move(columns)), nrows_(rows)
{
	reduced_.assign(nrows_, Row{});
	for (size_t j = 0; j < columns_.size(); ++j)
		for (const auto &[i, v] : columns_[j])
		{
			if (i >= nrows_)
				throw std::invalid_argument("sparse column entry out of range");
			if (!v.is_zero())
				reduced_[i][j] = v;
		}
	pivots_ = reduce(reduced_, columns_.size());
}

std::vector<std::pair<size_t, size_t>> ExactSolver::reduce(std::vector<Row> &rows, size_t limit)
{
	std::vector<std::pair<size_t, size_t>> pivots;
	std::vector<bool> used(rows.size(), false);
	// Candidate columns in increasing order.
	std::map<size_t, bool> cols;
	for (const auto &r : rows)
		for (const auto &[c, v] : r)
			if (c < limit)
				cols[c] = true;
	for (const auto &[col, unused] : cols)
	{
		size_t pr = rows.size();
		for (size_t r = 0; r < rows.size(); ++r)
			if (!used[r] && rows[r].count(col))
			{
				pr = r;
				break;
			}
		if (pr == rows.size())
			continue;
		used[pr] = true;
		GaussRational inv = rows[pr][col].inverse();
		for (auto &[c, v] : rows[pr])
			v *= inv;
		const Row pivot_row = rows[pr];
		for (size_t r = 0; r < rows.size(); ++r)
		{
			if (r == pr)
				continue;
			auto it = rows[r].find(col);
			if (it == rows[r].end())
				continue;
			GaussRational factor = it->second;
			for (const auto &[c, v] : pivot_row)
			{
				auto [slot, inserted] = rows[r].emplace(c, GaussRational());
				slot->second -= factor * v;
				if (slot->second.is_zero())
					rows[r].erase(slot);
			}
		}
		pivots.emplace_back(col, pr);
	}
	return pivots;
}

std::optional<std::vector<GaussRational>> ExactSolver::solve(const SparseVector &b) const
{
	// Apply the same elimination to the augmented column.
	const size_t aug = columns_.size();
	std::vector<Row> rows(nrows_);
	for (size_t j = 0; j < columns_.size(); ++j)
		for (const auto &[i, v] : columns_[j])
			if (!v.is_zero())
				rows[i][j] = v;
	for (const auto &[i, v] : b)
	{
		if (i >= nrows_)
			throw std::invalid_argument("right-hand side entry out of range");
		if (!v.is_zero())
			rows[i][aug] = v;
	}
	auto pivots = reduce(rows, aug);
	std::vector<bool> pivot_row(nrows_, false);
	for (const auto &[c, r] : pivots)
		pivot_row[r] = true;
	for (size_t r = 0; r < nrows_; ++r)
		if (!pivot_row[r] && rows[r].count(aug))
			return std::nullopt;
	std::vector<GaussRational> x(columns_.size());
	for (const auto &[c, r] : pivots)
	{
		auto it = rows[r].find(aug);
		if (it != rows[r].end())
			x[c] = it->second;
	}
	return x;
}

std::vector<std::vector<GaussRational>> ExactSolver::kernel_basis() const
{
	std::vector<bool> is_pivot(columns_.size(), false);
	for (const auto &[c, r] : pivots_)
		is_pivot[c] = true;
	std::vector<std::vector<GaussRational>> basis;
	for (size_t f = 0; f < columns_.size(); ++f)
	{
		if (is_pivot[f])
			continue;
		std::vector<GaussRational> v(columns_.size());
		v[f] = GaussRational(1);
		for (const auto &[c, r] : pivots_)
		{
			auto it = reduced_[r].find(f);
			if (it != reduced_[r].end())
				v[c] = -it->second;
		}
		basis.push_back(std::move(v));
	}
	return basis;
}

PolynomialBasis::PolynomialBasis(SignaturePtr sig, std::vector<Monomial> monomials)
    : sig_(std::move(sig)), monomials_(std::move(monomials))
{
	for (size_t i = 0; i < monomials_.size(); ++i)
		if (!index_.emplace(monomials_[i], i).second)
			throw std::invalid_argument("duplicate monomial in basis");
}

PolynomialBasis PolynomialBasis::truncated(SignaturePtr sig, unsigned max_degree, std::optional<int> ghost)
{
	std::vector<Monomial> out;
	Monomial m(sig->size());
	auto rec = [&](auto &&self, size_t k, unsigned left) -> void {
		if (k == sig->size())
		{
			if (!ghost || m.ghost_degree(*sig) == *ghost)
				out.push_back(m);
			return;
		}
		unsigned cap = (*sig)[k].odd() ? std::min(1u, left) : left;
		for (unsigned e = 0; e <= cap; ++e)
		{
			m.set(k, static_cast<uint16_t>(e));
			self(self, k + 1, left - e);
		}
		m.set(k, 0);
	};
	rec(rec, 0, max_degree);
	std::sort(out.begin(), out.end());
	return PolynomialBasis(std::move(sig), std::move(out));
}

std::optional<size_t> PolynomialBasis::index_of(const Monomial &m) const
{
	auto it = index_.find(m);
	if (it == index_.end())
		return std::nullopt;
	return it->second;
}

bool PolynomialBasis::contains(const Polynomial &f) const
{
	for (const auto &[m, c] : f.terms())
		if (!index_.count(m))
			return false;
	return true;
}

std::vector<Scalar> PolynomialBasis::coordinates(const Polynomial &f) const
{
	std::vector<Scalar> out(monomials_.size());
	for (const auto &[m, c] : f.terms())
	{
		auto idx = index_of(m);
		if (!idx)
			throw PreconditionError("term " + monomial_string(*sig_, m) + " lies outside the truncated basis");
		out[*idx] = c;
	}
	return out;
}

SparseVector PolynomialBasis::sparse_coordinates(const Polynomial &f) const
{
	SparseVector out;
	for (const auto &[m, c] : f.terms())
	{
		auto idx = index_of(m);
		if (!idx)
			throw PreconditionError("term " + monomial_string(*sig_, m) + " lies outside the truncated basis");
		if (!c.is_hbar_free())
			throw PreconditionError("exact solve needs hbar-free coefficients");
		out[*idx] = c.constant_term();
	}
	return out;
}

Polynomial PolynomialBasis::polynomial(const std::vector<Scalar> &coords) const
{
	Polynomial p(sig_);
	for (size_t i = 0; i < coords.size() && i < monomials_.size(); ++i)
		p.add_term(monomials_[i], coords[i]);
	return p;
}

Polynomial PolynomialBasis::polynomial(const std::vector<GaussRational> &coords) const
{
	Polynomial p(sig_);
	for (size_t i = 0; i < coords.size() && i < monomials_.size(); ++i)
		p.add_term(monomials_[i], Scalar(coords[i]));
	return p;
}

Polynomial PolynomialBasis::element(size_t i) const
{
	return Polynomial::term(sig_, monomials_.at(i), Scalar(1));
}

Matrix operator_matrix(const PolynomialBasis &domain, const PolynomialBasis &codomain,
                       const std::function<Polynomial(const Polynomial &)> &op)
{
	Matrix m(codomain.size(), domain.size());
	for (size_t j = 0; j < domain.size(); ++j)
	{
		auto col = codomain.coordinates(op(domain.element(j)));
		for (size_t i = 0; i < col.size(); ++i)
			m(i, j) = col[i];
	}
	return m;
}

} // namespace bvcalc
