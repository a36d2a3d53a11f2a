#pragma once

#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "bvcalc/polynomial.hpp"

namespace bvcalc {

/// Dense row-major matrix over Scalar.
class Matrix
{
public:
	Matrix() = default;
	Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

	static Matrix identity(size_t n);

	size_t rows() const { return rows_; }
	size_t cols() const { return cols_; }
	Scalar &operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
	const Scalar &operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

	bool is_zero() const;
	/// Largest entry modulus with hbar evaluated at the given value.
	double max_abs(double hbar_value = 1.0) const;
	size_t nonzeros() const;

	Matrix &operator+=(const Matrix &o);
	Matrix &operator-=(const Matrix &o);
	friend Matrix operator+(Matrix a, const Matrix &b) { return a += b; }
	friend Matrix operator-(Matrix a, const Matrix &b) { return a -= b; }
	friend Matrix operator*(const Matrix &a, const Matrix &b);
	friend Matrix operator*(const Scalar &c, Matrix a);
	friend bool operator==(const Matrix &a, const Matrix &b)
	{
		return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
	}

	std::vector<Scalar> apply(const std::vector<Scalar> &v) const;

private:
	void require_shape(const Matrix &o, const char *op) const;

	size_t rows_ = 0;
	size_t cols_ = 0;
	std::vector<Scalar> data_;
};

using SparseVector = std::map<size_t, GaussRational>;

/**
 * Exact reduced row echelon form over the Gaussian rationals. Pivots are
 * chosen in column order, taking the first available row, so results are
 * deterministic. Free variables are set to zero in particular solutions.
 */
class ExactSolver
{
public:
	/// columns[j] is the j-th column of a matrix with `rows` rows.
	ExactSolver(std::vector<SparseVector> columns, size_t rows);

	size_t rank() const { return pivots_.size(); }
	size_t unknowns() const { return columns_.size(); }
	/// A solution x of A x = b, or nullopt if b is not in the column span.
	std::optional<std::vector<GaussRational>> solve(const SparseVector &b) const;
	/// Basis of the null space, one vector per free column in increasing order.
	std::vector<std::vector<GaussRational>> kernel_basis() const;

private:
	using Row = std::map<size_t, GaussRational>;
	/// Row-reduces `rows` in place; returns pivot columns (restricted to columns < limit).
	static std::vector<std::pair<size_t, size_t>> reduce(std::vector<Row> &rows, size_t limit);

	std::vector<SparseVector> columns_;
	size_t nrows_;
	std::vector<Row> reduced_;
	std::vector<std::pair<size_t, size_t>> pivots_; // (column, row)
};

/// Finite ordered set of monomials with index lookup.
class PolynomialBasis
{
public:
	PolynomialBasis() = default;
	PolynomialBasis(SignaturePtr sig, std::vector<Monomial> monomials);

	/// All monomials of total degree <= max_degree (optionally of one ghost degree), graded-lex ordered.
	static PolynomialBasis truncated(SignaturePtr sig, unsigned max_degree, std::optional<int> ghost = std::nullopt);

	const SignaturePtr &signature() const { return sig_; }
	size_t size() const { return monomials_.size(); }
	const Monomial &operator[](size_t i) const { return monomials_[i]; }
	const std::vector<Monomial> &monomials() const { return monomials_; }
	std::optional<size_t> index_of(const Monomial &m) const;
	bool contains(const Polynomial &f) const;

	/// Coordinates of f; throws PreconditionError if f leaves the basis.
	std::vector<Scalar> coordinates(const Polynomial &f) const;
	/// Coordinates of an hbar-free polynomial as a sparse vector.
	SparseVector sparse_coordinates(const Polynomial &f) const;
	Polynomial polynomial(const std::vector<Scalar> &coords) const;
	Polynomial polynomial(const std::vector<GaussRational> &coords) const;
	Polynomial element(size_t i) const;

private:
	SignaturePtr sig_;
	std::vector<Monomial> monomials_;
	std::map<Monomial, size_t> index_;
};

/// Matrix of a linear map between polynomial bases (columns = images of domain elements).
Matrix operator_matrix(const PolynomialBasis &domain, const PolynomialBasis &codomain,
                       const std::function<Polynomial(const Polynomial &)> &op);

} // namespace bvcalc
