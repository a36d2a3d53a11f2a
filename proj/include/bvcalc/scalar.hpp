#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>

#include <gmpxx.h>

namespace bvcalc {

/// Exact complex number a + b·i with a, b rational.
class GaussRational
{
public:
	GaussRational() = default;
	GaussRational(long value) : re_(value) {}
	GaussRational(mpq_class re, mpq_class im = 0);

	static GaussRational imag_unit() { return {0, 1}; }

	const mpq_class &real() const { return re_; }
	const mpq_class &imag() const { return im_; }

	bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
	bool is_real() const { return sgn(im_) == 0; }
	bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

	GaussRational conj() const { return {re_, -im_}; }
	GaussRational inverse() const;
	std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

	GaussRational &operator+=(const GaussRational &o);
	GaussRational &operator-=(const GaussRational &o);
	GaussRational &operator*=(const GaussRational &o);
	GaussRational &operator/=(const GaussRational &o);

	friend GaussRational operator+(GaussRational a, const GaussRational &b) { return a += b; }
	friend GaussRational operator-(GaussRational a, const GaussRational &b) { return a -= b; }
	friend GaussRational operator*(GaussRational a, const GaussRational &b) { return a *= b; }
	friend GaussRational operator/(GaussRational a, const GaussRational &b) { return a /= b; }
	GaussRational operator-() const { return {-re_, -im_}; }

	friend bool operator==(const GaussRational &a, const GaussRational &b)
	{
		return a.re_ == b.re_ && a.im_ == b.im_;
	}
	friend bool operator!=(const GaussRational &a, const GaussRational &b) { return !(a == b); }

	/// Canonical text form: `3/2`, `-i`, `(1/2+3*i)`. Parenthesized iff both parts are nonzero.
	std::string to_string() const;

private:
	mpq_class re_;
	mpq_class im_;
};

/**
 * Coefficient ring of the symbolic layer: Gaussian rationals extended by a
 * central formal variable hbar with finitely many integer powers.
 *
 * Stored as a map hbar-power -> nonzero coefficient.
 */
class Scalar
{
public:
	Scalar() = default;
	Scalar(long value);
	Scalar(const GaussRational &value, int hbar_power = 0);

	static Scalar hbar(int power = 1) { return Scalar(GaussRational(1), power); }
	static Scalar imag_unit() { return Scalar(GaussRational::imag_unit()); }
	static Scalar rational(long num, long den) { return Scalar(GaussRational(mpq_class(num, den))); }

	bool is_zero() const { return terms_.empty(); }
	bool is_one() const;
	/// True iff no hbar dependence (possibly zero).
	bool is_hbar_free() const;
	/// Coefficient of hbar^0.
	GaussRational constant_term() const { return coefficient(0); }
	GaussRational coefficient(int hbar_power) const;
	/// Single term c·hbar^k with c != 0.
	bool is_monomial() const { return terms_.size() == 1; }
	int min_hbar_power() const;
	int max_hbar_power() const;
	const std::map<int, GaussRational> &terms() const { return terms_; }

	/// Only single-term scalars are invertible.
	Scalar inverse() const;
	std::complex<double> evaluate(double hbar_value) const;

	Scalar &operator+=(const Scalar &o);
	Scalar &operator-=(const Scalar &o);
	Scalar &operator*=(const Scalar &o);

	friend Scalar operator+(Scalar a, const Scalar &b) { return a += b; }
	friend Scalar operator-(Scalar a, const Scalar &b) { return a -= b; }
	friend Scalar operator*(const Scalar &a, const Scalar &b);
	Scalar operator-() const;

	friend bool operator==(const Scalar &a, const Scalar &b) { return a.terms_ == b.terms_; }
	friend bool operator!=(const Scalar &a, const Scalar &b) { return !(a == b); }

	/// Canonical text form parseable by the expression grammar.
	std::string to_string() const;
	/// True if to_string() is a sum that needs parentheses when used as a factor.
	bool needs_parentheses() const;

private:
	std::map<int, GaussRational> terms_;
};

} // namespace bvcalc
