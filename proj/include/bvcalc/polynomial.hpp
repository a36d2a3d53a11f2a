#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bvcalc/errors.hpp"
#include "bvcalc/scalar.hpp"

namespace bvcalc {

struct Generator
{
	std::string name;
	int ghost_degree = 0;

	bool odd() const { return (ghost_degree % 2) != 0; }
	friend bool operator==(const Generator &, const Generator &) = default;
};

/// Ordered, name-unique list of generators. Declaration order is the canonical factor order.
class Signature
{
public:
	explicit Signature(std::vector<Generator> generators);

	size_t size() const { return generators_.size(); }
	const Generator &operator[](size_t i) const { return generators_[i]; }
	const std::vector<Generator> &generators() const { return generators_; }

	std::optional<size_t> find(const std::string &name) const;
	/// Throws SignatureMismatch if unknown.
	size_t index_of(const std::string &name) const;

	friend bool operator==(const Signature &a, const Signature &b) { return a.generators_ == b.generators_; }

private:
	std::vector<Generator> generators_;
	std::map<std::string, size_t> index_;
};

using SignaturePtr = std::shared_ptr<const Signature>;

SignaturePtr make_signature(std::vector<Generator> generators);

/// Dense exponent vector over a signature. Odd generators carry exponent 0 or 1.
class Monomial
{
public:
	Monomial() = default;
	explicit Monomial(size_t n) : exps_(n, 0) {}
	explicit Monomial(std::vector<uint16_t> exps);

	size_t size() const { return exps_.size(); }
	uint16_t operator[](size_t i) const { return exps_[i]; }
	void set(size_t i, uint16_t e);
	unsigned total_degree() const { return degree_; }
	bool is_one() const { return degree_ == 0; }
	const std::vector<uint16_t> &exponents() const { return exps_; }

	int ghost_degree(const Signature &sig) const;
	/// Parity of the number of odd factors.
	bool odd(const Signature &sig) const;

	/// Graded-lex order: total degree first, then exponent vector lexicographically.
	friend bool operator<(const Monomial &a, const Monomial &b)
	{
		if (a.degree_ != b.degree_)
			return a.degree_ < b.degree_;
		return a.exps_ < b.exps_;
	}
	friend bool operator==(const Monomial &a, const Monomial &b) { return a.exps_ == b.exps_; }

private:
	std::vector<uint16_t> exps_;
	unsigned degree_ = 0;
};

/**
 * Product of two canonical monomials. Returns the Koszul sign (+1/-1) of
 * bringing the concatenation a·b into canonical order, or 0 if an odd
 * generator repeats.
 */
int multiply_monomials(const Signature &sig, const Monomial &a, const Monomial &b, Monomial &out);

enum class Side
{
	left,
	right
};

/**
 * Element of the free graded-commutative algebra over a signature with
 * Scalar coefficients. Zero coefficients are never stored.
 */
class Polynomial
{
public:
	using TermMap = std::map<Monomial, Scalar>;

	Polynomial() = default;
	explicit Polynomial(SignaturePtr sig) : sig_(std::move(sig)) {}
	Polynomial(SignaturePtr sig, const Scalar &constant);

	static Polynomial generator(SignaturePtr sig, size_t index);
	static Polynomial generator(SignaturePtr sig, const std::string &name);
	static Polynomial term(SignaturePtr sig, Monomial m, Scalar c);

	const SignaturePtr &signature() const { return sig_; }
	const TermMap &terms() const { return terms_; }
	bool is_zero() const { return terms_.empty(); }
	size_t size() const { return terms_.size(); }
	Scalar coefficient(const Monomial &m) const;
	/// Coefficient of the unit monomial.
	Scalar constant_term() const;
	bool is_constant() const;

	/// Common ghost degree, or nullopt if inhomogeneous. The zero polynomial reports 0.
	std::optional<int> ghost_degree() const;
	/// True if zero or homogeneous of ghost degree d.
	bool has_ghost_degree(int d) const;
	/// Parity if homogeneous in parity; nullopt for mixed parity.
	std::optional<bool> parity() const;
	unsigned max_total_degree() const;
	int min_hbar_power() const;
	int max_hbar_power() const;

	/// Restrict to terms satisfying pred.
	Polynomial filter(const std::function<bool(const Monomial &, const Scalar &)> &pred) const;
	/// Component of ghost degree d.
	Polynomial ghost_component(int d) const;
	/// Coefficient polynomial of hbar^k (hbar-free).
	Polynomial hbar_coefficient(int k) const;
	/// Drop all hbar powers above k.
	Polynomial truncate_hbar(int k) const;
	/// Drop monomials of total degree above n.
	Polynomial truncate_degree(unsigned n) const;

	Polynomial &operator+=(const Polynomial &o);
	Polynomial &operator-=(const Polynomial &o);
	Polynomial &operator*=(const Scalar &c);
	Polynomial &operator*=(const Polynomial &o);
	void add_term(const Monomial &m, const Scalar &c);

	friend Polynomial operator+(Polynomial a, const Polynomial &b) { return a += b; }
	friend Polynomial operator-(Polynomial a, const Polynomial &b) { return a -= b; }
	friend Polynomial operator*(const Polynomial &a, const Polynomial &b);
	friend Polynomial operator*(Polynomial a, const Scalar &c) { return a *= c; }
	friend Polynomial operator*(const Scalar &c, Polynomial a) { return a *= c; }
	Polynomial operator-() const;

	friend bool operator==(const Polynomial &a, const Polynomial &b);
	friend bool operator!=(const Polynomial &a, const Polynomial &b) { return !(a == b); }

	/// Canonical string; re-parses to the same polynomial.
	std::string to_string() const;

private:
	SignaturePtr sig_;
	TermMap terms_;
};

Polynomial pow(const Polynomial &f, unsigned n);

/// Left or right partial derivative with respect to generator `index`.
Polynomial derive(const Polynomial &f, size_t index, Side side = Side::left);
Polynomial derive(const Polynomial &f, const std::string &name, Side side = Side::left);

/**
 * Algebra homomorphism fixing the signature: generator k -> bindings[k].
 * Unbound generators map to themselves. Each binding must be zero or
 * homogeneous of the generator's ghost degree.
 */
Polynomial substitute(const Polynomial &f, const std::map<size_t, Polynomial> &bindings);
Polynomial substitute(const Polynomial &f, const std::map<std::string, Polynomial> &bindings);

/// Throws SignatureMismatch unless a and b share a signature.
void require_same_signature(const Polynomial &a, const Polynomial &b);
void require_same_signature(const SignaturePtr &a, const SignaturePtr &b);

/// Text of a single monomial, e.g. `x^2*beta`. Empty for the unit monomial.
std::string monomial_string(const Signature &sig, const Monomial &m);

} // namespace bvcalc
