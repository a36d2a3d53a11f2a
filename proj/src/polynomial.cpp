#include "bvcalc/polynomial.hpp"

#include <algorithm>

namespace bvcalc {

Signature::Signature(std::vector<Generator> generators) : generators_(std::move(generators))
{
	for (size_t i = 0; i < generators_.size(); ++i)
	{
		if (generators_[i].name.empty())
			throw std::invalid_argument("generator with empty name");
		if (!index_.emplace(generators_[i].name, i).second)
			throw std::invalid_argument("duplicate generator name '" + generators_[i].name + "'");
	}
}

std::optional<size_t> Signature::find(const std::string &name) const
{
	auto it = index_.find(name);
	if (it == index_.end())
		return std::nullopt;
	return it->second;
}

size_t Signature::index_of(const std::string &name) const
{
	auto idx = find(name);
	if (!idx)
		throw SignatureMismatch("unknown generator '" + name + "'");
	return *idx;
}

SignaturePtr make_signature(std::vector<Generator> generators)
{
	return std::make_shared<const Signature>(std::move(generators));
}

Monomial::Monomial(std::vector<uint16_t> exps) : exps_(std::move(exps))
{
	for (auto e : exps_)
		degree_ += e;
}

void Monomial::set(size_t i, uint16_t e)
{
	degree_ = degree_ - exps_[i] + e;
	exps_[i] = e;
}

int Monomial::ghost_degree(const Signature &sig) const
{
	int d = 0;
	for (size_t i = 0; i < exps_.size(); ++i)
		d += sig[i].ghost_degree * exps_[i];
	return d;
}

bool Monomial::odd(const Signature &sig) const
{
	bool p = false;
	for (size_t i = 0; i < exps_.size(); ++i)
		if (exps_[i] && sig[i].odd())
			p = !p;
	return p;
}

int multiply_monomials(const Signature &sig, const Monomial &a, const Monomial &b, Monomial &out)
{
	const size_t n = sig.size();
	std::vector<uint16_t> exps(n);
	// Moving each odd factor of b leftwards past the odd factors of a with larger index.
	unsigned odd_a_after = 0;
	unsigned swaps = 0;
	for (size_t k = n; k-- > 0;)
	{
		exps[k] = a[k] + b[k];
		if (!sig[k].odd())
			continue;
		if (a[k] && b[k])
			return 0;
		if (b[k])
			swaps += odd_a_after;
		if (a[k])
			++odd_a_after;
	}
	out = Monomial(std::move(exps));
	return (swaps % 2) ? -1 : 1;
}

void require_same_signature(const SignaturePtr &a, const SignaturePtr &b)
{
	if (a == b)
		return;
	if (!a || !b || !(*a == *b))
		throw SignatureMismatch("polynomials over different signatures");
}

void require_same_signature(const Polynomial &a, const Polynomial &b)
{
	require_same_signature(a.signature(), b.signature());
}

Polynomial::Polynomial(SignaturePtr sig, const Scalar &constant) : sig_(std::move(sig))
{
	if (!constant.is_zero())
		terms_.emplace(Monomial(sig_->size()), constant);
}

Polynomial Polynomial::generator(SignaturePtr sig, size_t index)
{
	if (index >= sig->size())
		throw SignatureMismatch("generator index out of range");
	Monomial m(sig->size());
	m.set(index, 1);
	return term(std::move(sig), std::move(m), Scalar(1));
}

Polynomial Polynomial::generator(SignaturePtr sig, const std::string &name)
{
	size_t idx = sig->index_of(name);
	return generator(std::move(sig), idx);
}

Polynomial Polynomial::term(SignaturePtr sig, Monomial m, Scalar c)
{
	Polynomial p(std::move(sig));
	if (m.size() != p.sig_->size())
		throw SignatureMismatch("monomial length does not match signature");
	for (size_t i = 0; i < m.size(); ++i)
		if ((*p.sig_)[i].odd() && m[i] > 1)
			return p;
	p.add_term(m, c);
	return p;
}

Scalar Polynomial::coefficient(const Monomial &m) const
{
	auto it = terms_.find(m);
	return it == terms_.end() ? Scalar() : it->second;
}

Scalar Polynomial::constant_term() const
{
	if (terms_.empty() || !terms_.begin()->first.is_one())
		return Scalar();
	return terms_.begin()->second;
}

bool Polynomial::is_constant() const
{
	return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

std::optional<int> Polynomial::ghost_degree() const
{
	if (terms_.empty())
		return 0;
	std::optional<int> d;
	for (const auto &[m, c] : terms_)
	{
		int dm = m.ghost_degree(*sig_);
		if (d && *d != dm)
			return std::nullopt;
		d = dm;
	}
	return d;
}

bool Polynomial::has_ghost_degree(int d) const
{
	for (const auto &[m, c] : terms_)
		if (m.ghost_degree(*sig_) != d)
			return false;
	return true;
}

std::optional<bool> Polynomial::parity() const
{
	std::optional<bool> p;
	for (const auto &[m, c] : terms_)
	{
		bool pm = m.odd(*sig_);
		if (p && *p != pm)
			return std::nullopt;
		p = pm;
	}
	return p.value_or(false);
}

unsigned Polynomial::max_total_degree() const
{
	unsigned d = 0;
	for (const auto &[m, c] : terms_)
		d = std::max(d, m.total_degree());
	return d;
}

int Polynomial::min_hbar_power() const
{
	bool first = true;
	int k = 0;
	for (const auto &[m, c] : terms_)
	{
		k = first ? c.min_hbar_power() : std::min(k, c.min_hbar_power());
		first = false;
	}
	return k;
}

int Polynomial::max_hbar_power() const
{
	bool first = true;
	int k = 0;
	for (const auto &[m, c] : terms_)
	{
		k = first ? c.max_hbar_power() : std::max(k, c.max_hbar_power());
		first = false;
	}
	return k;
}

Polynomial Polynomial::filter(const std::function<bool(const Monomial &, const Scalar &)> &pred) const
{
	Polynomial out(sig_);
	for (const auto &[m, c] : terms_)
		if (pred(m, c))
			out.terms_.emplace_hint(out.terms_.end(), m, c);
	return out;
}

Polynomial Polynomial::ghost_component(int d) const
{
	return filter([&](const Monomial &m, const Scalar &) { return m.ghost_degree(*sig_) == d; });
}

Polynomial Polynomial::hbar_coefficient(int k) const
{
	Polynomial out(sig_);
	for (const auto &[m, c] : terms_)
	{
		GaussRational g = c.coefficient(k);
		if (!g.is_zero())
			out.terms_.emplace_hint(out.terms_.end(), m, Scalar(g));
	}
	return out;
}

Polynomial Polynomial::truncate_hbar(int k) const
{
	Polynomial out(sig_);
	for (const auto &[m, c] : terms_)
	{
		Scalar kept;
		for (const auto &[power, g] : c.terms())
			if (power <= k)
				kept += Scalar(g, power);
		if (!kept.is_zero())
			out.terms_.emplace_hint(out.terms_.end(), m, kept);
	}
	return out;
}

Polynomial Polynomial::truncate_degree(unsigned n) const
{
	return filter([&](const Monomial &m, const Scalar &) { return m.total_degree() <= n; });
}

void Polynomial::add_term(const Monomial &m, const Scalar &c)
{
	if (c.is_zero())
		return;
	auto [it, inserted] = terms_.emplace(m, c);
	if (!inserted)
	{
		it->second += c;
		if (it->second.is_zero())
			terms_.erase(it);
	}
}

Polynomial &Polynomial::operator+=(const Polynomial &o)
{
	if (o.terms_.empty())
		return *this;
	if (!sig_)
		sig_ = o.sig_;
	require_same_signature(*this, o);
	for (const auto &[m, c] : o.terms_)
		add_term(m, c);
	return *this;
}

Polynomial &Polynomial::operator-=(const Polynomial &o)
{
	if (o.terms_.empty())
		return *this;
	if (!sig_)
		sig_ = o.sig_;
	require_same_signature(*this, o);
	for (const auto &[m, c] : o.terms_)
		add_term(m, -c);
	return *this;
}

Polynomial &Polynomial::operator*=(const Scalar &c)
{
	if (c.is_zero())
	{
		terms_.clear();
		return *this;
	}
	for (auto &[m, coeff] : terms_)
		coeff = coeff * c;
	return *this;
}

Polynomial &Polynomial::operator*=(const Polynomial &o)
{
	*this = *this * o;
	return *this;
}

Polynomial operator*(const Polynomial &a, const Polynomial &b)
{
	if (a.terms_.empty() || b.terms_.empty())
		return Polynomial(a.sig_ ? a.sig_ : b.sig_);
	require_same_signature(a, b);
	Polynomial out(a.sig_);
	Monomial m;
	for (const auto &[ma, ca] : a.terms_)
		for (const auto &[mb, cb] : b.terms_)
		{
			int sign = multiply_monomials(*a.sig_, ma, mb, m);
			if (sign == 0)
				continue;
			Scalar c = ca * cb;
			out.add_term(m, sign > 0 ? c : -c);
		}
	return out;
}

Polynomial Polynomial::operator-() const
{
	Polynomial out = *this;
	for (auto &[m, c] : out.terms_)
		c = -c;
	return out;
}

bool operator==(const Polynomial &a, const Polynomial &b)
{
	if (a.terms_.empty() && b.terms_.empty())
		return true;
	if (a.sig_ != b.sig_ && (!a.sig_ || !b.sig_ || !(*a.sig_ == *b.sig_)))
		return false;
	return a.terms_ == b.terms_;
}

std::string monomial_string(const Signature &sig, const Monomial &m)
{
	std::string out;
	for (size_t i = 0; i < m.size(); ++i)
	{
		if (!m[i])
			continue;
		if (!out.empty())
			out += "*";
		out += sig[i].name;
		if (m[i] > 1)
			out += "^" + std::to_string(m[i]);
	}
	return out;
}

std::string Polynomial::to_string() const
{
	if (terms_.empty())
		return "0";
	std::string out;
	// Highest degree first reads more naturally.
	for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
	{
		const auto &[m, c] = *it;
		std::string piece;
		std::string mono = monomial_string(*sig_, m);
		if (mono.empty())
			piece = c.needs_parentheses() ? "(" + c.to_string() + ")" : c.to_string();
		else if (c.is_one())
			piece = mono;
		else if (c == Scalar(-1))
			piece = "-" + mono;
		else if (c.needs_parentheses())
			piece = "(" + c.to_string() + ")*" + mono;
		else
			piece = c.to_string() + "*" + mono;
		if (out.empty())
			out = piece;
		else if (piece.front() == '-')
			out += " - " + piece.substr(1);
		else
			out += " + " + piece;
	}
	return out;
}

Polynomial pow(const Polynomial &f, unsigned n)
{
	Polynomial result(f.signature(), Scalar(1));
	Polynomial base = f;
	while (n)
	{
		if (n & 1)
			result = result * base;
		n >>= 1;
		if (n)
			base = base * base;
	}
	return result;
}

Polynomial derive(const Polynomial &f, size_t index, Side side)
{
	const auto &sig = f.signature();
	Polynomial out(sig);
	if (f.is_zero())
		return out;
	if (index >= sig->size())
		throw SignatureMismatch("derivative with respect to unknown generator");
	const bool odd = (*sig)[index].odd();
	for (const auto &[m, c] : f.terms())
	{
		uint16_t e = m[index];
		if (!e)
			continue;
		Monomial dm = m;
		dm.set(index, e - 1);
		if (!odd)
		{
			out.add_term(dm, c * Scalar(static_cast<long>(e)));
			continue;
		}
		unsigned passed = 0;
		if (side == Side::left)
		{
			for (size_t k = 0; k < index; ++k)
				if (m[k] && (*sig)[k].odd())
					++passed;
		}
		else
		{
			for (size_t k = index + 1; k < m.size(); ++k)
				if (m[k] && (*sig)[k].odd())
					++passed;
		}
		out.add_term(dm, passed % 2 ? -c : c);
	}
	return out;
}

Polynomial derive(const Polynomial &f, const std::string &name, Side side)
{
	if (!f.signature())
		return f;
	return derive(f, f.signature()->index_of(name), side);
}

Polynomial substitute(const Polynomial &f, const std::map<size_t, Polynomial> &bindings)
{
	const auto &sig = f.signature();
	if (!sig)
		return f;
	for (const auto &[idx, value] : bindings)
	{
		if (idx >= sig->size())
			throw SignatureMismatch("binding for unknown generator");
		if (!value.is_zero())
			require_same_signature(sig, value.signature());
		const Generator &g = (*sig)[idx];
		if (!value.has_ghost_degree(g.ghost_degree))
			throw DegreeMismatch("binding for '" + g.name + "' has ghost degree " +
			                     (value.ghost_degree() ? std::to_string(*value.ghost_degree()) : "inhomogeneous") +
			                     ", expected " + std::to_string(g.ghost_degree));
	}

	// Cache powers of bound generators.
	std::map<std::pair<size_t, uint16_t>, Polynomial> powers;
	auto power_of = [&](size_t idx, uint16_t e) -> const Polynomial & {
		auto key = std::make_pair(idx, e);
		auto it = powers.find(key);
		if (it != powers.end())
			return it->second;
		return powers.emplace(key, pow(bindings.at(idx), e)).first->second;
	};

	Polynomial out(sig);
	for (const auto &[m, c] : f.terms())
	{
		// Bound factors are replaced in canonical order, unbound factors are kept in place.
		Polynomial acc(sig, c);
		Monomial kept(sig->size());
		bool kept_pending = false;
		auto flush = [&]() {
			if (kept_pending)
			{
				acc = acc * Polynomial::term(sig, kept, Scalar(1));
				kept = Monomial(sig->size());
				kept_pending = false;
			}
		};
		for (size_t k = 0; k < m.size() && !acc.is_zero(); ++k)
		{
			if (!m[k])
				continue;
			if (bindings.count(k))
			{
				flush();
				acc = acc * power_of(k, m[k]);
			}
			else
			{
				kept.set(k, m[k]);
				kept_pending = true;
			}
		}
		flush();
		out += acc;
	}
	return out;
}

Polynomial substitute(const Polynomial &f, const std::map<std::string, Polynomial> &bindings)
{
	std::map<size_t, Polynomial> by_index;
	if (!f.signature())
		return f;
	for (const auto &[name, value] : bindings)
		by_index.emplace(f.signature()->index_of(name), value);
	return substitute(f, by_index);
}

} // namespace bvcalc
