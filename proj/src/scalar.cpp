#include "bvcalc/scalar.hpp"

#include <cmath>
#include <stdexcept>

namespace bvcalc {

GaussRational::GaussRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im))
{
	re_.canonicalize();
	im_.canonicalize();
}

GaussRational GaussRational::inverse() const
{
	if (is_zero())
		throw std::domain_error("division by zero Gaussian rational");
	mpq_class norm = re_ * re_ + im_ * im_;
	return {re_ / norm, -im_ / norm};
}

GaussRational &GaussRational::operator+=(const GaussRational &o)
{
	re_ += o.re_;
	im_ += o.im_;
	return *this;
}

GaussRational &GaussRational::operator-=(const GaussRational &o)
{
	re_ -= o.re_;
	im_ -= o.im_;
	return *this;
}

GaussRational &GaussRational::operator*=(const GaussRational &o)
{
	if (sgn(im_) == 0 && sgn(o.im_) == 0)
	{
		re_ *= o.re_;
		return *this;
	}
	mpq_class re = re_ * o.re_ - im_ * o.im_;
	mpq_class im = re_ * o.im_ + im_ * o.re_;
	re_ = std::move(re);
	im_ = std::move(im);
	return *this;
}

GaussRational &GaussRational::operator/=(const GaussRational &o)
{
	if (o.is_real())
	{
		if (sgn(o.re_) == 0)
			throw std::domain_error("division by zero Gaussian rational");
		re_ /= o.re_;
		im_ /= o.re_;
		return *this;
	}
	return *this *= o.inverse();
}

namespace {

std::string imag_text(const mpq_class &im)
{
	if (im == 1)
		return "i";
	if (im == -1)
		return "-i";
	return im.get_str() + "*i";
}

} // namespace

std::string GaussRational::to_string() const
{
	if (sgn(im_) == 0)
		return re_.get_str();
	if (sgn(re_) == 0)
		return imag_text(im_);
	std::string out = "(" + re_.get_str();
	if (sgn(im_) > 0)
		out += "+";
	out += imag_text(im_) + ")";
	return out;
}

Scalar::Scalar(long value)
{
	if (value != 0)
		terms_.emplace(0, GaussRational(value));
}

Scalar::Scalar(const GaussRational &value, int hbar_power)
{
	if (!value.is_zero())
		terms_.emplace(hbar_power, value);
}

bool Scalar::is_one() const
{
	return terms_.size() == 1 && terms_.begin()->first == 0 && terms_.begin()->second.is_one();
}

bool Scalar::is_hbar_free() const
{
	return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0);
}

GaussRational Scalar::coefficient(int hbar_power) const
{
	auto it = terms_.find(hbar_power);
	return it == terms_.end() ? GaussRational() : it->second;
}

int Scalar::min_hbar_power() const
{
	return terms_.empty() ? 0 : terms_.begin()->first;
}

int Scalar::max_hbar_power() const
{
	return terms_.empty() ? 0 : terms_.rbegin()->first;
}

Scalar Scalar::inverse() const
{
	if (terms_.size() != 1)
		throw std::domain_error("scalar " + to_string() + " is not invertible (not a single hbar power)");
	auto [power, c] = *terms_.begin();
	return Scalar(c.inverse(), -power);
}

std::complex<double> Scalar::evaluate(double hbar_value) const
{
	std::complex<double> sum = 0.0;
	for (const auto &[power, c] : terms_)
		sum += c.to_complex() * std::pow(hbar_value, power);
	return sum;
}

Scalar &Scalar::operator+=(const Scalar &o)
{
	for (const auto &[power, c] : o.terms_)
	{
		auto [it, inserted] = terms_.emplace(power, c);
		if (!inserted)
		{
			it->second += c;
			if (it->second.is_zero())
				terms_.erase(it);
		}
	}
	return *this;
}

Scalar &Scalar::operator-=(const Scalar &o)
{
	return *this += -o;
}

Scalar operator*(const Scalar &a, const Scalar &b)
{
	Scalar out;
	if (a.terms_.empty() || b.terms_.empty())
		return out;
	for (const auto &[pa, ca] : a.terms_)
		for (const auto &[pb, cb] : b.terms_)
			out += Scalar(ca * cb, pa + pb);
	return out;
}

Scalar &Scalar::operator*=(const Scalar &o)
{
	*this = *this * o;
	return *this;
}

Scalar Scalar::operator-() const
{
	Scalar out = *this;
	for (auto &[power, c] : out.terms_)
		c = -c;
	return out;
}

bool Scalar::needs_parentheses() const
{
	if (terms_.size() > 1)
		return true;
	return false;
}

std::string Scalar::to_string() const
{
	if (terms_.empty())
		return "0";
	std::string out;
	bool first = true;
	for (const auto &[power, c] : terms_)
	{
		std::string coeff = c.to_string();
		std::string piece;
		if (power == 0)
			piece = coeff;
		else
		{
			std::string h = power == 1 ? "hbar" : "hbar^" + std::to_string(power);
			if (c.is_one())
				piece = h;
			else if (c == GaussRational(-1))
				piece = "-" + h;
			else
				piece = coeff + "*" + h;
		}
		if (!first)
		{
			if (piece.front() == '-')
				out += " - " + piece.substr(1);
			else
				out += " + " + piece;
		}
		else
			out += piece;
		first = false;
	}
	return out;
}

} // namespace bvcalc
