#include "bvcalc/parser.hpp"

#include <cctype>

namespace bvcalc {

namespace {

enum class Tok
{
	integer,
	ident,
	plus,
	minus,
	star,
	slash,
	caret,
	lparen,
	rparen,
	end
};

struct Token
{
	Tok kind;
	std::string text;
	int line;
	int column;
};

std::vector<Token> tokenize(const std::string &text, SourcePosition origin)
{
	std::vector<Token> out;
	int line = origin.line;
	int col = origin.column;
	size_t i = 0;
	auto advance = [&](size_t n) {
		for (size_t k = 0; k < n; ++k, ++i)
		{
			if (text[i] == '\n')
			{
				++line;
				col = 1;
			}
			else
				++col;
		}
	};
	while (i < text.size())
	{
		char ch = text[i];
		if (std::isspace(static_cast<unsigned char>(ch)))
		{
			advance(1);
			continue;
		}
		int tl = line, tc = col;
		if (std::isdigit(static_cast<unsigned char>(ch)))
		{
			size_t j = i;
			while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
				++j;
			out.push_back({Tok::integer, text.substr(i, j - i), tl, tc});
			advance(j - i);
			continue;
		}
		if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_')
		{
			size_t j = i;
			while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
				++j;
			out.push_back({Tok::ident, text.substr(i, j - i), tl, tc});
			advance(j - i);
			continue;
		}
		Tok kind;
		switch (ch)
		{
		case '+': kind = Tok::plus; break;
		case '-': kind = Tok::minus; break;
		case '*': kind = Tok::star; break;
		case '/': kind = Tok::slash; break;
		case '^': kind = Tok::caret; break;
		case '(': kind = Tok::lparen; break;
		case ')': kind = Tok::rparen; break;
		default:
			throw ParseError(std::string("unexpected character '") + ch + "'", tl, tc);
		}
		out.push_back({kind, std::string(1, ch), tl, tc});
		advance(1);
	}
	out.push_back({Tok::end, "", line, col});
	return out;
}

class Parser
{
public:
	Parser(std::vector<Token> tokens, SignaturePtr sig) : toks_(std::move(tokens)), sig_(std::move(sig)) {}

	Polynomial parse()
	{
		Polynomial p = expr();
		if (peek().kind != Tok::end)
			fail("unexpected '" + peek().text + "'", peek());
		return p;
	}

private:
	const Token &peek() const { return toks_[pos_]; }
	const Token &take() { return toks_[pos_++]; }
	bool accept(Tok k)
	{
		if (peek().kind == k)
		{
			++pos_;
			return true;
		}
		return false;
	}

	[[noreturn]] static void fail(const std::string &msg, const Token &at) { throw ParseError(msg, at.line, at.column); }

	Polynomial expr()
	{
		Polynomial acc = term();
		while (true)
		{
			if (accept(Tok::plus))
				acc += term();
			else if (accept(Tok::minus))
				acc -= term();
			else
				return acc;
		}
	}

	Polynomial term()
	{
		Polynomial acc = unary();
		while (true)
		{
			if (accept(Tok::star))
				acc = acc * unary();
			else if (peek().kind == Tok::slash)
			{
				const Token &at = take();
				Polynomial d = unary();
				acc = acc * Polynomial(sig_, invert_constant(d, at));
			}
			else
				return acc;
		}
	}

	Polynomial unary()
	{
		if (accept(Tok::minus))
			return -unary();
		if (accept(Tok::plus))
			return unary();
		return power();
	}

	Scalar invert_constant(const Polynomial &p, const Token &at)
	{
		if (!p.is_constant())
			fail("division by a non-constant expression", at);
		Scalar c = p.constant_term();
		if (c.is_zero())
			fail("division by zero", at);
		if (!c.is_monomial())
			fail("division by a non-invertible constant " + c.to_string(), at);
		return c.inverse();
	}

	long exponent()
	{
		bool paren = accept(Tok::lparen);
		bool negative = accept(Tok::minus);
		const Token &t = peek();
		if (t.kind != Tok::integer)
			fail("expected integer exponent", t);
		take();
		if (t.text.size() > 4)
			fail("exponent too large", t);
		long e = std::stol(t.text);
		if (paren && !accept(Tok::rparen))
			fail("expected ')'", peek());
		return negative ? -e : e;
	}

	Polynomial power()
	{
		const Token &base_tok = peek();
		Polynomial base = primary();
		if (peek().kind != Tok::caret)
			return base;
		const Token &caret = take();
		long e = exponent();
		if (e < 0)
		{
			Scalar inv = invert_constant(base, caret);
			Polynomial r(sig_, Scalar(1));
			for (long k = 0; k < -e; ++k)
				r *= inv;
			return r;
		}
		if (e > 1 && base_tok.kind == Tok::ident)
		{
			auto idx = sig_->find(base_tok.text);
			if (idx && (*sig_)[*idx].odd())
				fail("odd generator '" + base_tok.text + "' raised to power " + std::to_string(e), base_tok);
		}
		return pow(base, static_cast<unsigned>(e));
	}

	Polynomial primary()
	{
		const Token &t = peek();
		switch (t.kind)
		{
		case Tok::integer:
		{
			take();
			return Polynomial(sig_, Scalar(GaussRational(mpq_class(t.text))));
		}
		case Tok::ident:
		{
			take();
			if (auto idx = sig_->find(t.text))
				return Polynomial::generator(sig_, *idx);
			if (t.text == "i")
				return Polynomial(sig_, Scalar::imag_unit());
			if (t.text == "hbar")
				return Polynomial(sig_, Scalar::hbar());
			fail("unknown identifier '" + t.text + "'", t);
		}
		case Tok::lparen:
		{
			take();
			Polynomial p = expr();
			if (!accept(Tok::rparen))
				fail("expected ')'", peek());
			return p;
		}
		case Tok::end:
			fail("unexpected end of expression", t);
		default:
			fail("unexpected '" + t.text + "'", t);
		}
	}

	std::vector<Token> toks_;
	size_t pos_ = 0;
	SignaturePtr sig_;
};

} // namespace

Polynomial parse_polynomial(const std::string &text, const SignaturePtr &sig, SourcePosition origin)
{
	Parser parser(tokenize(text, origin), sig);
	return parser.parse();
}

} // namespace bvcalc
