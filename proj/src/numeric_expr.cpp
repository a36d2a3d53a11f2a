#include "bvcalc/numeric_expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>

#include "bvcalc/errors.hpp"

namespace bvcalc {

struct NumericExpr::Node
{
	enum Kind
	{
		constant,
		variable,
		negate,
		add,
		sub,
		mul,
		div,
		power,
		call
	} kind;
	double value = 0.0;
	size_t index = 0;
	double (*fn)(double) = nullptr;
	std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const NumericExpr::Node>;
using Node = NumericExpr::Node;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr)
{
	auto n = std::make_shared<Node>();
	n->kind = k;
	n->a = std::move(a);
	n->b = std::move(b);
	return n;
}

const std::map<std::string, double (*)(double)> &functions()
{
	static const std::map<std::string, double (*)(double)> table = {
	    {"sin", [](double x) { return std::sin(x); }},   {"cos", [](double x) { return std::cos(x); }},
	    {"tan", [](double x) { return std::tan(x); }},   {"exp", [](double x) { return std::exp(x); }},
	    {"log", [](double x) { return std::log(x); }},   {"sqrt", [](double x) { return std::sqrt(x); }},
	    {"abs", [](double x) { return std::abs(x); }},
	};
	return table;
}

class Parser
{
public:
	Parser(const std::string &text, const std::vector<std::string> &vars, SourcePosition origin)
	    : text_(text), vars_(vars), origin_(origin)
	{
	}

	NodePtr parse()
	{
		NodePtr n = sum();
		skip();
		if (pos_ < text_.size())
			fail("unexpected '" + std::string(1, text_[pos_]) + "'");
		return n;
	}

private:
	[[noreturn]] void fail(const std::string &msg) const { fail_at(pos_, msg); }

	[[noreturn]] void fail_at(size_t at, const std::string &msg) const
	{
		int line = origin_.line, col = origin_.column;
		for (size_t k = 0; k < at && k < text_.size(); ++k)
		{
			if (text_[k] == '\n')
			{
				++line;
				col = 1;
			}
			else
				++col;
		}
		throw ParseError(msg, line, col);
	}

	void skip()
	{
		while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
			++pos_;
	}

	bool accept(char c)
	{
		skip();
		if (pos_ < text_.size() && text_[pos_] == c)
		{
			++pos_;
			return true;
		}
		return false;
	}

	NodePtr sum()
	{
		NodePtr n = product();
		while (true)
		{
			if (accept('+'))
				n = make(Node::add, n, product());
			else if (accept('-'))
				n = make(Node::sub, n, product());
			else
				return n;
		}
	}

	NodePtr product()
	{
		NodePtr n = unary();
		while (true)
		{
			if (accept('*'))
				n = make(Node::mul, n, unary());
			else if (accept('/'))
				n = make(Node::div, n, unary());
			else
				return n;
		}
	}

	NodePtr unary()
	{
		if (accept('-'))
			return make(Node::negate, unary());
		if (accept('+'))
			return unary();
		return power();
	}

	NodePtr power()
	{
		NodePtr base = atom();
		if (accept('^'))
			return make(Node::power, base, unary());
		return base;
	}

	NodePtr atom()
	{
		skip();
		if (pos_ >= text_.size())
			fail("unexpected end of expression");
		size_t start = pos_;
		char c = text_[pos_];
		if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
		{
			const char *begin = text_.c_str() + pos_;
			char *end = nullptr;
			double v = std::strtod(begin, &end);
			if (end == begin)
				fail("malformed number");
			pos_ += end - begin;
			auto n = std::make_shared<Node>();
			n->kind = Node::constant;
			n->value = v;
			return n;
		}
		if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
		{
			while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
				++pos_;
			std::string name = text_.substr(start, pos_ - start);
			for (size_t k = 0; k < vars_.size(); ++k)
				if (vars_[k] == name)
				{
					auto n = std::make_shared<Node>();
					n->kind = Node::variable;
					n->index = k;
					return n;
				}
			if (name == "pi")
			{
				auto n = std::make_shared<Node>();
				n->kind = Node::constant;
				n->value = std::numbers::pi;
				return n;
			}
			auto fn = functions().find(name);
			if (fn == functions().end())
				fail_at(start, "unknown name '" + name + "'");
			if (!accept('('))
				fail("expected '(' after " + name);
			auto n = std::make_shared<Node>();
			n->kind = Node::call;
			n->fn = fn->second;
			n->a = sum();
			if (!accept(')'))
				fail("expected ')'");
			return n;
		}
		if (accept('('))
		{
			NodePtr n = sum();
			if (!accept(')'))
				fail("expected ')'");
			return n;
		}
		fail("unexpected '" + std::string(1, c) + "'");
	}

	const std::string &text_;
	const std::vector<std::string> &vars_;
	SourcePosition origin_;
	size_t pos_ = 0;
};

double eval(const Node &n, const double *v)
{
	switch (n.kind)
	{
	case Node::constant:
		return n.value;
	case Node::variable:
		return v[n.index];
	case Node::negate:
		return -eval(*n.a, v);
	case Node::add:
		return eval(*n.a, v) + eval(*n.b, v);
	case Node::sub:
		return eval(*n.a, v) - eval(*n.b, v);
	case Node::mul:
		return eval(*n.a, v) * eval(*n.b, v);
	case Node::div:
		return eval(*n.a, v) / eval(*n.b, v);
	case Node::power:
		return std::pow(eval(*n.a, v), eval(*n.b, v));
	case Node::call:
		return n.fn(eval(*n.a, v));
	}
	return 0.0;
}

} // namespace

NumericExpr::NumericExpr(const std::string &text, std::vector<std::string> variables, SourcePosition origin)
    : text_(text), variables_(std::move(variables))
{
	root_ = Parser(text_, variables_, origin).parse();
}

double NumericExpr::evaluate(const double *values) const
{
	return eval(*root_, values);
}

double evaluate_constant(const std::string &text, SourcePosition origin)
{
	return NumericExpr(text, {}, origin).evaluate(nullptr);
}

} // namespace bvcalc
