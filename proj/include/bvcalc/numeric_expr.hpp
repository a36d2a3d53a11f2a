#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bvcalc/parser.hpp"

namespace bvcalc {

/**
 * Real-valued expression over named variables, compiled once and evaluated
 * many times (quadrature samplers in model files).
 *
 * Grammar: numbers (decimal, optional exponent), variables, `pi`, `+ - * / ^`,
 * unary minus, parentheses, and the functions sin, cos, tan, exp, log, sqrt, abs.
 * `^` is right-associative and binds tighter than unary minus.
 */
class NumericExpr
{
public:
	/// Throws ParseError (with line/column relative to `origin`) on bad syntax or unknown names.
	NumericExpr(const std::string &text, std::vector<std::string> variables, SourcePosition origin = {});

	/// values[k] is the value of variables[k].
	double evaluate(const double *values) const;
	double evaluate(const std::vector<double> &values) const { return evaluate(values.data()); }

	const std::string &text() const { return text_; }
	const std::vector<std::string> &variables() const { return variables_; }

	struct Node;

private:
	std::string text_;
	std::vector<std::string> variables_;
	std::shared_ptr<const Node> root_;
};

/// Evaluate a closed expression such as "2*pi" or "-1/2".
double evaluate_constant(const std::string &text, SourcePosition origin = {});

} // namespace bvcalc
