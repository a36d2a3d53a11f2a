#pragma once

#include <stdexcept>
#include <string>

namespace bvcalc {

struct SignatureMismatch : std::invalid_argument
{
	using std::invalid_argument::invalid_argument;
};

struct DegreeMismatch : std::invalid_argument
{
	using std::invalid_argument::invalid_argument;
};

/// Violated operation precondition (bad chart, degenerate form, non-closed input, ...).
struct PreconditionError : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

/// The gauge does not fix the symmetry, or the partition function vanishes.
struct AdmissibilityError : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

/// A numeric procedure did not reach its tolerance.
struct ConvergenceError : std::runtime_error
{
	using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error
{
	ParseError(const std::string &msg, int line, int column)
	    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line(line),
	      column(column)
	{
	}

	int line;
	int column;
};

} // namespace bvcalc
