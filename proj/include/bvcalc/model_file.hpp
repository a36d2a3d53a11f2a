#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bvcalc/gauge_integration.hpp"
#include "bvcalc/localization.hpp"

namespace bvcalc {

/**
 * Declarative model description (YAML). Every section is optional; each task
 * checks for the sections it needs. Polynomial-valued fields are strings in
 * the polynomial grammar; numeric fields of the localization block are
 * expressions (see NumericExpr).
 */
struct ModelFile
{
	std::string name;
	std::optional<DarbouxChart> chart;

	std::optional<Polynomial> free_action;
	std::optional<Polynomial> action;
	std::optional<Polynomial> s1;
	std::optional<SymmetryData> symmetry;

	std::vector<std::pair<std::string, Polynomial>> fermions;
	std::vector<Polynomial> constraints;
	std::optional<Polynomial> observable;

	unsigned poly_degree = 6;
	int hbar_order = 3;
	int max_order = 12;
	unsigned basis_degree = 4;
	std::vector<double> hbar;
	std::optional<QuadratureDomain> quadrature;

	std::optional<SymplecticModel> localization;

	/// `action` if given, else free_action + s1, else free_action + S₁ built from a closed symmetry.
	Polynomial master_action() const;
	/// `s1` if given, else the first-order term built from the symmetry (E ignored).
	Polynomial first_order_term() const;
	const DarbouxChart &require_chart() const;
	const Polynomial &require_free_action() const;
};

/// Parse YAML text. Throws ParseError (line/column) for syntax and schema errors.
ModelFile parse_model(const std::string &text, const std::string &name = "model");

/// Read and parse a file; a missing file is a ParseError at 0:0.
ModelFile load_model_file(const std::string &path);

} // namespace bvcalc
