#include <doctest.h>

#include <cmath>

#include "bvcalc/model_file.hpp"
#include "models.hpp"

using namespace testing_support;

namespace {

std::string models(const std::string &file) { return std::string(MODELS_DIR) + "/" + file; }

const char *toy_header = R"(coordinates:
  - {name: x, ghost: 0, anti: xd}
  - {name: y, ghost: 0, anti: yd}
  - {name: beta, ghost: 1, anti: betad}
)";

} // namespace

TEST_CASE("model files reproduce the built-in models")
{
	SUBCASE("so3")
	{
		auto m = load_model_file(models("so3.yaml"));
		auto ref = so3_model();
		CHECK(m.name == "so3");
		REQUIRE(m.symmetry);
		// Same signature layout, so polynomials compare through their text.
		CHECK(m.free_action->to_string() == ref.S0.to_string());
		CHECK(m.master_action().to_string() == (ref.S0 + build_S1_closed(ref.sym, ref.chart)).to_string());
		CHECK(check_cme(m.master_action(), *m.chart).is_zero());
		CHECK(m.poly_degree == 4);
		CHECK(m.hbar_order == 2);
	}
	SUBCASE("open toy: antisymmetric completion of the open terms")
	{
		auto m = load_model_file(models("open_toy.yaml"));
		auto ref = open_toy_model();
		REQUIRE(m.symmetry);
		REQUIRE(m.symmetry->has_open_terms());
		for (size_t a = 0; a < 2; ++a)
			for (size_t b = 0; b < 2; ++b)
				for (size_t i = 0; i < 3; ++i)
					for (size_t j = 0; j < 3; ++j)
						CHECK(m.symmetry->E[a][b][i][j].to_string() == ref.sym.E[a][b][i][j].to_string());
		CHECK(m.first_order_term().to_string() == build_S1(ref.sym, ref.chart).to_string());
		CHECK_THROWS_AS(m.master_action(), PreconditionError);
		CHECK(m.max_order == 8);
	}
	SUBCASE("toy gauge keeps fermion order")
	{
		auto m = load_model_file(models("toy_gauge.yaml"));
		auto ref = toy_gauge_model();
		REQUIRE(m.fermions.size() == 2);
		CHECK(m.fermions[0].first == "psi1");
		CHECK(m.fermions[1].first == "psi2");
		CHECK(m.fermions[1].second.to_string() == ref.fermion(2).to_string());
		CHECK(m.hbar == std::vector<double>{0.5, 1.0, 2.0});
	}
	SUBCASE("sphere matches the built-in localization model")
	{
		auto m = load_model_file(models("sphere.yaml"));
		REQUIRE(m.localization);
		auto ref = SymplecticModel::sphere();
		CHECK(m.localization->domain[1].second == doctest::Approx(ref.domain[1].second).epsilon(1e-15));
		for (double h : {0.5, 1.0, 2.0})
			CHECK(std::abs(dh_fixed_point_sum(*m.localization, h) - dh_fixed_point_sum(ref, h)) < 1e-14);
		double x[2] = {0.3, 1.0};
		CHECK(m.localization->hamiltonian(x) == 0.3);
		CHECK(m.localization->density(x) == 1.0);
	}
}

TEST_CASE("parse errors carry document positions")
{
	auto position = [](const std::string &text) {
		try
		{
			parse_model(text);
		}
		catch (const ParseError &e)
		{
			return std::pair{e.line, e.column};
		}
		return std::pair{-1, -1};
	};
	std::string head = toy_header;
	// Line 5; the polynomial text starts after the opening quote at column 14.
	CHECK(position(head + "free_action: \"x^2 + * y\"\n") == std::pair{5, 21});
	// Plain scalars start at the node itself.
	CHECK(position(head + "free_action: x^2 + * y\n") == std::pair{5, 20});
	CHECK(position(head + "free_action: \"x + q\"\n") == std::pair{5, 19});
	CHECK(position(head + "bogus: 1\n").first == 5);
	CHECK(position("coordinates: [\n").first > 0);
	CHECK(position("free_action: x\n") == std::pair{1, 14});
	CHECK_THROWS_AS(load_model_file(models("no_such_file.yaml")), ParseError);
	CHECK_THROWS_AS(load_model_file(models("malformed.yaml")), ParseError);
}

TEST_CASE("schema validation")
{
	std::string head = toy_header;
	SUBCASE("quadrature bounds follow chart order")
	{
		auto m = parse_model(head + "quadrature:\n  order: 6\n  bounds: {y: [-2, 2], x: [-1, \"pi\"]}\n");
		REQUIRE(m.quadrature);
		REQUIRE(m.quadrature->bounds.size() == 2);
		CHECK(m.quadrature->bounds[0].first == -1.0);
		CHECK(m.quadrature->bounds[0].second == doctest::Approx(M_PI));
		CHECK(m.quadrature->bounds[1].first == -2.0);
		CHECK(m.quadrature->order == 6);
		CHECK_THROWS_AS(parse_model(head + "quadrature:\n  bounds: {x: [-1, 1]}\n"), ParseError);
		CHECK_THROWS_AS(parse_model(head + "quadrature:\n  bounds: {x: [1, -1], y: [0, 1]}\n"), ParseError);
		CHECK_THROWS_AS(parse_model(head + "quadrature:\n  bounds: {x: [0, 1], y: [0, 1], beta: [0, 1]}\n"),
		                ParseError);
	}
	SUBCASE("symmetry shape and antisymmetry")
	{
		std::string sym = "symmetry:\n  base: [x, y]\n  ghosts: [beta]\n";
		auto m = parse_model(head + "free_action: x^2/2\n" + sym + "  rho: [[\"0\", \"1\"]]\n");
		CHECK(check_symmetry(*m.free_action, *m.symmetry, *m.chart).ok());
		CHECK_THROWS_AS(parse_model(head + sym + "  rho: [[\"0\"]]\n"), ParseError);
		CHECK_THROWS_AS(parse_model(head + sym + "  rho: [[\"0\", \"1\"]]\n  structure_constants:\n"
		                                         "    - {a: beta, b: beta, c: beta, value: 1}\n"),
		                ParseError);
		// A ghost of the wrong degree is reported at the symmetry block.
		CHECK_THROWS_AS(parse_model(head + "symmetry:\n  base: [x]\n  ghosts: [y]\n  rho: [[\"1\"]]\n"), ParseError);
	}
	SUBCASE("misc")
	{
		CHECK_THROWS_AS(parse_model("free_action: x\n"), ParseError);
		CHECK_THROWS_AS(parse_model(head + "hbar: [1, -1]\n"), ParseError);
		CHECK_THROWS_AS(parse_model(head + "truncation: {poly_degree: many}\n"), ParseError);
		CHECK_THROWS_AS(parse_model("coordinates:\n  - {name: x, anti: x}\n"), ParseError);
		auto m = parse_model(head + "hbar: 0.25\nsolver: {basis_degree: 3}\n");
		CHECK(m.hbar == std::vector<double>{0.25});
		CHECK(m.basis_degree == 3);
		CHECK(m.name == "model");
		CHECK_THROWS_AS(m.master_action(), PreconditionError);
	}
	SUBCASE("localization")
	{
		std::string loc = "localization:\n  domain:\n    - {name: q, lower: -1, upper: 1}\n"
		                  "    - {name: p, lower: -1, upper: 1}\n  hamiltonian: \"q^2 - p^2\"\n";
		auto m = parse_model(loc + "  fixed_points:\n    - {value: 0, hessian: [[2, 0], [0, -2]]}\n");
		REQUIRE(m.localization);
		CHECK(m.localization->fixed_points[0].label == "p1");
		CHECK(hessian_data(m.localization->fixed_points[0].hessian).signature == 0);
		CHECK_THROWS_AS(parse_model(loc + "  fixed_points:\n    - {value: 0, hessian: [[2, 0]]}\n"), ParseError);
		CHECK_THROWS_AS(parse_model(loc + "  fixed_points: []\n"), ParseError);
		CHECK_THROWS_AS(parse_model(loc + "  density: \"r\"\n  fixed_points:\n    - {value: 0, hessian: [[2, 0], [0, -2]]}\n"),
		                ParseError);
	}
}
