#include "bvcalc/model_file.hpp"

#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "bvcalc/numeric_expr.hpp"
#include "bvcalc/parser.hpp"

namespace bvcalc {

namespace {

[[noreturn]] void fail(const YAML::Node &node, const std::string &msg)
{
	const auto &m = node.Mark();
	if (m.is_null())
		throw ParseError(msg, 0, 0);
	throw ParseError(msg, m.line + 1, m.column + 1);
}

// Position of the first character of a scalar's text, skipping an opening quote.
SourcePosition text_position(const YAML::Node &node)
{
	const auto &m = node.Mark();
	if (m.is_null())
		return {};
	return {m.line + 1, m.column + 1 + (node.Tag() == "!" ? 1 : 0)};
}

void check_keys(const YAML::Node &map, const std::set<std::string> &allowed, const std::string &where)
{
	if (!map.IsMap())
		fail(map, where + " must be a mapping");
	for (const auto &kv : map)
		if (!allowed.count(kv.first.as<std::string>()))
			fail(kv.first, "unknown key '" + kv.first.as<std::string>() + "' in " + where);
}

std::string text(const YAML::Node &node, const std::string &what)
{
	if (!node.IsScalar())
		fail(node, what + " must be a scalar");
	return node.Scalar();
}

template <typename T> T value(const YAML::Node &node, const std::string &what)
{
	if (!node.IsScalar())
		fail(node, what + " must be a scalar");
	try
	{
		return node.as<T>();
	}
	catch (const YAML::Exception &)
	{
		fail(node, "invalid value for " + what);
	}
}

std::vector<std::string> names(const YAML::Node &node, const std::string &what)
{
	if (!node.IsSequence())
		fail(node, what + " must be a list");
	std::vector<std::string> out;
	for (const auto &n : node)
		out.push_back(text(n, what));
	return out;
}

Polynomial poly(const YAML::Node &node, const DarbouxChart &chart, const std::string &what)
{
	return parse_polynomial(text(node, what), chart.signature(), text_position(node));
}

double number(const YAML::Node &node, const std::string &what)
{
	return evaluate_constant(text(node, what), text_position(node));
}

const DarbouxChart &need_chart(const std::optional<DarbouxChart> &chart, const YAML::Node &node)
{
	if (!chart)
		fail(node, "a 'coordinates' section is required before polynomial fields");
	return *chart;
}

DarbouxChart read_chart(const YAML::Node &coords, const std::string &measure)
{
	if (!coords.IsSequence() || coords.size() == 0)
		fail(coords, "coordinates must be a non-empty list");
	std::vector<CoordinateSpec> specs;
	for (const auto &c : coords)
	{
		check_keys(c, {"name", "ghost", "anti"}, "coordinate");
		if (!c["name"] || !c["anti"])
			fail(c, "coordinate needs 'name' and 'anti'");
		CoordinateSpec s;
		s.name = text(c["name"], "name");
		s.anti_name = text(c["anti"], "anti");
		s.ghost_degree = c["ghost"] ? value<int>(c["ghost"], "ghost") : 0;
		specs.push_back(s);
	}
	try
	{
		return DarbouxChart::from_coordinates(specs, measure);
	}
	catch (const std::invalid_argument &e)
	{
		fail(coords, e.what());
	}
}

size_t position_in(const std::vector<std::string> &list, const YAML::Node &node, const std::string &what)
{
	std::string s = text(node, what);
	for (size_t k = 0; k < list.size(); ++k)
		if (list[k] == s)
			return k;
	fail(node, "'" + s + "' is not one of the listed " + what + "s");
}

SymmetryData read_symmetry(const YAML::Node &node, const DarbouxChart &chart)
{
	check_keys(node, {"base", "ghosts", "rho", "structure_constants", "open_terms"}, "symmetry");
	for (const char *k : {"base", "ghosts", "rho"})
		if (!node[k])
			fail(node, std::string("symmetry needs '") + k + "'");
	SymmetryData sym;
	sym.base = names(node["base"], "base coordinate");
	sym.ghosts = names(node["ghosts"], "ghost");
	const size_t n = sym.base.size(), g = sym.ghosts.size();
	const auto &rho = node["rho"];
	if (!rho.IsSequence() || rho.size() != g)
		fail(rho, "rho needs one row per ghost");
	for (const auto &row : rho)
	{
		if (!row.IsSequence() || row.size() != n)
			fail(row, "each rho row needs one entry per base coordinate");
		std::vector<Polynomial> r;
		for (const auto &e : row)
			r.push_back(poly(e, chart, "rho entry"));
		sym.rho.push_back(r);
	}
	sym.T = std::vector(g, std::vector(g, std::vector(g, chart.zero())));
	if (const auto &sc = node["structure_constants"])
	{
		if (!sc.IsSequence())
			fail(sc, "structure_constants must be a list");
		// Entries give T^c_{ab} for one ordering; the antisymmetric partner is implied.
		for (const auto &e : sc)
		{
			check_keys(e, {"a", "b", "c", "value"}, "structure constant");
			if (!e["a"] || !e["b"] || !e["c"] || !e["value"])
				fail(e, "structure constant needs a, b, c and value");
			size_t a = position_in(sym.ghosts, e["a"], "ghost"), b = position_in(sym.ghosts, e["b"], "ghost"),
			       c = position_in(sym.ghosts, e["c"], "ghost");
			if (a == b)
				fail(e, "structure constants are antisymmetric; a and b must differ");
			Polynomial v = poly(e["value"], chart, "value");
			sym.T[a][b][c] += v;
			sym.T[b][a][c] -= v;
		}
	}
	if (const auto &ot = node["open_terms"])
	{
		if (!ot.IsSequence())
			fail(ot, "open_terms must be a list");
		sym.E = std::vector(g, std::vector(g, std::vector(n, std::vector(n, chart.zero()))));
		// E^{ij}_{ab}, completed antisymmetrically in (a,b) and in (i,j).
		for (const auto &e : ot)
		{
			check_keys(e, {"a", "b", "i", "j", "value"}, "open term");
			if (!e["a"] || !e["b"] || !e["i"] || !e["j"] || !e["value"])
				fail(e, "open term needs a, b, i, j and value");
			size_t a = position_in(sym.ghosts, e["a"], "ghost"), b = position_in(sym.ghosts, e["b"], "ghost");
			size_t i = position_in(sym.base, e["i"], "base coordinate"),
			       j = position_in(sym.base, e["j"], "base coordinate");
			if (a == b || i == j)
				fail(e, "open terms are antisymmetric; a, b and i, j must differ");
			Polynomial v = poly(e["value"], chart, "value");
			sym.E[a][b][i][j] += v;
			sym.E[b][a][i][j] -= v;
			sym.E[a][b][j][i] -= v;
			sym.E[b][a][j][i] += v;
		}
	}
	try
	{
		validate_symmetry(sym, chart);
	}
	catch (const std::exception &e)
	{
		fail(node, e.what());
	}
	return sym;
}

std::vector<double> read_hbar(const YAML::Node &node)
{
	std::vector<double> out;
	if (node.IsSequence())
		for (const auto &h : node)
			out.push_back(number(h, "hbar"));
	else
		out.push_back(number(node, "hbar"));
	for (double h : out)
		if (!(h > 0.0))
			fail(node, "hbar values must be positive");
	return out;
}

QuadratureDomain read_quadrature(const YAML::Node &node, const DarbouxChart &chart)
{
	check_keys(node, {"order", "panels", "tolerance", "max_refinements", "bounds"}, "quadrature");
	QuadratureDomain q;
	if (node["order"])
		q.order = value<unsigned>(node["order"], "order");
	if (node["panels"])
		q.panels = value<unsigned>(node["panels"], "panels");
	if (node["tolerance"])
		q.tolerance = number(node["tolerance"], "tolerance");
	if (node["max_refinements"])
		q.max_refinements = value<unsigned>(node["max_refinements"], "max_refinements");
	const auto &b = node["bounds"];
	if (!b || !b.IsMap())
		fail(node, "quadrature needs a 'bounds' mapping from even coordinates to [lower, upper]");
	std::map<std::string, std::pair<double, double>> given;
	for (const auto &kv : b)
	{
		if (!kv.second.IsSequence() || kv.second.size() != 2)
			fail(kv.second, "bounds must be [lower, upper]");
		double lo = number(kv.second[0], "lower bound"), hi = number(kv.second[1], "upper bound");
		if (!(lo < hi))
			fail(kv.second, "lower bound must be below upper bound");
		given[kv.first.as<std::string>()] = {lo, hi};
	}
	// Bounds are stored in chart order of the even coordinates, which is the integration order.
	const auto &sig = *chart.signature();
	for (const auto &p : chart.pairs())
	{
		const auto &gen = sig[p.coordinate];
		if (gen.ghost_degree % 2 != 0)
			continue;
		auto it = given.find(gen.name);
		if (it == given.end())
			fail(b, "missing bounds for even coordinate '" + gen.name + "'");
		q.bounds.push_back(it->second);
		given.erase(it);
	}
	if (!given.empty())
		fail(b, "bounds given for '" + given.begin()->first + "', which is not an even coordinate");
	return q;
}

SymplecticModel read_localization(const YAML::Node &node, const std::string &name)
{
	check_keys(node, {"m", "domain", "hamiltonian", "density", "fixed_points"}, "localization");
	for (const char *k : {"domain", "hamiltonian", "fixed_points"})
		if (!node[k])
			fail(node, std::string("localization needs '") + k + "'");
	SymplecticModel s;
	s.name = name;
	s.m = node["m"] ? value<unsigned>(node["m"], "m") : 1;
	const auto &dom = node["domain"];
	if (!dom.IsSequence() || dom.size() != 2 * s.m)
		fail(dom, "domain needs 2m entries {name, lower, upper}");
	for (const auto &d : dom)
	{
		check_keys(d, {"name", "lower", "upper"}, "domain entry");
		if (!d["name"] || !d["lower"] || !d["upper"])
			fail(d, "domain entry needs name, lower and upper");
		s.coordinates.push_back(text(d["name"], "name"));
		double lo = number(d["lower"], "lower"), hi = number(d["upper"], "upper");
		if (!(lo < hi))
			fail(d, "lower bound must be below upper bound");
		s.domain.push_back({lo, hi});
	}
	auto h = std::make_shared<NumericExpr>(text(node["hamiltonian"], "hamiltonian"), s.coordinates,
	                                       text_position(node["hamiltonian"]));
	auto rho = std::make_shared<NumericExpr>(node["density"] ? text(node["density"], "density") : "1", s.coordinates,
	                                         node["density"] ? text_position(node["density"]) : SourcePosition{});
	s.hamiltonian = [h](const double *x) { return h->evaluate(x); };
	s.density = [rho](const double *x) { return rho->evaluate(x); };
	const auto &fps = node["fixed_points"];
	if (!fps.IsSequence() || fps.size() == 0)
		fail(fps, "fixed_points must be a non-empty list");
	for (const auto &f : fps)
	{
		check_keys(f, {"label", "value", "hessian", "omega_det"}, "fixed point");
		if (!f["value"] || !f["hessian"])
			fail(f, "fixed point needs value and hessian");
		FixedPoint p;
		p.label = f["label"] ? text(f["label"], "label") : "p" + std::to_string(s.fixed_points.size() + 1);
		p.value = number(f["value"], "value");
		p.omega_det = f["omega_det"] ? number(f["omega_det"], "omega_det") : 1.0;
		const auto &hm = f["hessian"];
		if (!hm.IsSequence() || hm.size() != 2 * s.m)
			fail(hm, "hessian must be a 2m x 2m list of rows");
		for (const auto &row : hm)
		{
			if (!row.IsSequence() || row.size() != 2 * s.m)
				fail(row, "hessian must be a 2m x 2m list of rows");
			std::vector<double> r;
			for (const auto &e : row)
				r.push_back(number(e, "hessian entry"));
			p.hessian.push_back(r);
		}
		s.fixed_points.push_back(p);
	}
	return s;
}

} // namespace

Polynomial ModelFile::master_action() const
{
	if (action)
		return *action;
	const auto &S0 = require_free_action();
	if (s1)
		return S0 + *s1;
	if (!symmetry)
		throw PreconditionError("model needs 'action', or 'free_action' with 's1' or 'symmetry'");
	return S0 + build_S1_closed(*symmetry, require_chart());
}

Polynomial ModelFile::first_order_term() const
{
	if (s1)
		return *s1;
	if (!symmetry)
		throw PreconditionError("model needs 's1' or 'symmetry'");
	return build_S1(*symmetry, require_chart());
}

const DarbouxChart &ModelFile::require_chart() const
{
	if (!chart)
		throw PreconditionError("model has no 'coordinates' section");
	return *chart;
}

const Polynomial &ModelFile::require_free_action() const
{
	if (!free_action)
		throw PreconditionError("model has no 'free_action'");
	return *free_action;
}

ModelFile parse_model(const std::string &source, const std::string &name)
{
	YAML::Node root;
	try
	{
		root = YAML::Load(source);
	}
	catch (const YAML::ParserException &e)
	{
		throw ParseError(e.msg, e.mark.line + 1, e.mark.column + 1);
	}
	if (!root.IsMap())
		throw ParseError("model file must be a mapping", 1, 1);
	check_keys(root, {"name", "coordinates", "measure", "free_action", "action", "s1", "symmetry", "gauge_fermions",
	                  "constraints", "observable", "truncation", "solver", "hbar", "quadrature", "localization"},
	           "model");
	ModelFile m;
	m.name = root["name"] ? text(root["name"], "name") : name;
	std::string measure = root["measure"] ? text(root["measure"], "measure") : "lebesgue";
	if (root["coordinates"])
		m.chart = read_chart(root["coordinates"], measure);

	for (auto [key, slot] : {std::pair{"free_action", &m.free_action}, std::pair{"action", &m.action},
	                         std::pair{"s1", &m.s1}, std::pair{"observable", &m.observable}})
		if (const auto &n = root[key])
			*slot = poly(n, need_chart(m.chart, n), key);
	if (const auto &n = root["symmetry"])
		m.symmetry = read_symmetry(n, need_chart(m.chart, n));
	if (const auto &n = root["gauge_fermions"])
	{
		if (!n.IsMap())
			fail(n, "gauge_fermions must map names to fermions");
		for (const auto &kv : n)
			m.fermions.emplace_back(kv.first.as<std::string>(), poly(kv.second, need_chart(m.chart, n), "fermion"));
	}
	if (const auto &n = root["constraints"])
	{
		if (!n.IsSequence())
			fail(n, "constraints must be a list");
		for (const auto &c : n)
			m.constraints.push_back(poly(c, need_chart(m.chart, n), "constraint"));
	}
	if (const auto &n = root["truncation"])
	{
		check_keys(n, {"poly_degree", "hbar_order"}, "truncation");
		if (n["poly_degree"])
			m.poly_degree = value<unsigned>(n["poly_degree"], "poly_degree");
		if (n["hbar_order"])
			m.hbar_order = value<int>(n["hbar_order"], "hbar_order");
	}
	if (const auto &n = root["solver"])
	{
		check_keys(n, {"max_order", "basis_degree"}, "solver");
		if (n["max_order"])
			m.max_order = value<int>(n["max_order"], "max_order");
		if (n["basis_degree"])
			m.basis_degree = value<unsigned>(n["basis_degree"], "basis_degree");
	}
	if (const auto &n = root["hbar"])
		m.hbar = read_hbar(n);
	if (const auto &n = root["quadrature"])
		m.quadrature = read_quadrature(n, need_chart(m.chart, n));
	if (const auto &n = root["localization"])
		m.localization = read_localization(n, m.name);
	return m;
}

ModelFile load_model_file(const std::string &path)
{
	std::ifstream in(path);
	if (!in)
		throw ParseError("cannot open model file '" + path + "'", 0, 0);
	std::stringstream buf;
	buf << in.rdbuf();
	std::string stem = path.substr(path.find_last_of('/') + 1);
	return parse_model(buf.str(), stem.substr(0, stem.find('.')));
}

} // namespace bvcalc
