// bvcalc: command-line front end for model files.
//
// Exit codes: 0 pass; 1 residual, obstruction, inadmissible gauge or failed
// quadrature; 2 bad input (parse errors, failed preconditions).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bvcalc/model_file.hpp"
#include "bvcalc/parser.hpp"
#include "bvcalc/quadrature.hpp"

using namespace bvcalc;
using json = nlohmann::ordered_json;

namespace {

struct Settings
{
	bool json_output = false;
	std::vector<double> hbar;
	std::optional<double> tolerance;
	std::optional<int> max_order;
	std::optional<std::string> observable;
	std::vector<std::string> fermions;
	bool compare = false;
	std::string kind;
	std::string file;
};

const std::vector<std::string> conventions = {
    "bracket: {f,g} = sum_i (-1)^|z^i| (f dR/dz^i dL/dz+_i g - f dR/dz+_i dL/dz^i g), {x,x+} = 1 for even x",
    "laplacian: Delta = sum_i dL/dz^i dL/dz+_i",
    "quantum master equation: 1/2 {S,S} - i hbar Delta S = 0",
    "first-order term: S1 = x+_i rho^i_a b^a - 1/2 b+_c T^c_ab b^a b^b",
    "lagrangian: z+_i = (-1)^|z^i| dPsi/dz^i (left derivative)",
    "fixed points: sum (2 pi hbar)^m e^{iH/hbar} e^{i pi sigma/4} sqrt(det omega)/sqrt|det Hess|",
};

json complex_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json residuals_json(const CheckReport &r)
{
	json out = json::array();
	for (const auto &res : r.residuals)
		out.push_back({{"label", res.label}, {"value", res.value.to_string()}});
	return out;
}

// Report status and exit code. Inadmissible gauges and failed quadratures are
// errors of the computation, not of the input, so they exit with 1.
struct Verdict
{
	std::string status;
	int code;
};

const Verdict pass{"pass", 0}, residual{"residual", 1}, obstructed{"obstruction", 1}, failed_run{"error", 1},
    bad_input{"error", 2};

std::string format_double(double v)
{
	// Shortest representation that reads back to the same double (at most 17 digits).
	char buf[40];
	for (int digits = 1; digits <= 17; ++digits)
	{
		std::snprintf(buf, sizeof buf, "%.*g", digits, v);
		if (std::strtod(buf, nullptr) == v)
			break;
	}
	return buf;
}

std::string inline_text(const json &v)
{
	if (v.is_string())
		return v.get<std::string>();
	if (v.is_number_float())
		return format_double(v.get<double>());
	if (v.is_object() && v.size() == 2 && v.contains("re") && v.contains("im"))
		return format_double(v["re"].get<double>()) + (v["im"].get<double>() < 0 ? " - " : " + ") +
		       format_double(std::abs(v["im"].get<double>())) + "i";
	if (v.is_object())
	{
		std::string s;
		for (const auto &[k, x] : v.items())
			s += (s.empty() ? "" : ", ") + k + "=" + inline_text(x);
		return s;
	}
	if (v.is_array())
	{
		std::string s = "[";
		for (size_t i = 0; i < v.size(); ++i)
			s += (i ? ", " : "") + inline_text(v[i]);
		return s + "]";
	}
	return v.dump();
}

void render_text(const json &j, int indent, std::ostream &os)
{
	std::string pad(indent, ' ');
	for (const auto &[k, v] : j.items())
	{
		bool complex_value = v.is_object() && v.size() == 2 && v.contains("re");
		if (v.is_object() && !complex_value)
		{
			os << pad << k << ":\n";
			render_text(v, indent + 2, os);
		}
		else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_string()))
		{
			os << pad << k << ":\n";
			for (const auto &e : v)
				os << pad << "  - " << inline_text(e) << "\n";
		}
		else
			os << pad << k << ": " << inline_text(v) << "\n";
	}
}

Polynomial parse_option(const std::string &text, const DarbouxChart &chart)
{
	return parse_polynomial(text, chart.signature());
}

std::vector<std::pair<std::string, Polynomial>> selected_fermions(const ModelFile &m, const Settings &s)
{
	if (s.fermions.empty())
		return m.fermions;
	std::vector<std::pair<std::string, Polynomial>> out;
	for (const auto &name : s.fermions)
	{
		bool found = false;
		for (const auto &f : m.fermions)
			if (f.first == name)
			{
				out.push_back(f);
				found = true;
			}
		if (!found)
			throw PreconditionError("no gauge fermion named '" + name + "' in the model");
	}
	return out;
}

Verdict run_check(const ModelFile &m, const Settings &s, json &report)
{
	const auto &chart = m.require_chart();
	json residuals = json::array();
	if (s.kind == "symmetry")
	{
		if (!m.symmetry)
			throw PreconditionError("model has no 'symmetry' section");
		residuals = residuals_json(check_symmetry(m.require_free_action(), *m.symmetry, chart));
	}
	else if (s.kind == "cme" || s.kind == "qme")
	{
		Polynomial S = m.master_action();
		report["results"]["S"] = S.to_string();
		Polynomial r = s.kind == "cme" ? check_cme(S, chart) : check_qme(S, chart);
		if (!r.is_zero())
			residuals.push_back(
			    {{"label", s.kind == "cme" ? "{S,S}" : "1/2{S,S} - i hbar Delta S"}, {"value", r.to_string()}});
	}
	else
	{
		std::vector<std::pair<std::string, LagrangianSpec>> specs;
		if (!m.constraints.empty() && s.fermions.empty())
			specs.emplace_back("constraints", LagrangianSpec::from_constraints(m.constraints));
		for (const auto &[name, psi] : selected_fermions(m, s))
			specs.emplace_back(name, LagrangianSpec::from_fermion(psi));
		if (specs.empty())
			throw PreconditionError("model has neither 'constraints' nor 'gauge_fermions'");
		for (const auto &[name, L] : specs)
		{
			if (L.fermion)
				validate_gauge_fermion(*L.fermion, chart);
			for (const auto &res : check_involution(L, chart).residuals)
				residuals.push_back({{"label", name + ": " + res.label}, {"value", res.value.to_string()}});
			report["results"]["checked"].push_back(name);
		}
	}
	report["residuals"] = residuals;
	return residuals.empty() ? pass : residual;
}

json terms_json(const std::vector<Polynomial> &terms, const std::string &prefix, int first)
{
	json out = json::array();
	for (size_t k = 0; k < terms.size(); ++k)
		out.push_back({{"term", prefix + std::to_string(first + int(k))}, {"value", terms[k].to_string()}});
	return out;
}

Verdict obstruction(const ObstructionReport &o, json &report)
{
	report["results"]["obstruction"] = {{"order", o.order},
	                                    {"representative", o.representative.to_string()},
	                                    {"description", o.description}};
	return obstructed;
}

Verdict run_solve(const ModelFile &m, const Settings &s, json &report)
{
	const auto &chart = m.require_chart();
	json &params = report["parameters"];
	if (s.kind == "open-cme")
	{
		const Polynomial &S0 = m.require_free_action();
		Polynomial S1 = m.first_order_term();
		std::optional<KoszulContraction> k;
		try
		{
			k.emplace(S0, chart);
		}
		catch (const PreconditionError &e)
		{
			throw PreconditionError(std::string("missing contraction: ") + e.what());
		}
		OpenCmeOptions opts;
		opts.max_order = s.max_order.value_or(m.max_order);
		opts.basis_degree = m.basis_degree;
		params["max_order"] = opts.max_order;
		params["basis_degree"] = opts.basis_degree;
		auto result = solve_open_cme(S0, S1, *k, chart, opts);
		if (auto *o = std::get_if<ObstructionReport>(&result))
			return obstruction(*o, report);
		const auto &sol = std::get<OpenCmeSolution>(result);
		report["results"]["terms"] = terms_json(sol.terms, "S", 0);
		report["results"]["adjusted_orders"] = sol.adjusted_orders;
		report["results"]["S"] = sol.S.to_string();
		Polynomial r = check_cme(sol.S, chart);
		report["residuals"] = json::array();
		if (!r.is_zero())
			report["residuals"].push_back({{"label", "{S,S}"}, {"value", r.to_string()}});
		return r.is_zero() ? pass : residual;
	}
	QmeOptions opts;
	opts.max_order = s.max_order.value_or(m.hbar_order);
	opts.basis_degree = m.poly_degree;
	params["max_order"] = opts.max_order;
	params["basis_degree"] = opts.basis_degree;
	Polynomial S = m.master_action();
	auto result = solve_qme_counterterms(S, chart, opts);
	if (auto *o = std::get_if<ObstructionReport>(&result))
		return obstruction(*o, report);
	const auto &sol = std::get<QmeSolution>(result);
	report["results"]["counterterms"] = terms_json(sol.counterterms, "T", 1);
	report["results"]["S"] = sol.S.to_string();
	report["results"]["exact"] = sol.exact;
	return pass;
}

std::vector<double> hbar_values(const ModelFile *m, const Settings &s)
{
	if (!s.hbar.empty())
		return s.hbar;
	if (m && !m->hbar.empty())
		return m->hbar;
	return {1.0};
}

Verdict run_integrate(const ModelFile &m, const Settings &s, json &report)
{
	const auto &chart = m.require_chart();
	Polynomial S = m.master_action();
	Polynomial f = s.observable ? parse_option(*s.observable, chart) : m.observable ? *m.observable : chart.constant(1);
	auto fermions = selected_fermions(m, s);
	if (fermions.empty())
		throw PreconditionError("model has no 'gauge_fermions'");
	auto hbars = hbar_values(&m, s);
	double tol = s.tolerance.value_or(1e-9);
	BvIntegralOptions opts;
	opts.even.domain = m.quadrature;
	json &params = report["parameters"];
	params["observable"] = f.to_string();
	params["hbar"] = hbars;
	params["compare"] = s.compare;
	params["tolerance"] = tol;
	params["quadrature"] = m.quadrature ? "from model" : "none";

	Verdict verdict = pass;
	json values = json::array();
	for (double h : hbars)
	{
		std::optional<std::complex<double>> reference;
		double spread = 0.0;
		for (const auto &[name, psi] : fermions)
		{
			json entry{{"fermion", name}, {"hbar", h}};
			try
			{
				IntegralResult r = bv_expectation(f, S, LagrangianSpec::from_fermion(psi), chart, h, opts);
				entry["value"] = complex_json(r.value);
				entry["method"] = to_string(r.method);
				entry["error"] = r.error;
				if (reference)
					spread = std::max(spread, std::abs(r.value - *reference) / std::max(1.0, std::abs(*reference)));
				else
					reference = r.value;
			}
			catch (const AdmissibilityError &e)
			{
				entry["status"] = "inadmissible";
				entry["message"] = e.what();
				verdict = failed_run;
			}
			catch (const ConvergenceError &e)
			{
				entry["status"] = "not-converged";
				entry["message"] = e.what();
				verdict = failed_run;
			}
			values.push_back(entry);
		}
		if (s.compare)
		{
			report["residuals"].push_back({{"label", "fermion spread at hbar=" + format_double(h)}, {"value", spread}});
			if (spread > tol && verdict.code == 0)
				verdict = residual;
		}
	}
	report["results"]["expectations"] = values;
	return verdict;
}

Verdict run_localize(const Settings &s, json &report)
{
	std::optional<ModelFile> file;
	SymplecticModel model;
	if (s.file == "builtin:s2")
		model = SymplecticModel::sphere();
	else
	{
		file = load_model_file(s.file);
		if (!file->localization)
			throw PreconditionError("model has no 'localization' section");
		model = *file->localization;
	}
	report["model"] = model.name;
	auto hbars = hbar_values(file ? &*file : nullptr, s);
	double tol = s.tolerance.value_or(1e-8);
	LhsOptions lhs;
	json &params = report["parameters"];
	params["m"] = model.m;
	params["hbar"] = hbars;
	params["tolerance"] = tol;
	params["quadrature"] = {{"order", lhs.order},
	                        {"nodes_per_period", lhs.nodes_per_period},
	                        {"tolerance", lhs.tolerance},
	                        {"max_refinements", lhs.max_refinements}};
	for (const auto &p : model.fixed_points)
	{
		HessianData hd = hessian_data(p.hessian);
		report["results"]["fixed_points"].push_back(
		    {{"label", p.label}, {"value", p.value}, {"signature", hd.signature}, {"abs_det", hd.abs_det}});
	}
	Verdict verdict = pass;
	json rows = json::array();
	for (double h : hbars)
	{
		auto rhs = dh_fixed_point_sum(model, h);
		NumericIntegral l;
		try
		{
			l = dh_lhs_numeric(model, h, lhs);
		}
		catch (const ConvergenceError &e)
		{
			rows.push_back({{"hbar", h}, {"status", "not-converged"}, {"message", e.what()}});
			verdict = failed_run;
			continue;
		}
		double rel = std::abs(l.value - rhs) / std::abs(rhs);
		rows.push_back({{"hbar", h},
		                {"integral", complex_json(l.value)},
		                {"quadrature_error", l.error},
		                {"fixed_point_sum", complex_json(rhs)},
		                {"relative_difference", rel}});
		if (!(rel <= tol) && verdict.code == 0)
			verdict = residual;
	}
	report["results"]["comparison"] = rows;
	return verdict;
}

int emit(json &report, const Verdict &v, bool as_json)
{
	report["status"] = v.status;
	report["exit_code"] = v.code;
	if (as_json)
		std::cout << report.dump(2) << "\n";
	else
		render_text(report, 0, std::cout);
	return v.code;
}

} // namespace

int main(int argc, char **argv)
{
	if (const char *t = std::getenv("BVCALC_THREADS"))
	{
		int n = std::atoi(t);
		if (n > 0)
			set_thread_count(unsigned(n));
	}

	Settings s;
	CLI::App app{"Batalin-Vilkovisky calculus on finite-dimensional models"};
	app.require_subcommand(1);
	app.fallthrough();
	app.add_flag("--json", s.json_output, "Print the report as JSON");
	app.add_option("--hbar", s.hbar, "Comma-separated list of hbar values")->delimiter(',');
	app.add_option("--tolerance", s.tolerance, "Acceptance tolerance");

	auto *check = app.add_subcommand("check", "Check a symmetry, master equation or Lagrangian");
	check->add_option("kind", s.kind)->required()->check(CLI::IsMember({"symmetry", "cme", "qme", "involution"}));
	check->add_option("file", s.file)->required();
	check->add_option("--fermion", s.fermions, "Gauge fermion name (repeatable)");

	auto *solve = app.add_subcommand("solve", "Solve a master equation perturbatively");
	solve->add_option("kind", s.kind)->required()->check(CLI::IsMember({"open-cme", "qme-counterterms"}));
	solve->add_option("file", s.file)->required();
	solve->add_option("--max-order", s.max_order, "Highest order to solve");

	auto *integrate = app.add_subcommand("integrate", "Gauge-fixed expectation values");
	integrate->add_option("file", s.file)->required();
	integrate->add_option("--observable", s.observable, "Observable polynomial");
	integrate->add_option("--fermion", s.fermions, "Gauge fermion name (repeatable)");
	integrate->add_flag("--compare", s.compare, "Require agreement across gauge fermions");

	auto *localize = app.add_subcommand("localize", "Compare an oscillatory integral with its fixed-point sum");
	localize->add_option("target", s.file, "builtin:s2 or a model file")->required();

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &e)
	{
		int code = app.exit(e);
		return code == 0 ? 0 : 2;
	}

	json report;
	std::string task = app.get_subcommands().front()->get_name();
	report["task"] = s.kind.empty() ? task : task + " " + s.kind;
	report["model"] = s.file;
	report["conventions"] = conventions;
	report["parameters"] = json::object();
	report["residuals"] = json::array();
	report["results"] = json::object();
	try
	{
		Verdict verdict;
		if (localize->parsed())
			verdict = run_localize(s, report);
		else
		{
			ModelFile m = load_model_file(s.file);
			report["model"] = m.name;
			if (check->parsed())
				verdict = run_check(m, s, report);
			else if (solve->parsed())
				verdict = run_solve(m, s, report);
			else
				verdict = run_integrate(m, s, report);
		}
		return emit(report, verdict, s.json_output);
	}
	catch (const ParseError &e)
	{
		report["error"] = {{"type", "parse"}, {"message", e.what()}, {"line", e.line}, {"column", e.column}};
	}
	catch (const AdmissibilityError &e)
	{
		report["error"] = {{"type", "inadmissible"}, {"message", e.what()}};
		return emit(report, failed_run, s.json_output);
	}
	catch (const ConvergenceError &e)
	{
		report["error"] = {{"type", "not-converged"}, {"message", e.what()}};
		return emit(report, failed_run, s.json_output);
	}
	catch (const std::exception &e)
	{
		report["error"] = {{"type", "precondition"}, {"message", e.what()}};
	}
	if (!s.json_output)
		std::cerr << "bvcalc: " << report["error"]["message"].get<std::string>() << "\n";
	return emit(report, bad_input, s.json_output);
}
