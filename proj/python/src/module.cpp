#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qsu2/algebra.hpp"
#include "qsu2/cli.hpp"
#include "qsu2/dirac.hpp"
#include "qsu2/errors.hpp"
#include "qsu2/gns_oracle.hpp"
#include "qsu2/qarith.hpp"
#include "qsu2/spectral.hpp"

namespace py = pybind11;
using namespace qsu2;

namespace {

// A polynomial is given either as one word ("a g*"; "" or "1" for the unit) or
// as a list of (word, coefficient) pairs, the form normal_order returns.
using PolySpec = std::variant<std::string, std::vector<std::pair<std::string, Complex>>>;

Word word_of(const std::string& text) { return text == "1" ? Word{} : parse_word(text); }

NCPolynomial to_polynomial(const PolySpec& spec, double q)
{
    Expression e;
    if (const auto* w = std::get_if<std::string>(&spec)) e.emplace_back(word_of(*w), 1.0);
    else
        for (const auto& [w, c] : std::get<1>(spec)) e.emplace_back(word_of(w), c);
    return normal_order(e, q);
}

std::vector<std::pair<std::string, Complex>> from_polynomial(const NCPolynomial& p)
{
    std::vector<std::pair<std::string, Complex>> out;
    for (const auto& [m, c] : p.terms()) out.emplace_back(to_string(m.word()), c);
    return out;
}

Branch to_branch(int s)
{
    if (s == 1) return Branch::Plus;
    if (s == -1) return Branch::Minus;
    throw InvalidParameter("branch must be +1 or -1");
}

GeneratorTable table_for(double q, int lmax_doubled) { return GeneratorTable::build(q, Truncation::from_doubled(lmax_doubled)); }

std::vector<HalfInteger> spins_from_doubled(const std::vector<int>& doubled)
{
    std::vector<HalfInteger> out;
    for (int d : doubled) out.push_back(HalfInteger::from_doubled(d));
    return out;
}

py::dict series_dict(const GrowthSeries& s)
{
    py::dict d;
    d["parameters"] = s.parameters;
    d["values"] = s.values;
    d["slope"] = s.slope;
    d["intercept"] = s.intercept;
    d["relative_residual"] = s.relative_residual();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Numerics on the quantum group SU_q(2). Spins are passed as doubled integers.";
    m.attr("__version__") = version();

    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", m.attr("Error"));
    py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);

    m.def("q_number", &q_number, py::arg("r"), py::arg("base"), "[r]_base = (base^r - base^-r) / (base - 1/base)");
    m.def(
        "cg_half",
        [](int m1_doubled, int branch, int l_doubled, int m_doubled, double q) {
            return cg_half(HalfInteger::from_doubled(m1_doubled), to_branch(branch), HalfInteger::from_doubled(l_doubled),
                           HalfInteger::from_doubled(m_doubled), q);
        },
        py::arg("m1_doubled"), py::arg("branch"), py::arg("l_doubled"), py::arg("m_doubled"), py::arg("q"),
        "Spin-1/2 coupling coefficient C^{1/2, l, l + branch/2}_{m1, m, m1 + m}.");

    m.def(
        "normal_order", [](const PolySpec& p, double q) { return from_polynomial(to_polynomial(p, q)); },
        py::arg("poly"), py::arg("q"));
    m.def(
        "haar_state",
        [](const PolySpec& p, double q, int lmax_doubled) { return haar_state(to_polynomial(p, q), table_for(q, lmax_doubled)); },
        py::arg("poly"), py::arg("q"), py::arg("lmax_doubled") = 24);
    m.def(
        "oracle_haar", [](const PolySpec& p, double q, int K) { return oracle::oracle_haar(to_polynomial(p, q), K, q); },
        py::arg("poly"), py::arg("q"), py::arg("levels") = 60);
    m.def(
        "relation_residuals",
        [](double q, int lmax_doubled) {
            const GeneratorTable t = GeneratorTable::build(q, Truncation::from_doubled(lmax_doubled), 1.0);
            std::vector<std::pair<std::string, double>> out;
            for (const auto& r : t.battery()) out.emplace_back(r.identity, r.residual);
            return out;
        },
        py::arg("q"), py::arg("lmax_doubled") = 24);

    m.def(
        "q_relation_check", [](double q, int lmax_doubled) { return q_relation_check(q, Truncation::from_doubled(lmax_doubled)); },
        py::arg("q"), py::arg("lmax_doubled") = 20);

    m.def(
        "heat_trace",
        [](double t, double q, int lmax_doubled, int precision_bits) {
            const HeatTraceReport r = heat_trace(t, q, Truncation::from_doubled(lmax_doubled), precision_bits);
            py::dict d;
            d["t"] = r.t;
            d["operator_trace"] = r.operator_trace;
            d["closed_sum"] = r.closed_sum;
            d["printed_series"] = r.printed_series;
            d["tail_bound"] = r.tail_bound;
            d["k_exponent"] = r.k_exponent;
            return d;
        },
        py::arg("t"), py::arg("q"), py::arg("lmax_doubled") = 62, py::arg("precision_bits") = 53);
    m.def("heat_exponent", &heat_exponent, py::arg("q"));
    m.def("laplace_peak", &laplace_peak, py::arg("q"), py::arg("t"));
    m.def(
        "haar_via_heat",
        [](const PolySpec& p, double t, double q, int lmax_doubled) {
            const TraceRatio r = haar_via_heat(to_polynomial(p, q), t, table_for(q, lmax_doubled));
            return py::make_tuple(r.ratio, r.tail_bound);
        },
        py::arg("poly"), py::arg("t"), py::arg("q"), py::arg("lmax_doubled") = 32,
        "(ratio, tail_bound) of Tr(a R e^{-tD^2}) / Tr(R e^{-tD^2}).");
    m.def(
        "asymptotic_band",
        [](double q, const std::vector<double>& t_grid, int lmax_doubled) {
            std::vector<std::pair<double, double>> out;
            for (const BandPoint& p : asymptotic_band(q, t_grid, Truncation::from_doubled(lmax_doubled)))
                out.emplace_back(p.t, p.s);
            return out;
        },
        py::arg("q"), py::arg("t_grid"), py::arg("lmax_doubled") = 62, "[(t, s(t))] with s = t^{1/2} e^{-k/t} Tr(R e^{-tD^2}).");
    m.def("make_grid", &make_grid, py::arg("start"), py::arg("stop"), py::arg("count"), py::arg("log_spaced") = true);

    m.def(
        "absD_commutator_series",
        [](const PolySpec& p, const std::vector<int>& shells_doubled, double q, int lmax_doubled) {
            const CommutatorSeries s =
                absD_commutator_series(to_polynomial(p, q), spins_from_doubled(shells_doubled), table_for(q, lmax_doubled));
            py::dict d = series_dict(s.series);
            d["a_norm"] = s.a_norm;
            d["cap"] = s.cap;
            return d;
        },
        py::arg("poly"), py::arg("shells_doubled"), py::arg("q"), py::arg("lmax_doubled") = 62);
    m.def(
        "trueD_growth",
        [](const PolySpec& p, const std::vector<int>& l_doubled, double q, int lmax_doubled) {
            return series_dict(trueD_growth(to_polynomial(p, q), spins_from_doubled(l_doubled), table_for(q, lmax_doubled)));
        },
        py::arg("poly"), py::arg("l_doubled"), py::arg("q"), py::arg("lmax_doubled") = 62);
    m.def(
        "modular_check",
        [](const PolySpec& a, const PolySpec& b, double q, int lmax_doubled) {
            return modular_check(to_polynomial(a, q), to_polynomial(b, q), table_for(q, lmax_doubled));
        },
        py::arg("a"), py::arg("b"), py::arg("q"), py::arg("lmax_doubled") = 12);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "qsu2");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line driver in-process; returns (exit_code, stdout, stderr).");
}
