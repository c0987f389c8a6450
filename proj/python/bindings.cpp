#include "infoflow/credit.hpp"
#include "infoflow/zfactor.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace infoflow;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Information-based asset pricing: filtering, bond prices and Z-factor reduction";
    m.attr("__version__") = "0.1.0";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            if (e.code() == Errc::invalid_input) PyErr_SetString(PyExc_ValueError, e.what());
            else PyErr_SetString(PyExc_ArithmeticError, e.what());
        }
    });

    m.def(
        "conditional_probs",
        [](std::vector<double> levels, std::vector<double> probs, double sigma, double T, double t, double xi) {
            return conditional_probs(DiscretePayoff(std::move(levels), std::move(probs)), InfoSpec{sigma, T}, t, xi);
        },
        py::arg("levels"), py::arg("probs"), py::arg("sigma"), py::arg("T"), py::arg("t"), py::arg("xi"),
        "Posterior probabilities of each payoff level given xi_t.");

    m.def(
        "bond_price",
        [](std::vector<double> levels, std::vector<double> probs, double sigma, double T, double r, double t, double xi) {
            const auto b = price_bond(DiscretePayoff(std::move(levels), std::move(probs)), InfoSpec{sigma, T},
                                      DiscountCurve::flat(r), t, xi);
            py::dict d;
            d["price"] = b.price;
            d["vol"] = b.vol;
            d["probs"] = b.probs;
            return d;
        },
        py::arg("levels"), py::arg("probs"), py::arg("sigma"), py::arg("T"), py::arg("r"), py::arg("t"), py::arg("xi"),
        "Defaultable discount bond price and volatility under a flat rate r.");

    m.def(
        "reduction",
        [](int n) {
            const auto tree = build_reduction(n);
            std::vector<std::string> out;
            for (int j = 1; j <= n; ++j) out.push_back(tree.plain(j));
            return out;
        },
        py::arg("n"), "Z_1..Z_n written in independent X-factors.");
}
