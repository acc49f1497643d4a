#include "pactest/betweenness.hpp"
#include "pactest/io.hpp"
#include "pactest/learner.hpp"
#include "pactest/studies.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace pactest;

namespace {

RestrictionKind make_kind(const std::string& tag, std::optional<std::pair<std::vector<int>, std::vector<int>>> groups,
                          int i, int j, bool finite_difference) {
    RestrictionKind k;
    k.tag = restriction_tag_from_string(tag);
    if (groups) k.groups = Partition{groups->first, groups->second};
    k.i = i;
    k.j = j;
    k.differentiation = finite_difference ? Differentiation::finite_difference : Differentiation::automatic;
    return k;
}

ClassSpec make_class(const std::string& tag, std::optional<std::pair<std::vector<int>, std::vector<int>>> groups) {
    ClassSpec c{class_tag_from_string(tag), {}};
    if (groups) c.groups = Partition{groups->first, groups->second};
    return c;
}

std::vector<EvalPoint> make_points(const Mat& prices, const Vec& incomes) {
    if (incomes.size() != prices.rows()) throw DimensionError("prices rows and incomes differ in length");
    std::vector<EvalPoint> pts(static_cast<std::size_t>(prices.rows()));
    for (Eigen::Index t = 0; t < prices.rows(); ++t) pts[t] = {prices.row(t).transpose(), incomes[t]};
    return pts;
}

py::dict report_dict(const TestReport& r) {
    py::list rows;
    for (const auto& row : r.rows) {
        py::dict d;
        d["k"] = row.k;
        d["eps"] = row.eps;
        d["delta"] = row.delta;
        d["n"] = row.n;
        d["norm"] = row.norm;
        d["T"] = row.T;
        d["skipped"] = row.skipped;
        d["rejected"] = row.rejected;
        rows.append(d);
    }
    py::dict out;
    out["rows"] = rows;
    out["verdict"] = to_string(r.verdict);
    out["gamma_at_zero"] = r.gamma_at_zero;
    out["config"] = r.config;
    out["notes"] = r.notes;
    out["kind"] = to_string(r.kind.tag);
    return out;
}

TestSchedule make_schedule(double income, std::uint64_t seed, int max_iterations, std::size_t pairs,
                           std::size_t max_points, const std::string& variant) {
    TestSchedule s;
    s.income = income;
    s.seed = seed;
    s.max_iterations = max_iterations;
    s.max_points = max_points;
    s.gamma.pairs = pairs;
    s.gamma.variant = gamma_variant_from_string(variant);
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "PAC tests of consumer-choice data against preference classes";

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<DemandUndefined>(m, "DemandUndefined", PyExc_ArithmeticError);
    py::register_exception<SamplingFailure>(m, "SamplingFailure", PyExc_RuntimeError);
    py::register_exception<CsvError>(m, "CsvError", PyExc_ValueError);

    py::class_<AidsParams>(m, "AidsParams")
        .def(py::init<>())
        .def(py::init([](Vec a, Vec b, Mat g) { return AidsParams{std::move(a), std::move(b), std::move(g)}; }),
             py::arg("alpha"), py::arg("beta"), py::arg("gamma"))
        .def_readwrite("alpha", &AidsParams::alpha)
        .def_readwrite("beta", &AidsParams::beta)
        .def_readwrite("gamma", &AidsParams::gamma)
        .def_property_readonly("dim", &AidsParams::dim)
        .def("__repr__", [](const AidsParams& p) { return "<AidsParams K=" + std::to_string(p.dim()) + " " + params_hash(p) + ">"; });

    m.def("validate_params", [](const AidsParams& p) {
        const Validity v = validate_params(p);
        return py::make_tuple(v.ok, v.violations);
    }, "(ok, violations)");
    m.def("price_index", &price_index);
    m.def("budget_shares", &budget_shares);
    m.def("demand", &demand, py::arg("params"), py::arg("prices"), py::arg("income"));
    m.def("params_hash", &params_hash);
    m.def(
        "sample_params",
        [](int K, const std::string& cls, std::uint64_t seed, double income, double box_lo, double box_hi,
           std::optional<std::pair<std::vector<int>, std::vector<int>>> groups) {
            SamplingLaw law;
            law.income = income;
            law.box = {box_lo, box_hi};
            return sample_params(K, make_class(cls, groups), seed, law);
        },
        py::arg("K"), py::arg("cls") = "unrestricted", py::arg("seed") = 1, py::arg("income") = 1.0,
        py::arg("box_lo") = 0.5, py::arg("box_hi") = 2.0, py::arg("groups") = py::none());

    py::class_<Dataset>(m, "Dataset")
        .def_property_readonly("size", &Dataset::size)
        .def_property_readonly("dim", &Dataset::dim)
        .def_readonly("label", &Dataset::label)
        .def_property_readonly("prices", [](const Dataset& d) {
            Mat out(d.size(), d.dim());
            for (std::size_t t = 0; t < d.size(); ++t) out.row(t) = d.observations[t].prices.transpose();
            return out;
        })
        .def_property_readonly("quantities", [](const Dataset& d) {
            Mat out(d.size(), d.dim());
            for (std::size_t t = 0; t < d.size(); ++t) out.row(t) = d.observations[t].quantities.transpose();
            return out;
        })
        .def_property_readonly("incomes", [](const Dataset& d) {
            Vec out(d.size());
            for (std::size_t t = 0; t < d.size(); ++t) out[t] = d.observations[t].income;
            return out;
        })
        .def("to_csv", [](const Dataset& d) {
            std::ostringstream os;
            write_dataset_csv(os, d);
            return os.str();
        })
        .def_static("from_csv", [](const std::string& text) {
            std::istringstream is(text);
            return read_dataset_csv(is);
        });

    m.def(
        "generate_dataset",
        [](const AidsParams& p, std::size_t n, std::uint64_t seed, double income, const std::string& noise,
           double variance, double box_lo, double box_hi) {
            return generate_dataset(p, n, PriceLaw{{box_lo, box_hi}, seed}, income,
                                    NoiseSpec{noise_family_from_string(noise), variance});
        },
        py::arg("params"), py::arg("n"), py::arg("seed") = 1, py::arg("income") = 1.0, py::arg("noise") = "none",
        py::arg("variance") = 0.0, py::arg("box_lo") = 0.5, py::arg("box_hi") = 2.0);

    m.def("fit_aids", [](const Dataset& d, std::size_t n_use) { return fit_aids(d, n_use).params; }, py::arg("data"),
          py::arg("n_use") = 0);

    m.def(
        "income_derivs",
        [](const AidsParams& p, const Vec& prices, double income, int order, bool fd) {
            return income_derivs(DemandOracle::aids(p), prices, income, order,
                                 fd ? Differentiation::finite_difference : Differentiation::automatic);
        },
        py::arg("params"), py::arg("prices"), py::arg("income"), py::arg("order") = 1,
        py::arg("finite_difference") = false);
    m.def(
        "price_jacobian",
        [](const AidsParams& p, const Vec& prices, double income, bool fd) {
            return price_jacobian(DemandOracle::aids(p), prices, income,
                                  fd ? Differentiation::finite_difference : Differentiation::automatic);
        },
        py::arg("params"), py::arg("prices"), py::arg("income"), py::arg("finite_difference") = false);
    m.def(
        "slutsky",
        [](const AidsParams& p, const Vec& prices, double income, bool fd) {
            return slutsky(DemandOracle::aids(p), prices, income,
                           fd ? Differentiation::finite_difference : Differentiation::automatic)
                .S;
        },
        py::arg("params"), py::arg("prices"), py::arg("income"), py::arg("finite_difference") = false);

    m.def(
        "restriction_norm",
        [](const AidsParams& p, const std::string& kind, const Mat& prices, const Vec& incomes,
           std::optional<std::pair<std::vector<int>, std::vector<int>>> groups, int i, int j) {
            const auto pts = make_points(prices, incomes);
            const NormResult r = restriction_norm(DemandOracle::aids(p), make_kind(kind, groups, i, j, false), pts);
            return py::make_tuple(r.norm, r.evaluated, r.skipped);
        },
        py::arg("params"), py::arg("kind"), py::arg("prices"), py::arg("incomes"), py::arg("groups") = py::none(),
        py::arg("i") = 0, py::arg("j") = 1, "(norm, evaluated, skipped)");

    m.def(
        "sample_size",
        [](double eps, double delta, double L, int K, double C) { return sample_size(eps, delta, LearnSpec{L, K, C}); },
        py::arg("eps"), py::arg("delta"), py::arg("L") = 0.0, py::arg("K") = 2, py::arg("C") = 20.0);
    m.def("fat_shattering", &fat_shattering, py::arg("L"), py::arg("K"), py::arg("eps"));

    m.def(
        "estimate_gamma",
        [](const std::string& cls, const std::string& kind, int K, std::size_t pairs, std::size_t grid_points,
           std::uint64_t seed, const std::string& variant, double income, std::vector<double> eps_grid,
           std::optional<std::pair<std::vector<int>, std::vector<int>>> groups) {
            GammaSettings g;
            g.cls = make_class(cls, groups);
            g.kind = make_kind(kind, groups, 0, 1, false);
            g.K = K;
            g.pairs = pairs;
            g.grid_points = grid_points;
            g.seed = seed;
            g.variant = gamma_variant_from_string(variant);
            g.law.income = income;
            g.eps_grid = std::move(eps_grid);
            const GammaTable t = estimate_gamma(g);
            std::vector<std::tuple<double, double, std::size_t>> rows;
            for (const auto& r : t.rows) rows.emplace_back(r.eps, r.gamma, r.n_in_A);
            return rows;
        },
        py::arg("cls"), py::arg("kind"), py::arg("K") = 2, py::arg("pairs") = 500, py::arg("grid_points") = 200,
        py::arg("seed") = 1, py::arg("variant") = "max-min", py::arg("income") = 1.0,
        py::arg("eps_grid") = std::vector<double>{}, py::arg("groups") = py::none(), "[(eps, gamma, n_in_A)]");

    m.def(
        "run_test",
        [](const AidsParams& p, const std::string& kind, double income, std::uint64_t seed, int max_iterations,
           std::size_t pairs, std::size_t max_points, const std::string& variant,
           std::optional<std::pair<std::vector<int>, std::vector<int>>> groups) {
            TestReport r;
            {
                py::gil_scoped_release release;
                r = run_test(DemandOracle::aids(p), make_kind(kind, groups, 0, 1, false),
                             make_schedule(income, seed, max_iterations, pairs, max_points, variant));
            }
            return report_dict(r);
        },
        py::arg("params"), py::arg("kind"), py::arg("income") = 1.0, py::arg("seed") = 1, py::arg("max_iterations") = 8,
        py::arg("pairs") = 500, py::arg("max_points") = 200000, py::arg("variant") = "max-min",
        py::arg("groups") = py::none());
    m.def(
        "run_test_dataset",
        [](const Dataset& d, const std::string& kind, std::uint64_t seed, int max_iterations, std::size_t pairs,
           const std::string& variant, std::optional<std::pair<std::vector<int>, std::vector<int>>> groups) {
            TestReport r;
            {
                py::gil_scoped_release release;
                r = run_test(d, make_kind(kind, groups, 0, 1, false),
                             make_schedule(d.observations.front().income, seed, max_iterations, pairs, 200000, variant));
            }
            return report_dict(r);
        },
        py::arg("data"), py::arg("kind"), py::arg("seed") = 1, py::arg("max_iterations") = 8, py::arg("pairs") = 500,
        py::arg("variant") = "max-min", py::arg("groups") = py::none());

    m.def(
        "run_study",
        [](const std::string& study, std::vector<double> deviations, std::uint64_t seed) {
            const Study s = study_from_string(study);
            TestSchedule sch = study_schedule(s);
            sch.seed = seed;
            std::vector<StudyCell> cells;
            {
                py::gil_scoped_release release;
                cells = run_study(s, deviations.empty() ? default_deviations() : deviations, sch);
            }
            py::list out;
            for (const auto& c : cells) {
                py::dict d = report_dict(c.report);
                d["deviation"] = c.deviation;
                out.append(d);
            }
            return out;
        },
        py::arg("study"), py::arg("deviations") = std::vector<double>{}, py::arg("seed") = 1);
    m.def("study_subject", [](const std::string& s, double d) { return study_subject(study_from_string(s), d); });

    m.def(
        "crra_demand",
        [](const Vec& probs, const Vec& prices, double income, double rho) {
            return crra_eu_demand(ClaimEconomy{probs, prices, income}, rho);
        },
        py::arg("probs"), py::arg("prices"), py::arg("income"), py::arg("rho"));
    m.def(
        "betweenness",
        [](const Vec& probs, const Vec& prices, double income, double rho, int s, bool perturbed) {
            ClaimDemandOracle o = crra_oracle(rho);
            if (perturbed) o = perturbed_oracle(o, s);
            return r_betweenness(o, ClaimEconomy{probs, prices, income}, s).value;
        },
        py::arg("probs"), py::arg("prices"), py::arg("income"), py::arg("rho"), py::arg("s") = 2,
        py::arg("perturbed") = false, "R_bet for a CRRA expected-utility oracle (0-based target state s)");
}
