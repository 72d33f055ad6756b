// Python bindings for the orbivortex core: surfaces with spectral calculus,
// the vortex solver and its diagnostics, moduli-space probes, and the exact
// circle-bundle arithmetic. Heavy fields cross the boundary as numpy arrays
// (flat, node-indexed, length surface.size); everything else as plain dicts
// so results serialize directly to JSON.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "orbivortex/fields.hpp"
#include "orbivortex/moduli.hpp"
#include "orbivortex/sampling.hpp"
#include "orbivortex/seifert.hpp"
#include "orbivortex/solver.hpp"
#include "orbivortex/surface.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;
using namespace pybind11::literals;

using orbivortex::ComplexField;
using orbivortex::OneForm;
using orbivortex::ScalarField;
using orbivortex::Surface;
namespace fields = orbivortex::fields;
namespace moduli = orbivortex::moduli;
namespace sampling = orbivortex::sampling;
namespace seifert = orbivortex::seifert;
namespace solver = orbivortex::solver;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using CArray = py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast>;

// snake_case statuses, matching the CLI report vocabulary
std::string status_string(solver::SolveStatus s) {
    switch (s) {
    case solver::SolveStatus::Infeasible: return "infeasible";
    case solver::SolveStatus::Converged: return "converged";
    case solver::SolveStatus::MaxIterations: return "max_iterations";
    case solver::SolveStatus::Diverged: return "diverged";
    }
    return "unknown";
}

py::array_t<double> np(const ScalarField& f) {
    py::array_t<double> out(static_cast<py::ssize_t>(f.size()));
    std::copy(f.begin(), f.end(), out.mutable_data());
    return out;
}

py::array_t<std::complex<double>> np(const ComplexField& f) {
    py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(f.size()));
    std::copy(f.begin(), f.end(), out.mutable_data());
    return out;
}

ScalarField scalar_field(const Surface& S, const DArray& a) {
    if (static_cast<std::size_t>(a.size()) != S.size())
        throw std::invalid_argument("field has " + std::to_string(a.size()) +
                                    " entries, surface has " + std::to_string(S.size()) +
                                    " nodes");
    const double* p = a.data();
    return ScalarField(p, p + a.size());
}

ComplexField complex_field(const Surface& S, const CArray& a) {
    if (static_cast<std::size_t>(a.size()) != S.size())
        throw std::invalid_argument("field has " + std::to_string(a.size()) +
                                    " entries, surface has " + std::to_string(S.size()) +
                                    " nodes");
    const std::complex<double>* p = a.data();
    return ComplexField(p, p + a.size());
}

// Divisor points arrive as (c1, c2) or (c1, c2, mult) tuples.
std::vector<solver::DivisorInput> divisor_inputs(const py::iterable& pts) {
    std::vector<solver::DivisorInput> out;
    for (py::handle h : pts) {
        py::sequence t = py::cast<py::sequence>(h);
        if (t.size() != 2 && t.size() != 3)
            throw std::invalid_argument("divisor point must be (c1, c2) or (c1, c2, mult)");
        solver::DivisorInput d;
        d.c1 = py::cast<double>(t[0]);
        d.c2 = py::cast<double>(t[1]);
        d.mult = t.size() == 3 ? py::cast<int>(t[2]) : 1;
        out.push_back(d);
    }
    return out;
}

py::dict feasibility_dict(const solver::Feasibility& f) {
    return py::dict("feasible"_a = f.feasible, "boundary"_a = f.boundary,
                    "threshold"_a = f.threshold, "margin"_a = f.margin);
}

py::list divisor_points(const Surface& S, const solver::Divisor& D) {
    py::list pts;
    for (const auto& p : D.points)
        pts.append(py::dict("node"_a = p.node, "c1"_a = S.coord1(p.node),
                            "c2"_a = S.coord2(p.node), "mult"_a = p.mult));
    return pts;
}

py::dict zero_set_dict(const moduli::ZeroSet& zs) {
    py::list zeros;
    for (const auto& z : zs.zeros)
        zeros.append(py::dict("node"_a = z.node, "c1"_a = z.c1, "c2"_a = z.c2,
                              "mult"_a = z.mult, "mass_defect"_a = z.mass_defect,
                              "position_blur"_a = z.position_blur));
    return py::dict("zeros"_a = zeros, "total_multiplicity"_a = zs.total_multiplicity,
                    "consistent"_a = zs.consistent, "max_mass_defect"_a = zs.max_mass_defect);
}

seifert::SeifertData seifert_data(long long b, const std::vector<long long>& beta,
                                  const std::vector<long long>& mult) {
    seifert::SeifertData s;
    s.b = b;
    s.beta = beta;
    s.mult = mult;
    return s;
}

py::dict rational_dict(const seifert::Rational& r) {
    return py::dict("str"_a = seifert::to_string(r), "num"_a = r.numerator().str(),
                    "den"_a = r.denominator().str(),
                    "real"_a = boost::rational_cast<double>(r));
}

solver::SolveOptions solve_options(double tol, int max_newton) {
    solver::SolveOptions o;
    o.tol = tol;
    o.max_newton = max_newton;
    return o;
}

} // namespace

PYBIND11_MODULE(_orbivortex, m) {
    m.doc() = "Abelian vortex equations on compact orbifold surfaces: spectral "
              "solver, zero location, and exact circle-bundle arithmetic.";
    m.attr("__version__") = "0.1.0";

    py::class_<Surface>(m, "Surface",
                        "Discretized compact surface: a flat torus on an n x n spectral "
                        "grid, or a football orbifold S^2(m, m) on a colatitude-azimuth "
                        "grid. Fields are flat float64/complex128 arrays of length `size`, "
                        "node-indexed; `integrate` uses the built-in quadrature weights.")
        .def_static("torus", &Surface::torus, "L1"_a, "L2"_a, "n"_a,
                    "Flat torus with periods (L1, L2) on an n x n grid (n a power of two).")
        .def_static("football", &Surface::football, "m"_a, "n_theta"_a, "n_phi"_a,
                    "Football orbifold S^2(m, m): two antipodal cone points of order m.")
        .def_property_readonly("kind",
                               [](const Surface& S) { return orbivortex::kind_name(S.kind()); })
        .def_property_readonly("cone_order", &Surface::cone_order)
        .def_property_readonly("n1", &Surface::n1)
        .def_property_readonly("n2", &Surface::n2)
        .def_property_readonly("size", &Surface::size)
        .def_property_readonly("vol", &Surface::vol)
        .def_property_readonly("spacing", &Surface::spacing)
        .def_property_readonly("weights", [](const Surface& S) { return np(S.weights()); })
        .def("coords",
             [](const Surface& S) {
                 ScalarField c1(S.size()), c2(S.size());
                 for (std::size_t i = 0; i < S.size(); ++i) {
                     c1[i] = S.coord1(static_cast<int>(i));
                     c2[i] = S.coord2(static_cast<int>(i));
                 }
                 return py::make_tuple(np(c1), np(c2));
             },
             "Chart coordinates of every node, as a pair of flat arrays.")
        .def("integrate",
             [](const Surface& S, const DArray& f) { return S.integrate(scalar_field(S, f)); },
             "f"_a)
        .def("integrate",
             [](const Surface& S, const CArray& f) { return S.integrate(complex_field(S, f)); },
             "f"_a)
        .def("mean",
             [](const Surface& S, const DArray& f) { return S.mean(scalar_field(S, f)); },
             "f"_a)
        .def("norm_l2",
             [](const Surface& S, const DArray& f) { return S.norm_l2(scalar_field(S, f)); },
             "f"_a)
        .def("laplacian",
             [](const Surface& S, const DArray& f) { return np(S.laplacian(scalar_field(S, f))); },
             "f"_a, "Laplace-Beltrami operator; self-adjoint, integrates to zero exactly.")
        .def("green", [](const Surface& S, int node) { return np(S.green(node)); }, "node"_a,
             "Mean-zero Green function of the Laplacian with unit charge at `node`.")
        .def("helmholtz_inverse",
             [](const Surface& S, const DArray& f, double sigma) {
                 return np(S.helmholtz_inverse(scalar_field(S, f), sigma));
             },
             "f"_a, "sigma"_a, "Solve (Delta - sigma) g = f for sigma > 0.")
        .def("grad",
             [](const Surface& S, const DArray& f) {
                 ScalarField d1, d2;
                 S.grad(scalar_field(S, f), d1, d2);
                 return py::make_tuple(np(d1), np(d2));
             },
             "f"_a, "Orthonormal-frame gradient components (d1, d2).")
        .def("star_curl",
             [](const Surface& S, const DArray& a1, const DArray& a2) {
                 OneForm a{scalar_field(S, a1), scalar_field(S, a2)};
                 return np(S.star_curl(a));
             },
             "a1"_a, "a2"_a, "Hodge dual of the exterior derivative of a real one-form.")
        .def("project_invariant",
             [](const Surface& S, const DArray& f) {
                 return np(S.project_invariant(scalar_field(S, f)));
             },
             "f"_a, "L2 projection onto the deck-rotation invariant subspace.")
        .def("equivariance_defect",
             [](const Surface& S, const DArray& f) {
                 return S.equivariance_defect(scalar_field(S, f));
             },
             "f"_a)
        .def("nearest_node",
             [](const Surface& S, double c1, double c2) {
                 double d = 0;
                 int node = S.nearest_node(c1, c2, &d);
                 return py::make_tuple(node, d);
             },
             "c1"_a, "c2"_a, "Nearest grid node to a chart point: (node, snap_distance).")
        .def("__repr__", [](const Surface& S) {
            return "<Surface " + orbivortex::kind_name(S.kind()) + " " +
                   std::to_string(S.n1()) + "x" + std::to_string(S.n2()) + ">";
        });

    m.def(
        "feasibility",
        [](int a, double tau, long long n, double vol, double eps) {
            return feasibility_dict(solver::feasibility({a, tau}, n, vol, eps));
        },
        "a"_a, "tau"_a, "n"_a, "vol"_a, "eps"_a = 1.0,
        "Solvability dichotomy: vortices of total multiplicity n exist iff "
        "a*tau*vol - 4*pi*eps^2*n > 0.");

    m.def(
        "solve",
        [](const Surface& S, const py::iterable& points, int a, double tau, double eps,
           double tol, int max_newton) {
            auto D = solver::make_divisor(S, divisor_inputs(points));
            fields::ActionData act{a, tau};
            auto [sol, rep] = solver::solve_taubes(S, D, act, solve_options(tol, max_newton), eps);
            py::dict out("status"_a = status_string(rep.status),
                         "boundary"_a = rep.boundary, "iterations"_a = rep.iterations,
                         "pde_residual"_a = rep.pde_residual,
                         "constraint_defect"_a = rep.constraint_defect,
                         "max_fsq_ratio"_a = rep.max_fsq_ratio,
                         "feasibility"_a = feasibility_dict(rep.feas),
                         "divisor"_a = py::dict("degree"_a = D.degree,
                                                "max_snap_distance"_a = D.max_snap_distance,
                                                "points"_a = divisor_points(S, D)));
            if (rep.status == solver::SolveStatus::Converged) {
                auto obs = solver::reconstruct_observables(S, sol, act);
                out["degree"] = obs.degree;
                out["energies"] =
                    py::dict("total"_a = rep.energies.total, "bogomolny"_a = rep.energies.bogomolny,
                             "r_term"_a = rep.energies.r_term);
                out["c"] = sol.c;
                out["equivariance_defect"] = sol.equivariance_defect;
                out["residual_history"] = sol.residual_history;
                out["u"] = np(sol.u);
                out["fsq"] = np(sol.fsq);
                out["phi"] = np(sol.phi);
            }
            return out;
        },
        "surface"_a, "points"_a, "a"_a = 1, "tau"_a = 1.0, "eps"_a = 1.0, "tol"_a = 1e-8,
        "max_newton"_a = 50,
        "Solve the vortex equations with zeros prescribed at `points` "
        "(sequence of (c1, c2) or (c1, c2, mult)). Returns a dict with the "
        "convergence report and, when converged, the modulus-squared and "
        "curvature fields as flat arrays.");

    m.def(
        "roundtrip",
        [](const Surface& S, const py::iterable& points, int a, double tau, double tol,
           int max_newton) {
            auto D = solver::make_divisor(S, divisor_inputs(points));
            auto rt = moduli::divisor_roundtrip(S, D, {a, tau}, solve_options(tol, max_newton));
            return py::dict("status"_a = status_string(rt.status),
                            "multiplicity_match"_a = rt.multiplicity_match,
                            "max_position_error"_a = rt.max_position_error,
                            "max_position_error_h"_a = rt.max_position_error_h,
                            "zero_set"_a = zero_set_dict(rt.zeros),
                            "divisor"_a = py::dict("degree"_a = D.degree,
                                                   "points"_a = divisor_points(S, D)));
        },
        "surface"_a, "points"_a, "a"_a = 1, "tau"_a = 1.0, "tol"_a = 1e-8, "max_newton"_a = 50,
        "Prescribe zeros, solve, relocate the zeros of the solution, and "
        "match the two multisets.");

    m.def(
        "scan",
        [](const Surface& S, long long n, int a, const std::vector<double>& tau_grid, double tol,
           int max_newton, int threads) {
            auto rows =
                moduli::threshold_scan(S, n, {a, 1.0}, tau_grid, solve_options(tol, max_newton),
                                       threads);
            py::list out;
            for (const auto& r : rows)
                out.append(py::dict("tau"_a = r.tau, "status"_a = status_string(r.status),
                                    "residual"_a = r.residual));
            return out;
        },
        "surface"_a, "n"_a, "a"_a, "tau_grid"_a, "tol"_a = 1e-8, "max_newton"_a = 50,
        "threads"_a = 1,
        "Solve the canonical degree-n divisor at every tau of the ascending "
        "grid and tabulate statuses.");

    m.def(
        "probe",
        [](const Surface& S, long long n, int a, double tau, int samples, std::uint64_t seed,
           double tol, int max_newton, int threads) {
            auto p = moduli::symmetric_product_probe(S, {a, tau}, n, samples, seed,
                                                     solve_options(tol, max_newton), threads);
            return py::dict("samples"_a = p.samples, "solved"_a = p.solved,
                            "matched"_a = p.matched, "all_infeasible"_a = p.all_infeasible,
                            "success_rate"_a = p.success_rate,
                            "max_position_error_h"_a = p.max_position_error_h,
                            "max_mass_defect"_a = p.max_mass_defect);
        },
        "surface"_a, "n"_a, "a"_a, "tau"_a, "samples"_a, "seed"_a = 1, "tol"_a = 1e-8,
        "max_newton"_a = 50, "threads"_a = 1,
        "Round-trip `samples` random degree-n divisors and aggregate the "
        "multiplicity and position statistics.");

    m.def(
        "adiabatic",
        [](const Surface& S, const py::iterable& points, int a, double tau,
           const std::vector<double>& eps_list, double exclusion_radius, double tol,
           int max_newton, int threads) {
            auto D = solver::make_divisor(S, divisor_inputs(points));
            auto rows = solver::adiabatic_family(S, D, {a, tau}, eps_list,
                                                 solve_options(tol, max_newton), exclusion_radius,
                                                 threads);
            py::list out;
            for (const auto& r : rows)
                out.append(py::dict("eps"_a = r.eps, "status"_a = status_string(r.status),
                                    "sup_dev"_a = r.sup_dev, "mu_norm"_a = r.mu_norm,
                                    "iterations"_a = r.iterations,
                                    "pde_residual"_a = r.pde_residual));
            return out;
        },
        "surface"_a, "points"_a, "a"_a, "tau"_a, "eps_list"_a, "exclusion_radius"_a = 0.5,
        "tol"_a = 1e-8, "max_newton"_a = 50, "threads"_a = 1,
        "Solve a strictly decreasing eps family over a fixed divisor and "
        "tabulate the concentration diagnostics (off-core deviation from the "
        "vacuum and the moment-map defect norm).");

    m.def(
        "canonical_points",
        [](const Surface& S, long long n) {
            return divisor_points(S, moduli::canonical_divisor(S, n));
        },
        "surface"_a, "n"_a, "The canonical degree-n divisor as a list of node dicts.");

    m.def(
        "random_points",
        [](const Surface& S, long long n, std::uint64_t seed) {
            return divisor_points(S, moduli::random_divisor(S, n, seed));
        },
        "surface"_a, "n"_a, "seed"_a,
        "A deterministic random degree-n divisor as a list of node dicts.");

    m.def(
        "random_energy_split",
        [](const Surface& S, std::uint64_t seed, int a, double tau, long long n) {
            sampling::FieldSpec conn{0.8, 0, 3.0, true};
            sampling::FieldSpec sect{0.8, 0, 3.0, false};
            auto cfg = sampling::random_config(S, seed, conn, sect, n);
            fields::ActionData act{a, tau};
            auto id = fields::energy_identity(S, cfg, act);
            return py::dict("energy"_a = id.lhs, "bogomolny"_a = id.bogomolny, "r_term"_a = id.R,
                            "discrepancy"_a = id.discrepancy,
                            "r_defining"_a = fields::topological_R(S, cfg, act),
                            "degree"_a = fields::degree(S, cfg));
        },
        "surface"_a, "seed"_a, "a"_a = 1, "tau"_a = 1.0, "n"_a = 0,
        "Draw a deterministic random configuration and split its energy into "
        "Bogomolny plus topological parts; the discrepancy is a pure "
        "discretization defect.");

    m.def(
        "random_gauge_drift",
        [](const Surface& S, std::uint64_t cfg_seed, std::uint64_t transform_seed, int a,
           double tau, long long n) {
            sampling::FieldSpec conn{0.4, 5, 0.0, true};
            sampling::FieldSpec sect{0.5, 5, 0.0, false};
            auto cfg = sampling::random_config(S, cfg_seed, conn, sect, n);
            auto g = sampling::random_transform(S, transform_seed, {0.8, 4, 0.0, false});
            fields::ActionData act{a, tau};
            double before = fields::energy(S, cfg, act);
            double after = fields::energy(S, fields::gauge_apply(S, g, cfg, act), act);
            return py::dict("energy"_a = before, "energy_transformed"_a = after,
                            "rel_drift"_a = std::abs(after - before) / std::abs(before));
        },
        "surface"_a, "cfg_seed"_a, "transform_seed"_a, "a"_a = 1, "tau"_a = 1.0, "n"_a = 0,
        "Apply a deterministic random gauge transformation and report the "
        "relative energy drift (zero up to rounding).");

    m.def(
        "seifert_degree",
        [](long long b, const std::vector<long long>& beta, const std::vector<long long>& mult) {
            return rational_dict(seifert::orbifold_degree(seifert_data(b, beta, mult)));
        },
        "b"_a, "beta"_a, "mult"_a,
        "Exact orbifold degree b + sum(beta_i / mult_i) of normalized Seifert "
        "invariants, as exact numerator/denominator strings plus a float.");

    m.def(
        "associated_bundle",
        [](long long a, long long p, long long q, const std::vector<long long>& mult) {
            auto s = seifert::associated_bundle(a, seifert::rational_of(p, q), mult);
            auto deg = seifert::orbifold_degree(s);
            return py::dict("b"_a = s.b, "beta"_a = s.beta, "mult"_a = s.mult,
                            "degree"_a = rational_dict(deg));
        },
        "a"_a, "p"_a, "q"_a, "mult"_a,
        "Seifert invariants of the weight-a associated line bundle over a "
        "degree-(p/q) fibration with the given cone orders.");

    m.def(
        "moduli_status",
        [](long long a, long long p, long long q, double tau, double vol) {
            auto st = seifert::moduli_status(a, seifert::rational_of(p, q), tau, vol);
            return py::dict("nonempty"_a = st.nonempty, "dimension"_a = st.dimension,
                            "threshold"_a = st.threshold, "boundary"_a = st.boundary);
        },
        "a"_a, "p"_a, "q"_a, "tau"_a, "vol"_a,
        "Moduli dichotomy for bundle degree p/q at level tau and volume vol: "
        "empty at or above the threshold tau*vol/(4*pi), a symmetric product "
        "of complex dimension a*(p/q) below it.");

    m.def(
        "lifting_cokernel",
        [](long long genus, long long a) {
            auto c = seifert::lifting_cokernel(genus, a);
            return py::dict("cyclic_factors"_a = c.cyclic_factors, "order"_a = c.order.str(),
                            "trivial"_a = c.cyclic_factors.empty(),
                            "lemma_backed"_a = c.lemma_backed);
        },
        "genus"_a, "a"_a,
        "Cokernel of the winding-number map obstructing lifts of gauge "
        "transformations through the weight-a cover.");
}
