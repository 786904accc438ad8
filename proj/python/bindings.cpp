#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "irslab/arith.hpp"
#include "irslab/chabauty.hpp"
#include "irslab/cli.hpp"
#include "irslab/error.hpp"
#include "irslab/glue.hpp"
#include "irslab/hyp2.hpp"
#include "irslab/pantsurf.hpp"
#include "irslab/rng.hpp"
#include "irslab/symdyn.hpp"

namespace py = pybind11;
using namespace irslab;

namespace {

using Matrix = std::array<double, 4>;

Matrix entries(const hyp2::Isometry& g) { return g.entries(); }

std::vector<hyp2::Isometry> to_isometries(const std::vector<Matrix>& ms) {
    std::vector<hyp2::Isometry> out;
    for (const auto& m : ms) out.emplace_back(m[0], m[1], m[2], m[3]);
    return out;
}

std::vector<Matrix> to_matrices(const std::vector<hyp2::Isometry>& gs) {
    std::vector<Matrix> out;
    for (const auto& g : gs) out.push_back(g.entries());
    return out;
}

pantsurf::SurfaceGroupApprox tree_group(const std::string& law, int R, std::uint64_t seed) {
    const auto tree = pantsurf::TreeSpec::make(R);
    return pantsurf::build_group(tree, pantsurf::sample_fn(tree, pantsurf::parse_law(law), seed));
}

pantsurf::SearchOptions search_options(bool prune, std::size_t cap) {
    pantsurf::SearchOptions o;
    o.prune = prune;
    o.cap = cap;
    return o;
}

}  // namespace

PYBIND11_MODULE(_irslab, m) {
    m.doc() = "Core bindings of irslab";

    static py::exception<Error> errorType(m, "IrslabError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = py::reinterpret_borrow<py::object>(errorType.ptr())(e.what());
            err.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(errorType.ptr(), err.ptr());
        }
    });

    m.def("derive_seed", &derive_seed, py::arg("seed"), py::arg("index"));

    // hyperbolic plane
    py::class_<hyp2::Isometry>(m, "Isometry")
        .def(py::init<>())
        .def(py::init<double, double, double, double>(), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"))
        .def_static("translation", &hyp2::Isometry::translation, py::arg("length"))
        .def_static("rotation", &hyp2::Isometry::rotation, py::arg("angle"))
        .def_property_readonly("entries", &entries)
        .def("inverse", &hyp2::Isometry::inverse)
        .def("op_norm", &hyp2::Isometry::op_norm)
        .def("trace", &hyp2::Isometry::trace)
        .def("apply",
             [](const hyp2::Isometry& g, std::complex<double> z) {
                 const auto w = g.apply(hyp2::HPoint(z.real(), z.imag()));
                 return std::complex<double>(w.x, w.y);
             })
        .def("__mul__", [](const hyp2::Isometry& a, const hyp2::Isometry& b) { return a * b; })
        .def("__repr__", [](const hyp2::Isometry& g) {
            const auto& e = g.entries();
            return "Isometry(" + std::to_string(e[0]) + ", " + std::to_string(e[1]) + ", " + std::to_string(e[2]) +
                   ", " + std::to_string(e[3]) + ")";
        });
    m.def("translation_length", &hyp2::translation_length);
    m.def("classify", [](const hyp2::Isometry& g) { return hyp2::to_string(hyp2::classify(g)); });
    m.def("dist", [](std::complex<double> z, std::complex<double> w) {
        return hyp2::dist(hyp2::HPoint(z.real(), z.imag()), hyp2::HPoint(w.real(), w.imag()));
    });
    m.def(
        "ns_iterate",
        [](const hyp2::Isometry& h, double start, double end, int k) {
            std::vector<std::tuple<double, double, double>> out;
            for (const auto& a : hyp2::ns_iterate(h, hyp2::Arc{start, end}, k))
                out.emplace_back(a.start, a.end, a.complement_length());
            return out;
        },
        py::arg("h"), py::arg("start"), py::arg("end"), py::arg("k"),
        "Arcs h^i(U) for i = 1..k as (start, end, complement length).");

    // pants and truncated trees
    m.def("pants_group", [](double l1, double l2, double l3) {
        const auto p = pantsurf::pants_group({l1, l2, l3});
        return std::make_pair(p.A, p.B);
    });
    m.def("star_bound", &pantsurf::star_bound, py::arg("l"), py::arg("R"));
    m.def("star_bound_arcsinh", &pantsurf::star_bound_arcsinh, py::arg("l"), py::arg("R"));
    m.def(
        "tree_generators", [](const std::string& law, int R, std::uint64_t seed) {
            return to_matrices(tree_group(law, R, seed).generators);
        },
        py::arg("law"), py::arg("R"), py::arg("seed"));
    m.def(
        "systole",
        [](const std::string& law, int R, int W, std::uint64_t seed, bool prune, std::size_t cap) {
            return pantsurf::systole_oracle(tree_group(law, R, seed), W, search_options(prune, cap));
        },
        py::arg("law"), py::arg("R"), py::arg("W"), py::arg("seed") = 0, py::arg("prune") = true,
        py::arg("cap") = words::kDefaultWordCap);
    m.def(
        "inj_radius",
        [](const std::string& law, int R, int W, std::uint64_t seed, bool prune, std::size_t cap) {
            const auto g = tree_group(law, R, seed);
            const auto frame = pantsurf::sample_base_frame(pantsurf::pants_group(g.graph.pants[0]), seed);
            return pantsurf::inj_radius_at(g, frame, W, search_options(prune, cap));
        },
        py::arg("law"), py::arg("R"), py::arg("W"), py::arg("seed") = 0, py::arg("prune") = true,
        py::arg("cap") = words::kDefaultWordCap);

    // subshifts
    m.def("thue_morse", &symdyn::thue_morse, py::arg("n"));
    m.def(
        "factor_set",
        [](const std::vector<std::string>& samples, int L) {
            symdyn::SubshiftFamily fam;
            fam.samples = samples;
            return symdyn::factor_set(fam, L);
        },
        py::arg("samples"), py::arg("L"));
    m.def(
        "find_periodic",
        [](const std::vector<std::string>& samples, int L, int Pmax) {
            symdyn::SubshiftFamily fam;
            fam.samples = samples;
            return symdyn::find_periodic(fam, L, Pmax);
        },
        py::arg("samples"), py::arg("L"), py::arg("Pmax"));

    // gluing patterns
    m.def(
        "nu_prime_weight",
        [](const std::string& vols, std::vector<double> p) {
            return glue::nu_prime_weight(glue::BlockGeometry::parse(vols), symdyn::Bernoulli{std::move(p)});
        },
        py::arg("vols"), py::arg("bernoulli"));
    m.def(
        "cover_check",
        [](const std::string& alpha, const std::string& vols, int maxComponents, int maxCount) -> py::object {
            const auto r = glue::search_hypotheses(symdyn::WindowWord::centered(alpha), glue::BlockGeometry::parse(vols),
                                                   {maxComponents, maxCount});
            if (!r.period) return py::none();
            return py::str(*r.period);
        },
        py::arg("alpha"), py::arg("vols") = "1,1,1", py::arg("max_components") = 8, py::arg("max_count") = 16,
        "Period word of the first consistent covering hypothesis, or None.");

    // arithmetic
    m.def(
        "hilbert_symbol",
        [](const std::string& a, const std::string& b, long p) {
            return arith::hilbert_symbol(parse_rational(a), parse_rational(b), p);
        },
        py::arg("a"), py::arg("b"), py::arg("p"));
    m.def(
        "hilbert_oracle",
        [](const std::string& a, const std::string& b, long p) {
            return arith::hilbert_oracle(parse_rational(a), parse_rational(b), p);
        },
        py::arg("a"), py::arg("b"), py::arg("p"));
    m.def(
        "eps_invariant",
        [](const std::string& form, long d, long p, long root) {
            return arith::eps_invariant(arith::DiagonalForm::parse(form, d), arith::PadicPlace(p, d, root));
        },
        py::arg("form"), py::arg("d"), py::arg("p"), py::arg("root"));
    m.def(
        "similarity_obstruction",
        [](const std::string& q, const std::string& qp, long d, long p, long root) {
            const auto r = arith::similarity_obstruction(arith::DiagonalForm::parse(q, d),
                                                         arith::DiagonalForm::parse(qp, d), arith::PadicPlace(p, d, root));
            return arith::to_json(r).dump();
        },
        py::arg("q"), py::arg("qp"), py::arg("d"), py::arg("p"), py::arg("root"),
        "JSON report of the similarity test.");

    // Chabauty proxies
    m.def(
        "ball_set",
        [](const std::vector<Matrix>& gens, double R, int W, bool prune) {
            chabauty::BallOptions o;
            o.prune = prune;
            return to_matrices(chabauty::ball_set(to_isometries(gens), R, W, o).elements);
        },
        py::arg("generators"), py::arg("R"), py::arg("W"), py::arg("prune") = false);
    m.def(
        "proxy_distance",
        [](const std::vector<Matrix>& a, const std::vector<Matrix>& b, double R, int W) {
            return chabauty::proxy_distance(chabauty::ball_set(to_isometries(a), R, W),
                                            chabauty::ball_set(to_isometries(b), R, W));
        },
        py::arg("a"), py::arg("b"), py::arg("R"), py::arg("W"));
    m.def(
        "lattice_limit",
        [](const std::string& period, double L0, double L1, double sigma, std::vector<int> ks) {
            chabauty::LatticeLimitOptions o;
            o.ks = std::move(ks);
            return chabauty::lattice_limit_experiment(period, {L0, L1, sigma}, o).distances;
        },
        py::arg("period"), py::arg("L0") = 1.0, py::arg("L1") = 2.0, py::arg("sigma") = 1.5,
        py::arg("ks") = std::vector<int>{1, 2, 4, 8, 16});

    // command line
    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            const auto o = cli::run(args);
            return std::make_tuple(o.exitCode, o.out, o.err);
        },
        py::arg("args"), "Runs one irslab command; returns (exit code, stdout, stderr).");
    m.attr("TOOL_VERSION") = cli::kToolVersion;
}
