#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "snperm/birkhoff.hpp"
#include "snperm/frankwolfe.hpp"
#include "snperm/harness.hpp"
#include "snperm/model.hpp"
#include "snperm/recover.hpp"
#include "snperm/snpoly.hpp"
#include "snperm/sortnet.hpp"
#include "snperm/spectral.hpp"
#include "snperm/splitqp.hpp"

namespace py = pybind11;
using namespace snperm;

namespace {

Mat mat_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
  Mat m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)));
  std::copy(a.data(), a.data() + a.size(), m.a.begin());
  return m;
}

py::array_t<double> array_from_mat(const Mat& m) {
  py::array_t<double> out({m.rows, m.cols});
  std::copy(m.a.begin(), m.a.end(), out.mutable_data());
  return out;
}

model::SideConstraints side_from_list(const std::vector<std::tuple<int, int, double>>& rows) {
  model::SideConstraints side;
  for (const auto& [i, j, gap] : rows) side.push_back({i, j, gap});
  return side;
}

}  // namespace

PYBIND11_MODULE(_snperm, m) {
  m.doc() = "Seriation via convex relaxations over sorting-network polytopes";

  py::class_<sortnet::ComparatorNetwork>(m, "ComparatorNetwork")
      .def_readonly("n", &sortnet::ComparatorNetwork::n)
      .def_property_readonly("num_comparators", &sortnet::ComparatorNetwork::num_comparators)
      .def_property_readonly("comparators",
                             [](const sortnet::ComparatorNetwork& net) {
                               std::vector<std::tuple<int, int, int>> out;
                               for (const auto& c : net.comparators)
                                 out.emplace_back(c.stage, c.top, c.bottom);
                               return out;
                             })
      .def("apply",
           [](const sortnet::ComparatorNetwork& net, const std::vector<double>& x) {
             return sortnet::apply(net, x);
           })
      .def("verify_sorts", &sortnet::verify_sorts)
      .def("to_text", &sortnet::to_text);

  m.def("bitonic_network", &sortnet::bitonic_network, py::arg("n"));
  m.def("odd_even_network", &sortnet::odd_even_network, py::arg("n"));

  py::class_<snpoly::SNPolytope>(m, "SNPolytope")
      .def_readonly("n", &snpoly::SNPolytope::n)
      .def_readonly("num_vars", &snpoly::SNPolytope::num_vars)
      .def_readonly("input_idx", &snpoly::SNPolytope::input_idx)
      .def_readonly("output_idx", &snpoly::SNPolytope::output_idx)
      .def_property_readonly("num_equalities",
                             [](const snpoly::SNPolytope& p) { return p.eq_rows.size(); })
      .def_property_readonly("num_inequalities",
                             [](const snpoly::SNPolytope& p) { return p.ineq_rows.size(); });

  m.def("build_polytope", &snpoly::build_polytope, py::arg("network"), py::arg("v"));
  m.def(
      "lift",
      [](const std::vector<double>& x, const sortnet::ComparatorNetwork& net,
         const snpoly::SNPolytope& poly) { return snpoly::lift(x, net, poly); },
      py::arg("x"), py::arg("network"), py::arg("polytope"));
  m.def("project_input", &snpoly::project_input, py::arg("polytope"), py::arg("point"));
  m.def(
      "permutahedron_contains",
      [](const std::vector<double>& x, const std::vector<double>& v, double tol) {
        const auto rep = snpoly::permutahedron_contains(x, v, tol);
        return py::make_tuple(rep.member, rep.worst_prefix_slack, rep.sum_residual);
      },
      py::arg("x"), py::arg("v"), py::arg("tol") = 1e-9);

  m.def(
      "two_sum",
      [](const py::array_t<double>& a, const PermutationVec& pi) {
        return model::two_sum(model::laplacian(model::SimilarityMatrix(mat_from_array(a))), pi);
      },
      py::arg("similarity"), py::arg("perm"));
  m.def(
      "r_score",
      [](const py::array_t<double>& a) {
        return model::r_score(model::SimilarityMatrix(mat_from_array(a)));
      },
      py::arg("similarity"));
  m.def("kendall_tau", &model::kendall_tau, py::arg("pi"), py::arg("sigma"));
  m.def(
      "spectral_lower_bound",
      [](double lambda2, int n) { return model::spectral_lower_bound(lambda2, n); },
      py::arg("lambda2"), py::arg("n"));

  m.def(
      "fiedler",
      [](const py::array_t<double>& a, double tol, int max_iter) {
        const auto l = model::laplacian(model::SimilarityMatrix(mat_from_array(a)));
        const auto f = spectral::fiedler(l, tol, max_iter);
        py::dict out;
        out["lambda2"] = f.lambda2;
        out["vector"] = f.vector;
        out["iterations"] = f.iterations;
        out["residual"] = f.residual;
        out["converged"] = f.converged;
        out["disconnected"] = f.disconnected;
        return out;
      },
      py::arg("similarity"), py::arg("tol") = 1e-10, py::arg("max_iter") = 5000);
  m.def(
      "spectral_order",
      [](const py::array_t<double>& a) {
        return spectral::spectral_order(model::SimilarityMatrix(mat_from_array(a))).order;
      },
      py::arg("similarity"));

  m.def("lmo_permutahedron", &frankwolfe::lmo_permutahedron, py::arg("c"));
  m.def("lmo_tiebroken", &frankwolfe::lmo_tiebroken, py::arg("c"));
  m.def(
      "assignment_lmo",
      [](const py::array_t<double>& c) { return birkhoff::assignment_lmo(mat_from_array(c)); },
      py::arg("cost"));
  m.def(
      "project_to_vector",
      [](const py::array_t<double>& x) { return birkhoff::project_to_vector(mat_from_array(x)); },
      py::arg("doubly_stochastic"));

  m.def("order_round", &recover::order_round, py::arg("x"));
  m.def(
      "sample_round",
      [](const std::vector<double>& x, int trials, double variance, uint64_t seed,
         const py::array_t<double>& a) {
        Rng rng(seed);
        const auto l = model::laplacian(model::SimilarityMatrix(mat_from_array(a)));
        const auto rr = recover::sample_round(x, trials, variance, rng, l);
        return py::make_tuple(rr.perm, rr.two_sum);
      },
      py::arg("x"), py::arg("trials"), py::arg("variance"), py::arg("seed"),
      py::arg("similarity"));
  m.def(
      "decompose",
      [](const std::vector<double>& x, double tol) {
        const auto d = recover::decompose(x, tol);
        return py::make_tuple(d.weights, d.perms, d.reconstruction_error);
      },
      py::arg("x"), py::arg("tol") = 1e-9);

  m.def(
      "markov_chain_cov",
      [](int n, double b, double sigma, int samples, uint64_t seed) {
        Rng rng(seed);
        const auto inst = harness::markov_chain_cov(n, b, sigma, samples, rng);
        return py::make_tuple(array_from_mat(inst.similarity.entries), inst.truth);
      },
      py::arg("n"), py::arg("b") = 0.999, py::arg("sigma") = 0.5, py::arg("samples") = 50,
      py::arg("seed") = 1);
  m.def(
      "consecutive_ones_instance",
      [](int rows, int cols, int block_min, int block_max, double flip_prob, uint64_t seed) {
        Rng rng(seed);
        const auto inst =
            harness::consecutive_ones_instance(rows, cols, block_min, block_max, flip_prob, rng);
        return py::make_tuple(array_from_mat(inst.binary),
                              array_from_mat(inst.similarity.entries), inst.truth);
      },
      py::arg("rows") = 59, py::arg("cols") = 70, py::arg("block_min") = 3,
      py::arg("block_max") = 12, py::arg("flip_prob") = 0.02, py::arg("seed") = 1);
  m.def(
      "pre_r_instance",
      [](int n, uint64_t seed, double decay) {
        Rng rng(seed);
        const auto inst = harness::pre_r_instance(n, rng, decay);
        return py::make_tuple(array_from_mat(inst.similarity.entries), inst.truth);
      },
      py::arg("n"), py::arg("seed") = 1, py::arg("decay") = 0.0);

  m.def(
      "solve_two_sum",
      [](const py::array_t<double>& a, const std::string& method, int constraints,
         double mu_fraction, uint64_t seed, int trials, double tol,
         const std::optional<PermutationVec>& truth,
         const std::vector<std::tuple<int, int, double>>& side, bool tiebreak,
         const std::string& network, int max_iter, int fw_max_iter) {
        harness::ExperimentConfig cfg;
        cfg.method = harness::method_from_name(method);
        cfg.constraint_count = constraints;
        cfg.mu_fraction = mu_fraction;
        cfg.seed = seed;
        cfg.trials = trials;
        cfg.tol = tol;
        cfg.tiebreak = tiebreak;
        cfg.network = network == "odd-even" ? sortnet::NetworkKind::odd_even
                                            : sortnet::NetworkKind::bitonic;
        cfg.max_iter = max_iter;
        cfg.fw_max_iter = fw_max_iter;
        model::SimilarityMatrix sim(mat_from_array(a));
        cfg.n = sim.n;
        if (!side.empty()) {
          cfg.explicit_constraints = side_from_list(side);
          cfg.constraint_count = 0;
        }
        const harness::ResultRecord rec = harness::run_experiment(cfg, sim, truth);
        py::module_ json = py::module_::import("json");
        return json.attr("loads")(rec.to_json());
      },
      py::arg("similarity"), py::arg("method") = "splitqp", py::arg("constraints") = 0,
      py::arg("mu_fraction") = 0.0, py::arg("seed") = 1, py::arg("trials") = 1000,
      py::arg("tol") = 1e-6, py::arg("truth") = std::nullopt,
      py::arg("side_constraints") = std::vector<std::tuple<int, int, double>>{},
      py::arg("tiebreak") = true, py::arg("network") = "bitonic", py::arg("max_iter") = 50000,
      py::arg("fw_max_iter") = 20000);

  m.def(
      "export_problem",
      [](const py::array_t<double>& a, double mu_fraction, const std::string& network,
         const std::vector<std::tuple<int, int, double>>& side, bool tiebreak) {
        model::SimilarityMatrix sim(mat_from_array(a));
        auto lap = model::laplacian(sim);
        lap.mu = splitqp::fiedler_fraction_mu(lap, mu_fraction);
        const auto net = network == "odd-even" ? sortnet::odd_even_network(sim.n)
                                               : sortnet::bitonic_network(sim.n);
        const auto poly = snpoly::build_polytope(net, perm_as_vector(identity_perm(sim.n)));
        snpoly::QuadObjective obj;
        obj.q_inputs = Mat(sim.n, sim.n);
        for (int i = 0; i < sim.n; ++i) {
          std::vector<double> e(sim.n, 0.0), col;
          e[i] = 1.0;
          lap.apply_reg(e, col);
          for (int j = 0; j < sim.n; ++j) obj.q_inputs(j, i) = col[j];
        }
        std::vector<snpoly::SideConstraintRow> rows;
        for (const auto& [i, j, gap] : side) rows.push_back({i, j, gap});
        if (tiebreak) rows.push_back({0, sim.n - 1, 1.0});
        return snpoly::export_problem(poly, obj, rows);
      },
      py::arg("similarity"), py::arg("mu_fraction") = 0.0, py::arg("network") = "bitonic",
      py::arg("side_constraints") = std::vector<std::tuple<int, int, double>>{},
      py::arg("tiebreak") = true);

  m.attr("__version__") = "0.1.0";
}
