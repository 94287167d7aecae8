#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "snperm/harness.hpp"
#include "snperm/io.hpp"
#include "snperm/model.hpp"
#include "snperm/snpoly.hpp"
#include "snperm/sortnet.hpp"
#include "snperm/spectral.hpp"
#include "snperm/splitqp.hpp"

using namespace snperm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 2;
constexpr int kExitInvalidInput = 3;

sortnet::ComparatorNetwork make_network(const std::string& kind, int n) {
  if (kind == "bitonic") return sortnet::bitonic_network(n);
  if (kind == "odd-even" || kind == "odd_even") return sortnet::odd_even_network(n);
  throw std::invalid_argument("unknown network kind: " + kind);
}

struct CommonSolveOpts {
  std::string input, format, truth_path, constraints_path;
  std::string method = "splitqp";
  std::string network = "bitonic";
  int constraints = 0;
  double mu_fraction = 0.0;
  bool no_tiebreak = false;
  uint64_t seed = 1;
  int trials = 1000;
  double tol = 1e-6;
  int max_iter = 50000;
  int fw_max_iter = 20000;
  int y_columns = 1;
  bool matrix_scheme = false;
};

harness::ExperimentConfig to_config(const CommonSolveOpts& o) {
  harness::ExperimentConfig cfg;
  cfg.source = harness::Source::file;
  cfg.input_path = o.input;
  cfg.input_format = o.format;
  cfg.truth_path = o.truth_path;
  cfg.constraints_path = o.constraints_path;
  cfg.method = harness::method_from_name(o.method);
  cfg.network = o.network == "odd-even" || o.network == "odd_even"
                    ? sortnet::NetworkKind::odd_even
                    : sortnet::NetworkKind::bitonic;
  cfg.constraint_count = o.constraints;
  cfg.mu_fraction = o.mu_fraction;
  cfg.tiebreak = !o.no_tiebreak;
  cfg.seed = o.seed;
  cfg.trials = o.trials;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.fw_max_iter = o.fw_max_iter;
  cfg.y_columns = o.y_columns;
  cfg.matrix_scheme = o.matrix_scheme;
  return cfg;
}

model::SideConstraints gather_constraints(const std::string& constraints_path, int count,
                                          const std::string& truth_path, uint64_t seed) {
  if (!constraints_path.empty()) return io::read_constraints(constraints_path);
  if (count > 0) {
    if (truth_path.empty())
      throw std::invalid_argument("sampling --constraints requires --truth");
    const auto truth = io::read_permutation(truth_path);
    Rng rng = Rng(seed).substream(2);
    return model::sample_ordering_constraints(truth, count, rng);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seriation via convex relaxations over sorting-network polytopes"};
  app.require_subcommand(1);

  // ---------------- gen ----------------
  auto* gen = app.add_subcommand("gen", "Generate a benchmark instance");
  std::string gen_kind = "markov", gen_out, gen_format = "mm", gen_truth_out, gen_binary_out;
  int gen_n = 50;
  uint64_t gen_seed = 1;
  double markov_b = 0.999, markov_sigma = 0.5;
  int markov_samples = 50;
  int rows = 59, cols = 70, block_min = 3, block_max = 12;
  double flip = 0.02, prer_decay = 0.0;
  gen->add_option("--kind", gen_kind, "markov | cones | prer")->capture_default_str();
  gen->add_option("--n", gen_n, "problem size (markov/prer)")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out, "similarity matrix output path")->required();
  gen->add_option("--format", gen_format, "mm | mm-array | csv | bin01")->capture_default_str();
  gen->add_option("--truth-out", gen_truth_out, "write the hidden ordering here");
  gen->add_option("--binary-out", gen_binary_out, "write the 0/1 object matrix (cones)");
  gen->add_option("--b", markov_b)->capture_default_str();
  gen->add_option("--sigma", markov_sigma)->capture_default_str();
  gen->add_option("--samples", markov_samples)->capture_default_str();
  gen->add_option("--rows", rows)->capture_default_str();
  gen->add_option("--cols", cols)->capture_default_str();
  gen->add_option("--block-min", block_min)->capture_default_str();
  gen->add_option("--block-max", block_max)->capture_default_str();
  gen->add_option("--flip", flip, "noise flip probability (cones)")->capture_default_str();
  gen->add_option("--decay", prer_decay, "0 = linear staircase, else geometric (prer)")
      ->capture_default_str();

  // ---------------- solve ----------------
  auto* solve = app.add_subcommand("solve", "Solve one instance end to end");
  CommonSolveOpts so;
  std::string solve_out, trace_out, perm_out;
  solve->add_option("--input", so.input, "similarity matrix (or binary 0/1 matrix)")->required();
  solve->add_option("--format", so.format, "input format override");
  solve->add_option("--method", so.method, "spectral | fw_perm | fw_birkhoff | splitqp")
      ->capture_default_str();
  solve->add_option("--network", so.network, "bitonic | odd-even")->capture_default_str();
  solve->add_option("--constraints", so.constraints, "number of sampled ordering constraints")
      ->capture_default_str();
  solve->add_option("--truth", so.truth_path, "ground-truth ordering file");
  solve->add_option("--constraints-file", so.constraints_path, "explicit constraint rows");
  solve->add_option("--mu-fraction", so.mu_fraction,
                    "regularization as a fraction of the admissible maximum")
      ->capture_default_str();
  solve->add_flag("--no-tiebreak", so.no_tiebreak, "drop the orientation tiebreak row");
  solve->add_option("--seed", so.seed)->capture_default_str();
  solve->add_option("--trials", so.trials, "randomized rounding budget")->capture_default_str();
  solve->add_option("--tol", so.tol, "solver tolerance")->capture_default_str();
  solve->add_option("--max-iter", so.max_iter)->capture_default_str();
  solve->add_option("--fw-max-iter", so.fw_max_iter)->capture_default_str();
  solve->add_option("--y-columns", so.y_columns, "columns of Y (Birkhoff variant)")
      ->capture_default_str();
  solve->add_flag("--matrix-scheme", so.matrix_scheme,
                  "matrix-based regularization (Birkhoff variant)");
  solve->add_option("--out", solve_out, "result record (JSON)");
  solve->add_option("--trace", trace_out, "objective/gap trace CSV (Frank-Wolfe methods)");
  solve->add_option("--perm-out", perm_out, "recovered permutation file");

  // ---------------- export ----------------
  auto* exp = app.add_subcommand("export", "Export the assembled problem as MPS");
  CommonSolveOpts eo;
  std::string export_out, dump_prefix;
  exp->add_option("--input", eo.input)->required();
  exp->add_option("--format", eo.format);
  exp->add_option("--network", eo.network, "bitonic | odd-even")->capture_default_str();
  exp->add_option("--mu-fraction", eo.mu_fraction)->capture_default_str();
  exp->add_option("--constraints", eo.constraints)->capture_default_str();
  exp->add_option("--truth", eo.truth_path);
  exp->add_option("--constraints-file", eo.constraints_path);
  exp->add_flag("--no-tiebreak", eo.no_tiebreak);
  exp->add_option("--seed", eo.seed)->capture_default_str();
  exp->add_option("--out", export_out, "MPS output path")->required();
  exp->add_option("--dump-constraints", dump_prefix,
                  "also write <prefix>_eq.mtx and <prefix>_ineq.mtx");

  // ---------------- score ----------------
  auto* score = app.add_subcommand("score", "Score a permutation against a matrix");
  std::string score_input, score_format, score_perm, score_truth, score_out;
  bool score_eq4 = false;
  score->add_option("--input", score_input)->required();
  score->add_option("--format", score_format);
  score->add_option("--perm", score_perm, "permutation file to score")->required();
  score->add_option("--truth", score_truth, "reference ordering for Kendall tau");
  score->add_flag("--eq4", score_eq4, "report the double-sum objective convention");
  score->add_option("--out", score_out, "write JSON here instead of stdout");

  // ---------------- sweep ----------------
  auto* sweep = app.add_subcommand("sweep", "Run a seeded experiment grid");
  std::string sw_kind = "markov", sw_out_dir = "results";
  std::vector<std::string> sw_methods{"spectral", "splitqp"};
  std::vector<int> sw_constraints{0};
  std::vector<double> sw_mu{0.0};
  std::vector<uint64_t> sw_seeds{1};
  int sw_n = 50, sw_trials = 1000, sw_jobs = 2;
  double sw_tol = 1e-5;
  sweep->add_option("--kind", sw_kind, "markov | cones | prer")->capture_default_str();
  sweep->add_option("--n", sw_n)->capture_default_str();
  sweep->add_option("--seeds", sw_seeds, "list of seeds")->expected(-1);
  sweep->add_option("--methods", sw_methods)->expected(-1);
  sweep->add_option("--constraints", sw_constraints)->expected(-1);
  sweep->add_option("--mu-fractions", sw_mu)->expected(-1);
  sweep->add_option("--trials", sw_trials)->capture_default_str();
  sweep->add_option("--tol", sw_tol)->capture_default_str();
  sweep->add_option("--jobs", sw_jobs)->capture_default_str();
  sweep->add_option("--out-dir", sw_out_dir)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*gen) {
      Rng root(gen_seed);
      Rng rng = root.substream(1);
      harness::GeneratedInstance inst;
      if (gen_kind == "markov") {
        inst = harness::markov_chain_cov(gen_n, markov_b, markov_sigma, markov_samples, rng);
      } else if (gen_kind == "cones" || gen_kind == "consecutive_ones") {
        inst = harness::consecutive_ones_instance(rows, cols, block_min, block_max, flip, rng);
      } else if (gen_kind == "prer" || gen_kind == "pre_r") {
        inst = harness::pre_r_instance(gen_n, rng, prer_decay);
      } else {
        throw std::invalid_argument("unknown --kind: " + gen_kind);
      }
      io::write_matrix(gen_out, inst.similarity.entries, io::format_from_name(gen_format));
      if (!gen_truth_out.empty()) io::write_permutation(gen_truth_out, inst.truth);
      if (!gen_binary_out.empty() && inst.binary.rows > 0)
        io::write_matrix(gen_binary_out, inst.binary, io::MatrixFormat::binary01);
      return kExitOk;
    }

    if (*solve) {
      const auto cfg = to_config(so);
      const auto rec = harness::run_experiment(cfg);
      const std::string json = rec.to_json();
      if (solve_out.empty()) std::cout << json << '\n';
      else io::write_text_file(solve_out, json);
      if (!trace_out.empty()) io::write_text_file(trace_out, harness::trace_to_csv(rec.trace));
      if (!perm_out.empty()) io::write_permutation(perm_out, rec.permutation);
      return rec.solver.converged ? kExitOk : kExitSolverFailure;
    }

    if (*exp) {
      Mat m = io::read_matrix(eo.input, io::format_from_name(eo.format));
      const model::SimilarityMatrix sim(std::move(m));
      auto lap = model::laplacian(sim);
      lap.mu = splitqp::fiedler_fraction_mu(lap, eo.mu_fraction);
      auto side = gather_constraints(eo.constraints_path, eo.constraints, eo.truth_path, eo.seed);
      if (!eo.no_tiebreak) side.push_back(model::tiebreak_constraint(sim.n));
      const auto net = make_network(eo.network, sim.n);
      const auto poly = snpoly::build_polytope(net, perm_as_vector(identity_perm(sim.n)));
      snpoly::QuadObjective obj;
      obj.q_inputs = Mat(sim.n, sim.n);
      // Densify L - mu P on the inputs column by column.
      for (int i = 0; i < sim.n; ++i) {
        std::vector<double> e(sim.n, 0.0), col;
        e[i] = 1.0;
        lap.apply_reg(e, col);
        for (int j = 0; j < sim.n; ++j) obj.q_inputs(j, i) = col[j];
      }
      std::vector<snpoly::SideConstraintRow> rows_out;
      for (const auto& sc : side) rows_out.push_back({sc.i, sc.j, sc.gap});
      io::write_text_file(export_out, snpoly::export_problem(poly, obj, rows_out));
      if (!dump_prefix.empty()) {
        io::write_text_file(dump_prefix + "_eq.mtx", snpoly::dump_constraints_mm(poly, true));
        io::write_text_file(dump_prefix + "_ineq.mtx", snpoly::dump_constraints_mm(poly, false));
      }
      return kExitOk;
    }

    if (*score) {
      Mat m = io::read_matrix(score_input, io::format_from_name(score_format));
      const model::SimilarityMatrix sim(std::move(m));
      const auto lap = model::laplacian(sim);
      const auto perm = io::read_permutation(score_perm);
      if (static_cast<int>(perm.size()) != sim.n)
        throw std::invalid_argument("permutation length does not match the matrix");
      nlohmann::json j;
      const double ts = model::two_sum(lap, perm);
      j["two_sum"] = score_eq4 ? 2.0 * ts : ts;
      j["convention"] = score_eq4 ? "double_sum" : "laplacian_quadratic";
      j["r_score"] = model::r_score(model::permute(sim, perm));
      if (!score_truth.empty()) {
        const auto truth = io::read_permutation(score_truth);
        j["kendall_tau"] = model::kendall_tau(perm, truth);
        j["kendall_tau_reversed"] = model::kendall_tau(reverse_perm(perm), truth);
      }
      const std::string out = j.dump(2);
      if (score_out.empty()) std::cout << out << '\n';
      else io::write_text_file(score_out, out);
      return kExitOk;
    }

    if (*sweep) {
      std::vector<harness::ExperimentConfig> configs;
      for (uint64_t seed : sw_seeds)
        for (const auto& method : sw_methods)
          for (int c : sw_constraints)
            for (double mu : sw_mu) {
              harness::ExperimentConfig cfg;
              cfg.source = harness::source_from_name(sw_kind);
              cfg.n = sw_n;
              cfg.seed = seed;
              cfg.method = harness::method_from_name(method);
              cfg.constraint_count = c;
              cfg.mu_fraction = mu;
              cfg.trials = sw_trials;
              cfg.tol = sw_tol;
              configs.push_back(cfg);
            }
      const auto records = harness::run_sweep(configs, sw_jobs);
      std::filesystem::create_directories(sw_out_dir);
      for (size_t k = 0; k < records.size(); ++k) {
        char name[64];
        std::snprintf(name, sizeof(name), "run_%04zu.json", k);
        io::write_text_file(std::string(sw_out_dir) + "/" + name, records[k].to_json());
      }
      io::write_text_file(std::string(sw_out_dir) + "/aggregate.csv",
                          harness::results_to_csv(records));
      bool all_converged = true;
      for (const auto& r : records) all_converged = all_converged && r.solver.converged;
      return all_converged ? kExitOk : kExitSolverFailure;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolverFailure;
  }
  return kExitOk;
}
