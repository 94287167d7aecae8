#include "snperm/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "snperm/birkhoff.hpp"
#include "snperm/frankwolfe.hpp"
#include "snperm/io.hpp"
#include "snperm/recover.hpp"
#include "snperm/snpoly.hpp"
#include "snperm/spectral.hpp"
#include "snperm/splitqp.hpp"

namespace snperm::harness {

namespace {

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Randomized rounding repeated in chunks from the incumbent best, cycling a
// small variance ladder. The first chunk perturbs the relaxed point itself.
recover::RoundResult chained_round(const std::vector<double>& relaxed, int total_trials,
                                   double variance, Rng& rng,
                                   const model::LaplacianOperator& score) {
  const int chunk = 100;
  std::vector<double> cur = recover::rescale_to_rank_range(relaxed);
  recover::RoundResult best;
  best.perm = recover::order_round(cur);
  best.two_sum = model::two_sum(score, best.perm);
  const double factors[3] = {1.0, 2.0, 0.5};
  int round = 0;
  for (int done = 0; done < total_trials; done += chunk, ++round) {
    const int k = std::min(chunk, total_trials - done);
    const auto rr = recover::sample_round(cur, k, variance * factors[round % 3], rng, score);
    if (rr.two_sum < best.two_sum) best = rr;
    cur = perm_as_vector(best.perm);
  }
  return best;
}

}  // namespace

GeneratedInstance markov_chain_cov(int n, double b, double sigma, int samples, Rng& rng) {
  if (samples < 2) throw std::invalid_argument("markov_chain_cov: need at least 2 samples");
  Mat x(samples, n);
  for (int s = 0; s < samples; ++s) {
    double prev = rng.normal(0.0, sigma);
    x(s, 0) = prev;
    for (int i = 1; i < n; ++i) {
      prev = b * prev + rng.normal(0.0, sigma);
      x(s, i) = prev;
    }
  }
  std::vector<double> mean(n, 0.0);
  for (int s = 0; s < samples; ++s)
    for (int i = 0; i < n; ++i) mean[i] += x(s, i);
  for (double& m : mean) m /= samples;
  Mat cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double c = 0.0;
      for (int s = 0; s < samples; ++s) c += (x(s, i) - mean[i]) * (x(s, j) - mean[j]);
      c /= samples - 1;
      cov(i, j) = cov(j, i) = c;
    }

  const PermutationVec truth = rng.random_permutation(n);
  Mat shuffled(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      shuffled(i, j) = std::max(0.0, cov(truth[i] - 1, truth[j] - 1));

  GeneratedInstance out;
  out.similarity = model::SimilarityMatrix(std::move(shuffled));
  out.truth = truth;
  return out;
}

GeneratedInstance consecutive_ones_instance(int rows, int cols, int block_min, int block_max,
                                            double flip_prob, Rng& rng) {
  if (block_min < 1 || block_max < block_min || block_max > rows)
    throw std::invalid_argument("consecutive_ones_instance: bad block length range");
  Mat m0(rows, cols);
  for (int c = 0; c < cols; ++c) {
    const int len = static_cast<int>(rng.uniform_int(block_min, block_max));
    const int start = static_cast<int>(rng.uniform_int(0, rows - len));
    for (int r = start; r < start + len; ++r) m0(r, c) = 1.0;
  }
  if (flip_prob > 0.0)
    for (double& v : m0.a)
      if (rng.uniform() < flip_prob) v = 1.0 - v;

  const PermutationVec truth = rng.random_permutation(rows);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = m0(truth[r] - 1, c);

  Mat sim(rows, rows);
  for (int i = 0; i < rows; ++i)
    for (int j = i; j < rows; ++j) {
      double s = 0.0;
      for (int c = 0; c < cols; ++c) s += m(i, c) * m(j, c);
      sim(i, j) = sim(j, i) = s;
    }

  GeneratedInstance out;
  out.similarity = model::SimilarityMatrix(std::move(sim));
  out.truth = truth;
  out.binary = std::move(m);
  return out;
}

GeneratedInstance pre_r_instance(int n, Rng& rng, double decay) {
  if (decay < 0.0 || decay >= 1.0)
    throw std::invalid_argument("pre_r_instance: decay must lie in [0,1)");
  Mat base(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = decay == 0.0
                           ? static_cast<double>(n - (j - i)) + rng.uniform(0.0, 0.45)
                           : n * std::pow(decay, j - i) * (1.0 + rng.uniform(0.0, 0.1));
      base(i, j) = base(j, i) = v;
    }
  const PermutationVec truth = rng.random_permutation(n);
  Mat shuffled(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) shuffled(i, j) = base(truth[i] - 1, truth[j] - 1);
  GeneratedInstance out;
  out.similarity = model::SimilarityMatrix(std::move(shuffled));
  out.truth = truth;
  return out;
}

Method method_from_name(const std::string& name) {
  if (name == "spectral") return Method::spectral;
  if (name == "fw_perm" || name == "fw-perm") return Method::fw_perm;
  if (name == "fw_birkhoff" || name == "fw-birkhoff") return Method::fw_birkhoff;
  if (name == "splitqp") return Method::splitqp;
  throw std::invalid_argument("unknown method: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::spectral: return "spectral";
    case Method::fw_perm: return "fw_perm";
    case Method::fw_birkhoff: return "fw_birkhoff";
    default: return "splitqp";
  }
}

Source source_from_name(const std::string& name) {
  if (name == "markov") return Source::markov;
  if (name == "consecutive_ones" || name == "cones") return Source::consecutive_ones;
  if (name == "pre_r" || name == "prer") return Source::pre_r;
  if (name == "file") return Source::file;
  throw std::invalid_argument("unknown source: " + name);
}

std::string source_name(Source s) {
  switch (s) {
    case Source::markov: return "markov";
    case Source::consecutive_ones: return "consecutive_ones";
    case Source::pre_r: return "pre_r";
    default: return "file";
  }
}

namespace {

ResultRecord run_pipeline(const ExperimentConfig& config, GeneratedInstance inst,
                          std::optional<PermutationVec> truth, ResultRecord rec,
                          const std::chrono::steady_clock::time_point& t_total);

}  // namespace

ResultRecord run_experiment(const ExperimentConfig& config, const model::SimilarityMatrix& a,
                            const std::optional<PermutationVec>& truth) {
  const auto t_total = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.config = config;
  GeneratedInstance inst;
  inst.similarity = a;
  if (truth.has_value()) inst.truth = *truth;
  return run_pipeline(config, std::move(inst), truth, std::move(rec), t_total);
}

ResultRecord run_experiment(const ExperimentConfig& config) {
  const auto t_total = std::chrono::steady_clock::now();
  ResultRecord rec;
  rec.config = config;
  Rng root(config.seed);
  Rng gen_rng = root.substream(1);

  // --- generate or load ---
  const auto t_gen = std::chrono::steady_clock::now();
  GeneratedInstance inst;
  std::optional<PermutationVec> truth;
  switch (config.source) {
    case Source::markov:
      inst = markov_chain_cov(config.n, config.markov_b, config.markov_sigma,
                              config.markov_samples, gen_rng);
      truth = inst.truth;
      break;
    case Source::consecutive_ones:
      inst = consecutive_ones_instance(config.cones_rows, config.cones_cols,
                                       config.cones_block_min, config.cones_block_max,
                                       config.cones_flip, gen_rng);
      truth = inst.truth;
      break;
    case Source::pre_r:
      inst = pre_r_instance(config.n, gen_rng, config.prer_decay);
      truth = inst.truth;
      break;
    case Source::file: {
      Mat m = io::read_matrix(config.input_path, io::format_from_name(config.input_format));
      if (m.rows != m.cols) {
        // 0/1 object-by-feature matrix: use M M^T.
        Mat sim(m.rows, m.rows);
        for (int i = 0; i < m.rows; ++i)
          for (int j = i; j < m.rows; ++j) {
            double s = 0.0;
            for (int c = 0; c < m.cols; ++c) s += m(i, c) * m(j, c);
            sim(i, j) = sim(j, i) = s;
          }
        inst.binary = std::move(m);
        inst.similarity = model::SimilarityMatrix(std::move(sim));
      } else {
        inst.similarity = model::SimilarityMatrix(std::move(m));
      }
      if (!config.truth_path.empty()) truth = io::read_permutation(config.truth_path);
      break;
    }
  }
  rec.seconds_generate = seconds_since(t_gen);
  return run_pipeline(config, std::move(inst), truth, std::move(rec), t_total);
}

namespace {

ResultRecord run_pipeline(const ExperimentConfig& config, GeneratedInstance inst,
                          std::optional<PermutationVec> truth, ResultRecord rec,
                          const std::chrono::steady_clock::time_point& t_total) {
  Rng root(config.seed);
  Rng constraint_rng = root.substream(2);
  Rng round_rng = root.substream(3);
  Rng gen_rng = root.substream(4);  // Birkhoff Y columns only
  const int n = inst.similarity.n;

  model::LaplacianOperator lap = model::laplacian(inst.similarity);
  const auto fied = spectral::fiedler(lap);
  lap.lambda2 = fied.lambda2;
  rec.lambda2 = fied.lambda2;
  rec.spectral_lb = model::spectral_lower_bound(lap);
  if (fied.disconnected) rec.flags.push_back("disconnected_similarity_graph");

  // Admissible regularization scale per scheme.
  birkhoff::YMatrix y = config.y_columns > 1
                            ? birkhoff::YMatrix::sorted_uniform(n, config.y_columns, gen_rng)
                            : birkhoff::YMatrix::identity_ordering(n);
  const bool matrix_scheme = config.matrix_scheme && config.method == Method::fw_birkhoff;
  rec.mu_max = matrix_scheme
                   ? birkhoff::mu_upper_bound(lap, y, birkhoff::RegScheme::matrix)
                   : fied.lambda2;
  rec.mu = config.mu_fraction * rec.mu_max;
  lap.mu = rec.mu;

  // --- side constraints ---
  model::SideConstraints side;
  if (!config.explicit_constraints.empty()) {
    side = config.explicit_constraints;
  } else if (!config.constraints_path.empty()) {
    side = io::read_constraints(config.constraints_path);
  } else if (config.constraint_count > 0) {
    if (!truth.has_value())
      throw std::invalid_argument("run_experiment: constraint sampling needs a ground truth");
    side = model::sample_ordering_constraints(*truth, config.constraint_count, constraint_rng);
  }
  if (config.method != Method::spectral && side.empty()) rec.flags.push_back("no_side_information");
  if (config.tiebreak && config.method != Method::spectral) {
    // The tiebreak only breaks the reversal symmetry; when ordering
    // constraints pin the orientation already, it must point the same way
    // or the feasible set would be empty.
    model::SideConstraint tb = model::tiebreak_constraint(n);
    if (!side.empty() && truth.has_value() && (*truth)[0] > (*truth)[n - 1]) std::swap(tb.i, tb.j);
    side.push_back(tb);
  }

  // --- solve ---
  const auto t_solve = std::chrono::steady_clock::now();
  std::vector<double> relaxed;  // length-n point to round
  switch (config.method) {
    case Method::spectral: {
      rec.solver.name = "spectral";
      rec.solver.iterations = fied.iterations;
      rec.solver.primal_residual = fied.residual;
      rec.solver.converged = fied.converged;
      rec.solver.objective = fied.lambda2;
      relaxed = fied.vector;
      break;
    }
    case Method::splitqp: {
      const auto net = config.network == sortnet::NetworkKind::bitonic
                           ? sortnet::bitonic_network(n)
                           : sortnet::odd_even_network(n);
      const auto poly = snpoly::build_polytope(net, perm_as_vector(identity_perm(n)));
      splitqp::SparseQP qp = splitqp::assemble(poly, lap, side);
      splitqp::SplitQPConfig scfg;
      scfg.eps_abs = scfg.eps_rel = config.tol;
      scfg.max_iter = config.max_iter;
      scfg.seed = config.seed;
      // Warm start from the lifted spectral ordering.
      const auto warm = spectral::spectral_order(inst.similarity);
      scfg.warm_start_x = snpoly::lift(perm_as_vector(warm.order), net, poly);
      const auto sol = splitqp::solve(qp, scfg);
      rec.solver.name = "splitqp";
      rec.solver.iterations = sol.iterations;
      rec.solver.primal_residual = sol.primal_residual;
      rec.solver.dual_residual = sol.dual_residual;
      // Standard-form 1/2 x^T(2(L-muP))x already equals x^T(L-muP)x.
      rec.solver.objective = sol.objective;
      rec.solver.converged = sol.status == splitqp::SolveStatus::solved;
      relaxed = snpoly::project_input(poly, sol.x);
      break;
    }
    case Method::fw_perm:
    case Method::fw_birkhoff: {
      model::TwoSumProblem problem{lap, side,
                                   config.method == Method::fw_birkhoff
                                       ? model::PolytopeChoice::birkhoff
                                       : model::PolytopeChoice::permutahedron};
      frankwolfe::FWConfig fcfg;
      fcfg.max_iter = config.fw_max_iter;
      fcfg.y = y;
      fcfg.scheme = matrix_scheme ? birkhoff::RegScheme::matrix : birkhoff::RegScheme::vector;
      const auto lmo = config.method == Method::fw_birkhoff
                           ? frankwolfe::LmoKind::birkhoff
                           : (config.tiebreak ? frankwolfe::LmoKind::tiebroken
                                              : frankwolfe::LmoKind::permutahedron);
      const auto tr = frankwolfe::fw_solve(problem, fcfg, lmo);
      rec.solver.name = method_name(config.method);
      rec.solver.iterations = tr.iterations;
      rec.solver.duality_gap = tr.final_point.duality_gap;
      rec.solver.primal_residual = tr.final_point.feasibility_residual;
      rec.solver.objective = tr.objective_unpenalized;
      rec.solver.converged = tr.converged;
      if (!tr.objective_convex) rec.flags.push_back("fw_gap_nonconvex");
      rec.trace.reserve(tr.rows.size());
      for (const auto& row : tr.rows) rec.trace.push_back({row.iter, row.objective, row.gap, row.seconds});
      relaxed = tr.solution_vector;
      break;
    }
  }
  rec.seconds_solve = seconds_since(t_solve);

  // --- recover ---
  const auto t_rec = std::chrono::steady_clock::now();
  model::LaplacianOperator score_lap = lap;
  score_lap.mu = 0.0;  // metrics always use the plain objective
  if (config.method == Method::spectral) {
    rec.permutation = recover::order_round(relaxed);
    rec.two_sum = model::two_sum(score_lap, rec.permutation);
  } else {
    const auto rr =
        chained_round(relaxed, config.trials, config.round_variance, round_rng, score_lap);
    rec.permutation = rr.perm;
    rec.two_sum = rr.two_sum;
  }
  rec.seconds_recover = seconds_since(t_rec);

  // --- score ---
  rec.two_sum_eq4 = 2.0 * rec.two_sum;
  rec.r_score = model::r_score(model::permute(inst.similarity, rec.permutation));
  if (truth.has_value()) {
    rec.kendall_tau = model::kendall_tau(rec.permutation, *truth);
    rec.kendall_tau_reversed = model::kendall_tau(reverse_perm(rec.permutation), *truth);
  }
  if (!rec.solver.converged) rec.flags.push_back("solver_not_converged");
  rec.seconds_total = seconds_since(t_total);
  return rec;
}

}  // namespace

std::string ResultRecord::to_json() const {
  nlohmann::json j;
  j["schema"] = "snperm/1";
  nlohmann::json c;
  c["source"] = source_name(config.source);
  c["n"] = config.n;
  c["seed"] = config.seed;
  c["constraints"] = config.constraint_count;
  c["mu_fraction"] = config.mu_fraction;
  c["method"] = method_name(config.method);
  c["network"] =
      config.network == sortnet::NetworkKind::bitonic ? "bitonic" : "odd-even";
  c["tiebreak"] = config.tiebreak;
  c["trials"] = config.trials;
  c["tol"] = config.tol;
  c["y_columns"] = config.y_columns;
  c["matrix_scheme"] = config.matrix_scheme;
  if (!config.input_path.empty()) c["input"] = config.input_path;
  j["config"] = c;
  j["two_sum"] = two_sum;
  j["two_sum_eq4"] = two_sum_eq4;
  j["r_score"] = r_score;
  if (kendall_tau.has_value()) j["kendall_tau"] = *kendall_tau;
  if (kendall_tau_reversed.has_value()) j["kendall_tau_reversed"] = *kendall_tau_reversed;
  j["spectral_lower_bound"] = spectral_lb;
  j["lambda2"] = lambda2;
  j["mu"] = mu;
  j["mu_max"] = mu_max;
  nlohmann::json s;
  s["name"] = solver.name;
  s["iterations"] = solver.iterations;
  s["primal_residual"] = solver.primal_residual;
  s["dual_residual"] = solver.dual_residual;
  s["duality_gap"] = solver.duality_gap;
  s["objective"] = solver.objective;
  s["converged"] = solver.converged;
  j["solver"] = s;
  nlohmann::json t;
  t["generate"] = seconds_generate;
  t["solve"] = seconds_solve;
  t["recover"] = seconds_recover;
  t["total"] = seconds_total;
  j["seconds"] = t;
  j["flags"] = flags;
  j["permutation"] = permutation;
  return j.dump(2);
}

RecoveryCandidate decomposition_recovery(const std::vector<double>& x,
                                         const model::LaplacianOperator& l, double tol) {
  const auto d = recover::decompose(x, tol);
  RecoveryCandidate best;
  best.two_sum = std::numeric_limits<double>::infinity();
  for (const auto& pi : d.perms) {
    const double val = model::two_sum(l, pi);
    ++best.candidates;
    if (val < best.two_sum) {
      best.two_sum = val;
      best.perm = pi;
    }
  }
  return best;
}

RecoveryCandidate birkhoff_sampling_recovery(const Mat& doubly_stochastic, int trials, Rng& rng,
                                             const model::LaplacianOperator& l) {
  if (trials < 1) throw std::invalid_argument("birkhoff_sampling_recovery: trials must be >= 1");
  const int n = doubly_stochastic.rows;
  RecoveryCandidate best;
  best.two_sum = std::numeric_limits<double>::infinity();
  std::vector<double> v(n), xv(n);
  for (int t = 0; t < trials; ++t) {
    for (double& e : v) e = rng.uniform();
    std::sort(v.begin(), v.end());
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += doubly_stochastic(i, j) * v[j];
      xv[i] = s;
    }
    const auto pi = recover::order_round(xv);
    const double val = model::two_sum(l, pi);
    ++best.candidates;
    if (val < best.two_sum) {
      best.two_sum = val;
      best.perm = pi;
    }
  }
  return best;
}

std::vector<ResultRecord> run_sweep(const std::vector<ExperimentConfig>& configs, int jobs) {
  std::vector<ResultRecord> results(configs.size());
  if (jobs < 1) jobs = 1;
  std::mutex mu;
  size_t next = 0;
  std::vector<std::string> errors;
  auto worker = [&]() {
    for (;;) {
      size_t idx;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= configs.size()) return;
        idx = next++;
      }
      try {
        ResultRecord r = run_experiment(configs[idx]);
        std::lock_guard<std::mutex> lock(mu);
        results[idx] = std::move(r);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        errors.push_back(e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (!errors.empty()) throw std::runtime_error("run_sweep: " + errors.front());
  return results;
}

std::string results_to_csv(const std::vector<ResultRecord>& records) {
  std::ostringstream os;
  os << "source,n,seed,method,network,constraints,mu_fraction,mu,two_sum,r_score,"
        "kendall_tau,kendall_tau_reversed,spectral_lower_bound,solver_objective,"
        "solver_iterations,converged,seconds_solve,seconds_total\n";
  os.precision(12);
  for (const auto& r : records) {
    os << source_name(r.config.source) << ',' << r.config.n << ',' << r.config.seed << ','
       << method_name(r.config.method) << ','
       << (r.config.network == sortnet::NetworkKind::bitonic ? "bitonic" : "odd-even") << ','
       << r.config.constraint_count << ',' << r.config.mu_fraction << ',' << r.mu << ','
       << r.two_sum << ',' << r.r_score << ','
       << (r.kendall_tau ? std::to_string(*r.kendall_tau) : "") << ','
       << (r.kendall_tau_reversed ? std::to_string(*r.kendall_tau_reversed) : "") << ','
       << r.spectral_lb << ',' << r.solver.objective << ',' << r.solver.iterations << ','
       << (r.solver.converged ? 1 : 0) << ',' << r.seconds_solve << ',' << r.seconds_total
       << '\n';
  }
  return os.str();
}

}  // namespace snperm::harness

namespace snperm::harness {

std::string trace_to_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  os << "iter,objective,gap,seconds\n";
  os.precision(12);
  for (const auto& r : rows) os << r.iter << ',' << r.objective << ',' << r.gap << ',' << r.seconds << '\n';
  return os.str();
}

}  // namespace snperm::harness
