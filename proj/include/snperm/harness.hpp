#pragma once

#include <optional>
#include <string>
#include <vector>

#include "snperm/core.hpp"
#include "snperm/model.hpp"
#include "snperm/sortnet.hpp"

namespace snperm::harness {

struct GeneratedInstance {
  model::SimilarityMatrix similarity;
  PermutationVec truth;  // labeling that recovers the clean ordering
  Mat binary;            // consecutive-ones instances keep M; empty otherwise
};

// Sample covariance of `samples` independent AR(1) chains X_i = b X_{i-1} + eps,
// rows/columns shuffled by a hidden seeded permutation (returned as truth).
// Negative sampling noise is clamped to zero to keep the similarity
// nonnegative.
GeneratedInstance markov_chain_cov(int n, double b, double sigma, int samples, Rng& rng);

// Binary matrix whose columns hold contiguous 1-blocks (before noise), row
// order shuffled; the similarity is M M^T. flip_prob flips entries i.i.d.
GeneratedInstance consecutive_ones_instance(int rows, int cols, int block_min, int block_max,
                                            double flip_prob, Rng& rng);

// Noiseless shuffled staircase with a small jitter keeping all entries
// distinct. decay = 0 gives the linear profile n - |i-j|; decay in (0,1)
// gives the geometric profile n * decay^|i-j|, whose wider spectral gaps
// suit the regularized relaxations.
GeneratedInstance pre_r_instance(int n, Rng& rng, double decay = 0.0);

enum class Method { spectral, fw_perm, fw_birkhoff, splitqp };
enum class Source { markov, consecutive_ones, pre_r, file };

Method method_from_name(const std::string& name);
std::string method_name(Method m);
Source source_from_name(const std::string& name);
std::string source_name(Source s);

struct ExperimentConfig {
  Source source = Source::markov;
  int n = 50;
  uint64_t seed = 1;
  int constraint_count = 0;
  double mu_fraction = 0.0;  // fraction of the scheme's admissible maximum
  Method method = Method::splitqp;
  sortnet::NetworkKind network = sortnet::NetworkKind::bitonic;
  bool tiebreak = true;   // ignored by the spectral method
  int trials = 100;       // rounding trials
  double round_variance = 0.5;
  double tol = 1e-6;      // solver tolerance
  int max_iter = 50000;
  int fw_max_iter = 2000;
  // Birkhoff variant.
  int y_columns = 1;           // p; columns are sorted uniform when p > 1
  bool matrix_scheme = false;  // matrix-based instead of vector-based penalty
  // Generator knobs.
  double markov_b = 0.999;
  double markov_sigma = 0.5;
  int markov_samples = 50;
  int cones_rows = 59;
  int cones_cols = 70;
  int cones_block_min = 3;
  int cones_block_max = 12;
  double cones_flip = 0.02;
  double prer_decay = 0.0;
  // Explicit side rows (used instead of sampling when non-empty).
  model::SideConstraints explicit_constraints;
  // File source.
  std::string input_path;
  std::string input_format;  // "", "mm", "mm-array", "csv", "bin01"
  std::string truth_path;
  std::string constraints_path;
};

struct SolverInfo {
  std::string name;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
  double objective = 0.0;  // relaxation objective (regularized)
  bool converged = true;
};

struct TraceRow {
  int iter = 0;
  double objective = 0.0;
  double gap = 0.0;
  double seconds = 0.0;
};

struct ResultRecord {
  ExperimentConfig config;
  PermutationVec permutation;
  double two_sum = 0.0;      // pi^T L pi convention
  double two_sum_eq4 = 0.0;  // doubled, double-sum convention
  int r_score = 0;
  std::optional<double> kendall_tau;
  std::optional<double> kendall_tau_reversed;
  double spectral_lb = 0.0;
  double lambda2 = 0.0;
  double mu = 0.0;
  double mu_max = 0.0;
  SolverInfo solver;
  std::vector<TraceRow> trace;  // per-iteration rows (Frank-Wolfe methods)
  double seconds_generate = 0.0;
  double seconds_solve = 0.0;
  double seconds_recover = 0.0;
  double seconds_total = 0.0;
  std::vector<std::string> flags;

  std::string to_json() const;  // schema "snperm/1"
};

ResultRecord run_experiment(const ExperimentConfig& config);

// Same pipeline on an in-memory instance (used by the bindings).
ResultRecord run_experiment(const ExperimentConfig& config, const model::SimilarityMatrix& a,
                            const std::optional<PermutationVec>& truth);

// Comparison experiments, not default pipeline stages: score the terms of a
// convex decomposition of x, or sample orderings of X v for random sorted v
// from a doubly stochastic X. Both return the best 2-SUM candidate found.
struct RecoveryCandidate {
  PermutationVec perm;
  double two_sum = 0.0;
  int candidates = 0;
};

RecoveryCandidate decomposition_recovery(const std::vector<double>& x,
                                         const model::LaplacianOperator& l, double tol = 1e-8);

RecoveryCandidate birkhoff_sampling_recovery(const Mat& doubly_stochastic, int trials, Rng& rng,
                                             const model::LaplacianOperator& l);

std::string trace_to_csv(const std::vector<TraceRow>& rows);

// Independent runs on a small worker pool; results land in input order.
std::vector<ResultRecord> run_sweep(const std::vector<ExperimentConfig>& configs, int jobs);

std::string results_to_csv(const std::vector<ResultRecord>& records);

}  // namespace snperm::harness
