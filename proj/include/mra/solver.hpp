#ifndef MRA_SOLVER_HPP
#define MRA_SOLVER_HPP

#include <optional>

#include "mra/moment.hpp"
#include "mra/rep.hpp"

namespace mra {

struct RecoveryOptions {
  int restarts = 25;
  int max_iters = 300;
  double tol = 1e-9;
  bool collect_trace = false;
};

struct RecoveryProblem {
  RepSpec spec;
  GramMoment grams;
  SparseBasis basis;
  int K = 0;
  RecoveryOptions options;
};

enum class SolveStatus { Converged, MaxIters, Failed };

struct TracePoint {
  int restart = 0;
  int iter = 0;
  double residual = 0;
  double violation = 0;
};

struct RecoveryResult {
  BlockSignal estimate;
  double residual = 0;            // gram_distance(population_gram(estimate), grams)
  double sparsity_violation = 0;  // l2 mass outside the best K-support in the basis
  SolveStatus status = SolveStatus::Failed;
  int restarts_used = 0;
  std::vector<TracePoint> trace;
};

/// Any orbit representative of the Gram: per block the PSD square-root
/// factor, padded to N_l rows. Throws InfeasibleGram when rank(G_l) > N_l.
BlockSignal factor_gram(const GramMoment& grams, double rank_tol = 1e-10);

/// Best rank-(<= N_l) PSD approximation of each block; use on noisy
/// empirical grams before solving.
GramMoment truncate_to_feasible(const GramMoment& grams, const RepSpec& spec);

/// Per block the unitary (orthogonal, for real-invariant specs) U_l
/// minimizing ||U_l A_l - T_l||_F, by SVD of T_l A_l^*.
AmbiguityElement block_procrustes(const BlockSignal& current, const BlockSignal& target);

/// Orthogonal projection onto the K largest-magnitude basis coefficients
/// (ties broken by lowest index), then back to block form.
BlockSignal hard_threshold(const BlockSignal& f, const SparseBasis& basis, int K);

/// l2 mass outside the K largest-magnitude coefficients in the basis.
double sparsity_violation(const BlockSignal& f, const SparseBasis& basis, int K);

/// Alternating scheme between the Gram-feasible ambiguity orbit and the
/// K-sparse union of subspaces, with annealed thresholding and restarts.
/// Every iterate satisfies the Gram constraint exactly.
RecoveryResult recover(const RecoveryProblem& problem, std::uint64_t seed);

/// Brute force over all supports via the span-intersection test; desk-scale
/// ground truth for recover. Empty when the instance is infeasible or
/// ambiguous at sparsity K.
std::optional<BlockSignal> exact_oracle(const RecoveryProblem& problem);

}  // namespace mra

#endif
