#ifndef MRA_CERTIFY_HPP
#define MRA_CERTIFY_HPP

#include <vector>

#include "mra/rep.hpp"

namespace mra {

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(Verdict v);

struct TrialRecord {
  std::vector<int> support;        // S
  std::vector<int> other_support;  // S'
  int self_dim = 0;                // dim L_f ∩ L_S
  int cross_dim = 0;               // dim L_f ∩ L_S'
  double gap = 0;                  // smallest singular-value margin of the trial
};

/// Numerical certificate that (basis, K) satisfies the unique-recovery
/// intersection conditions at sampled supports.
struct Certificate {
  int K = 0;
  std::uint64_t seed = 0;
  int trials = 0;
  bool condition1_pass = false;  // self-intersection dim == 1 in every trial
  bool condition2_pass = false;  // cross intersections all trivial
  double min_gap = 0;
  Verdict verdict = Verdict::Fail;
  std::vector<TrialRecord> records;
};

/// Dimension of L_f ∩ L_S via principal angles (count of cosines above
/// 1 - 1e-8). If gap_out is given, receives the smallest distance from any
/// cosine to the threshold.
int intersect_span_with_support(const BlockSignal& f, const SparseBasis& basis,
                                const std::vector<int>& support, double* gap_out = nullptr);

Certificate certify_basis(const RepSpec& spec, const SparseBasis& basis, int K, int trials,
                          std::uint64_t seed);

struct KSweepRow {
  int K = 0;
  Verdict verdict = Verdict::Fail;
  double min_gap = 0;
};

struct KSweepResult {
  std::vector<KSweepRow> rows;
  int largest_passing_K = 0;
};

KSweepResult sweep_K(const RepSpec& spec, const SparseBasis& basis, int K_lo, int K_hi, int trials,
                     std::uint64_t seed);

}  // namespace mra

#endif
