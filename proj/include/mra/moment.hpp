#ifndef MRA_MOMENT_HPP
#define MRA_MOMENT_HPP

#include <vector>

#include "mra/rep.hpp"

namespace mra {

/// The second moment as the tuple of R_l x R_l Hermitian Gram matrices
/// G_l = A_l^* A_l (paper-side normalization constants are reinserted only
/// where functional moments need them).
struct GramMoment {
  RepSpec spec;
  std::vector<MatrixXcd> grams;

  void validate(double tol = 1e-10) const;
  double norm() const;
};

GramMoment zero_gram(const RepSpec& spec);

/// G_l[i,j] = <column i of A_l, column j of A_l>. Exact, no Monte-Carlo.
GramMoment population_gram(const BlockSignal& f);

/// sqrt(sum_l ||G_l^a - G_l^b||_F^2).
double gram_distance(const GramMoment& a, const GramMoment& b);

/// (1/n) sum y_i y_i^*, accumulated in fixed 1024-sample chunks so the
/// result is bit-reproducible regardless of how work is split.
MatrixXcd empirical_second_moment(const std::vector<VectorXcd>& samples);

/// Subtract the additive noise term sigma^2 I.
MatrixXcd debias(const MatrixXcd& moment, double sigma);

/// Max over `trials` random ambiguity elements of the Gram distance between
/// population_gram(h f) and population_gram(f).
double invariance_check(const BlockSignal& f, int trials, Rng& rng);

/// Flat l2 distance minimized over a global phase (complex field) or a
/// global sign (real-invariant field).
double signal_distance_up_to_phase(const BlockSignal& a, const BlockSignal& b);

}  // namespace mra

#endif
