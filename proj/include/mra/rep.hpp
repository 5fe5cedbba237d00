#ifndef MRA_REP_HPP
#define MRA_REP_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "mra/errors.hpp"
#include "mra/rng.hpp"

namespace mra {

using Cplx = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

enum class Field { Complex, RealInvariant };

/// Conjugation behavior of a block's coefficients in the real-invariant case:
/// Even blocks carry real entries, Odd blocks purely imaginary ones.
enum class Parity { Even, Odd, None };

struct IsotypicBlock {
  int dim = 1;    // N_l, dimension of the irreducible
  int mult = 1;   // R_l, number of copies
  Parity parity = Parity::None;
};

/// Isotypic decomposition of the representation: the list of (N_l, R_l)
/// pairs plus the field. Fixes N, M and the shape of the ambiguity group.
struct RepSpec {
  std::vector<IsotypicBlock> blocks;
  Field field = Field::Complex;

  int total_dim() const {  // N
    int n = 0;
    for (const auto& b : blocks) n += b.dim * b.mult;
    return n;
  }
  int span_cap() const {  // M = sum min(N_l R_l, N_l^2)
    int m = 0;
    for (const auto& b : blocks) m += std::min(b.dim * b.mult, b.dim * b.dim);
    return m;
  }
  int block_offset(std::size_t l) const {
    int off = 0;
    for (std::size_t i = 0; i < l; ++i) off += blocks[i].dim * blocks[i].mult;
    return off;
  }
  void validate() const;
  bool operator==(const RepSpec&) const;

  /// Unit phase of flat coordinate i: 1 for Even/None parity, i for Odd.
  /// Real-invariant signals are phase * (real vector), coordinatewise.
  VectorXcd coordinate_phases() const;
};

struct SparsityBound {
  int N = 0;
  int M = 0;
  int K_max = 0;  // N - M, may be <= 0
};

SparsityBound sparsity_bound(const RepSpec& spec);

/// A signal as the ordered tuple of N_l x R_l coefficient matrices.
struct BlockSignal {
  RepSpec spec;
  std::vector<MatrixXcd> mats;

  void validate(double tol = 1e-12) const;
  double norm() const;
};

BlockSignal zero_signal(const RepSpec& spec);

/// Element of the ambiguity group: one unitary (or real orthogonal) factor
/// per block, acting on multiplicity matrices from the left.
struct AmbiguityElement {
  RepSpec spec;
  std::vector<MatrixXcd> factors;

  void validate(double tol = 1e-12) const;
};

AmbiguityElement identity_ambiguity(const RepSpec& spec);

/// Ordered orthonormal basis of the flat coefficient space. For a
/// real-invariant spec the columns are phase-adjusted real vectors, so basis
/// coefficients of invariant signals come out real.
struct SparseBasis {
  MatrixXcd vectors;  // N x N, columns orthonormal
  Field field = Field::Complex;

  void validate(double tol = 1e-12) const;
};

SparseBasis standard_basis(const RepSpec& spec);

// Flat layout: blocks in spec order; within a block column-major
// (multiplicity index outer, row index inner). flatten/unflatten is exact.
VectorXcd flatten(const BlockSignal& f);
BlockSignal unflatten(const RepSpec& spec, const VectorXcd& v);

BlockSignal apply_ambiguity(const AmbiguityElement& h, const BlockSignal& f);

/// dim L_f = sum_l rank(A_l) * N_l with relative-threshold numerical rank.
int orbit_span_dimension(const BlockSignal& f, double rank_tol = 1e-10);

/// Orthonormal columns spanning the linear span of the ambiguity orbit of f,
/// in flat coordinates; exactly orbit_span_dimension(f) of them.
MatrixXcd orbit_span_basis(const BlockSignal& f, double rank_tol = 1e-10);

// Real working coordinates of a real-invariant spec (strip the per-coordinate
// phase). Throws for complex specs.
VectorXd to_real_coords(const RepSpec& spec, const VectorXcd& flat);
VectorXcd from_real_coords(const RepSpec& spec, const VectorXd& x);

/// orbit_span_basis expressed in real working coordinates.
MatrixXd orbit_span_basis_real(const BlockSignal& f, double rank_tol = 1e-10);

BlockSignal random_signal(const RepSpec& spec, Rng& rng);
BlockSignal random_sparse_signal(const RepSpec& spec, const SparseBasis& basis, int K, Rng& rng);
BlockSignal random_sparse_signal_on_support(const RepSpec& spec, const SparseBasis& basis,
                                            const std::vector<int>& support, Rng& rng);
AmbiguityElement random_ambiguity(const RepSpec& spec, Rng& rng);
SparseBasis random_basis(const RepSpec& spec, Rng& rng);

/// Haar-distributed unitary (QR with phase-corrected diagonal) or, for
/// real = true, Haar orthogonal.
MatrixXcd haar_unitary(int n, Rng& rng, bool real);

}  // namespace mra

#endif
