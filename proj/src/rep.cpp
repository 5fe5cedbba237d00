#include "mra/rep.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <numeric>

namespace mra {

void RepSpec::validate() const {
  if (blocks.empty()) throw ValidationError("RepSpec: no blocks");
  for (const auto& b : blocks) {
    if (b.dim < 1 || b.mult < 1) throw ValidationError("RepSpec: dim and mult must be >= 1");
    if (field == Field::RealInvariant && b.parity == Parity::None)
      throw ValidationError("RepSpec: real-invariant spec needs a parity on every block");
  }
}

bool RepSpec::operator==(const RepSpec& o) const {
  if (field != o.field || blocks.size() != o.blocks.size()) return false;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].dim != o.blocks[i].dim || blocks[i].mult != o.blocks[i].mult ||
        blocks[i].parity != o.blocks[i].parity)
      return false;
  }
  return true;
}

VectorXcd RepSpec::coordinate_phases() const {
  VectorXcd p(total_dim());
  int at = 0;
  for (const auto& b : blocks) {
    const Cplx ph = (b.parity == Parity::Odd) ? Cplx(0, 1) : Cplx(1, 0);
    for (int i = 0; i < b.dim * b.mult; ++i) p[at++] = ph;
  }
  return p;
}

SparsityBound sparsity_bound(const RepSpec& spec) {
  SparsityBound r;
  r.N = spec.total_dim();
  r.M = spec.span_cap();
  r.K_max = r.N - r.M;
  return r;
}

void BlockSignal::validate(double tol) const {
  spec.validate();
  if (mats.size() != spec.blocks.size()) throw ValidationError("BlockSignal: block count mismatch");
  for (std::size_t l = 0; l < mats.size(); ++l) {
    if (mats[l].rows() != spec.blocks[l].dim || mats[l].cols() != spec.blocks[l].mult)
      throw ValidationError("BlockSignal: matrix shape mismatch at block " + std::to_string(l));
    if (spec.field == Field::RealInvariant) {
      const bool even = spec.blocks[l].parity == Parity::Even;
      const double off = even ? mats[l].imag().cwiseAbs().maxCoeff()
                              : mats[l].real().cwiseAbs().maxCoeff();
      if (off > tol)
        throw ValidationError("BlockSignal: parity constraint violated at block " + std::to_string(l));
    }
  }
}

double BlockSignal::norm() const {
  double s = 0;
  for (const auto& m : mats) s += m.squaredNorm();
  return std::sqrt(s);
}

BlockSignal zero_signal(const RepSpec& spec) {
  BlockSignal f;
  f.spec = spec;
  for (const auto& b : spec.blocks) f.mats.push_back(MatrixXcd::Zero(b.dim, b.mult));
  return f;
}

void AmbiguityElement::validate(double tol) const {
  if (factors.size() != spec.blocks.size())
    throw ValidationError("AmbiguityElement: factor count mismatch");
  for (std::size_t l = 0; l < factors.size(); ++l) {
    const int n = spec.blocks[l].dim;
    if (factors[l].rows() != n || factors[l].cols() != n)
      throw ValidationError("AmbiguityElement: factor shape mismatch");
    const double dev = (factors[l].adjoint() * factors[l] - MatrixXcd::Identity(n, n)).norm();
    if (dev > tol * std::sqrt(static_cast<double>(n)))
      throw ValidationError("AmbiguityElement: factor not unitary");
    if (spec.field == Field::RealInvariant && factors[l].imag().cwiseAbs().maxCoeff() > tol)
      throw ValidationError("AmbiguityElement: factor must be real orthogonal");
  }
}

AmbiguityElement identity_ambiguity(const RepSpec& spec) {
  AmbiguityElement h;
  h.spec = spec;
  for (const auto& b : spec.blocks) h.factors.push_back(MatrixXcd::Identity(b.dim, b.dim));
  return h;
}

void SparseBasis::validate(double tol) const {
  const auto n = vectors.rows();
  if (vectors.cols() != n) throw ValidationError("SparseBasis: matrix must be square");
  const double dev = (vectors.adjoint() * vectors - MatrixXcd::Identity(n, n)).norm();
  if (dev > tol * std::sqrt(static_cast<double>(n)))
    throw ValidationError("SparseBasis: columns not orthonormal");
}

SparseBasis standard_basis(const RepSpec& spec) {
  SparseBasis b;
  const int n = spec.total_dim();
  b.vectors = MatrixXcd::Identity(n, n);
  b.field = spec.field;
  if (spec.field == Field::RealInvariant)
    b.vectors = spec.coordinate_phases().asDiagonal() * b.vectors;
  return b;
}

VectorXcd flatten(const BlockSignal& f) {
  VectorXcd v(f.spec.total_dim());
  int at = 0;
  for (const auto& m : f.mats) {
    for (int c = 0; c < m.cols(); ++c)
      for (int r = 0; r < m.rows(); ++r) v[at++] = m(r, c);
  }
  return v;
}

BlockSignal unflatten(const RepSpec& spec, const VectorXcd& v) {
  if (v.size() != spec.total_dim()) throw ValidationError("unflatten: length mismatch");
  BlockSignal f;
  f.spec = spec;
  int at = 0;
  for (const auto& b : spec.blocks) {
    MatrixXcd m(b.dim, b.mult);
    for (int c = 0; c < b.mult; ++c)
      for (int r = 0; r < b.dim; ++r) m(r, c) = v[at++];
    f.mats.push_back(std::move(m));
  }
  return f;
}

BlockSignal apply_ambiguity(const AmbiguityElement& h, const BlockSignal& f) {
  if (!(h.spec == f.spec)) throw ValidationError("apply_ambiguity: spec mismatch");
  h.validate();
  BlockSignal out;
  out.spec = f.spec;
  for (std::size_t l = 0; l < f.mats.size(); ++l) out.mats.push_back(h.factors[l] * f.mats[l]);
  return out;
}

namespace {

int numerical_rank(const Eigen::JacobiSVD<MatrixXcd>& svd, double rank_tol) {
  if (svd.singularValues().size() == 0) return 0;
  const double top = svd.singularValues()[0];
  if (top == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > rank_tol * top) ++r;
  return r;
}

}  // namespace

int orbit_span_dimension(const BlockSignal& f, double rank_tol) {
  int d = 0;
  for (std::size_t l = 0; l < f.mats.size(); ++l) {
    Eigen::JacobiSVD<MatrixXcd> svd(f.mats[l]);
    d += numerical_rank(svd, rank_tol) * f.spec.blocks[l].dim;
  }
  return d;
}

// The span of {U A} over the unitary group is {W V_r^* : W arbitrary}, with
// V_r the leading right singular vectors of A. An orthonormal basis is
// e_i v_j^* over rows i and j <= rank.
MatrixXcd orbit_span_basis(const BlockSignal& f, double rank_tol) {
  const int N = f.spec.total_dim();
  const int D = orbit_span_dimension(f, rank_tol);
  MatrixXcd out = MatrixXcd::Zero(N, D);
  int col = 0;
  for (std::size_t l = 0; l < f.mats.size(); ++l) {
    const auto& b = f.spec.blocks[l];
    Eigen::JacobiSVD<MatrixXcd> svd(f.mats[l], Eigen::ComputeThinV);
    const int r = numerical_rank(svd, rank_tol);
    const int off = f.spec.block_offset(l);
    for (int j = 0; j < r; ++j) {
      const VectorXcd v = svd.matrixV().col(j);
      for (int i = 0; i < b.dim; ++i) {
        // Block matrix e_i v_j^*, flattened column-major at the block offset.
        for (int c = 0; c < b.mult; ++c) out(off + c * b.dim + i, col) = std::conj(v[c]);
        ++col;
      }
    }
  }
  return out;
}

VectorXd to_real_coords(const RepSpec& spec, const VectorXcd& flat) {
  if (spec.field != Field::RealInvariant)
    throw ValidationError("to_real_coords: spec is not real-invariant");
  const VectorXcd p = spec.coordinate_phases();
  VectorXd x(flat.size());
  for (int i = 0; i < flat.size(); ++i) x[i] = (std::conj(p[i]) * flat[i]).real();
  return x;
}

VectorXcd from_real_coords(const RepSpec& spec, const VectorXd& x) {
  if (spec.field != Field::RealInvariant)
    throw ValidationError("from_real_coords: spec is not real-invariant");
  const VectorXcd p = spec.coordinate_phases();
  VectorXcd f(x.size());
  for (int i = 0; i < x.size(); ++i) f[i] = p[i] * x[i];
  return f;
}

MatrixXd orbit_span_basis_real(const BlockSignal& f, double rank_tol) {
  if (f.spec.field != Field::RealInvariant)
    throw ValidationError("orbit_span_basis_real: spec is not real-invariant");
  const int N = f.spec.total_dim();
  const int D = orbit_span_dimension(f, rank_tol);
  MatrixXd out = MatrixXd::Zero(N, D);
  int col = 0;
  for (std::size_t l = 0; l < f.mats.size(); ++l) {
    const auto& b = f.spec.blocks[l];
    // Working-coordinate block matrix: strip the parity phase.
    const MatrixXd a = (b.parity == Parity::Odd) ? MatrixXd(f.mats[l].imag())
                                                 : MatrixXd(f.mats[l].real());
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeThinV);
    int r = 0;
    if (svd.singularValues().size() > 0 && svd.singularValues()[0] > 0) {
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > rank_tol * svd.singularValues()[0]) ++r;
    }
    const int off = f.spec.block_offset(l);
    for (int j = 0; j < r; ++j) {
      const VectorXd v = svd.matrixV().col(j);
      for (int i = 0; i < b.dim; ++i) {
        for (int c = 0; c < b.mult; ++c) out(off + c * b.dim + i, col) = v[c];
        ++col;
      }
    }
  }
  return out;
}

BlockSignal random_signal(const RepSpec& spec, Rng& rng) {
  spec.validate();
  BlockSignal f;
  f.spec = spec;
  for (const auto& b : spec.blocks) {
    MatrixXcd m(b.dim, b.mult);
    for (int c = 0; c < b.mult; ++c)
      for (int r = 0; r < b.dim; ++r) {
        if (spec.field == Field::Complex) {
          m(r, c) = rng.gaussian_complex();
        } else {
          const double g = rng.gaussian();
          m(r, c) = (b.parity == Parity::Odd) ? Cplx(0, g) : Cplx(g, 0);
        }
      }
    f.mats.push_back(std::move(m));
  }
  return f;
}

BlockSignal random_sparse_signal(const RepSpec& spec, const SparseBasis& basis, int K, Rng& rng) {
  const int N = spec.total_dim();
  if (K < 1 || K > N) throw ValidationError("random_sparse_signal: K out of range");
  // Uniform size-K support via partial Fisher-Yates.
  std::vector<int> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < K; ++i)
    std::swap(idx[i], idx[i + static_cast<int>(rng.uniform_index(N - i))]);
  idx.resize(K);
  return random_sparse_signal_on_support(spec, basis, idx, rng);
}

BlockSignal random_sparse_signal_on_support(const RepSpec& spec, const SparseBasis& basis,
                                            const std::vector<int>& support, Rng& rng) {
  const int N = spec.total_dim();
  VectorXcd coeffs = VectorXcd::Zero(N);
  for (int i : support) {
    if (i < 0 || i >= N) throw ValidationError("random_sparse_signal_on_support: bad index");
    coeffs[i] = (spec.field == Field::Complex) ? rng.gaussian_complex() : Cplx(rng.gaussian(), 0);
  }
  return unflatten(spec, basis.vectors * coeffs);
}

MatrixXcd haar_unitary(int n, Rng& rng, bool real) {
  if (real) {
    MatrixXd g(n, n);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) g(r, c) = rng.gaussian();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, n);
    MatrixXd rmat = q.transpose() * g;
    for (int c = 0; c < n; ++c)
      if (rmat(c, c) < 0) q.col(c) = -q.col(c);
    return q.cast<Cplx>();
  }
  MatrixXcd g(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) g(r, c) = rng.gaussian_complex();
  Eigen::HouseholderQR<MatrixXcd> qr(g);
  MatrixXcd q = qr.householderQ() * MatrixXcd::Identity(n, n);
  MatrixXcd rmat = q.adjoint() * g;
  for (int c = 0; c < n; ++c) {
    const Cplx d = rmat(c, c);
    const double a = std::abs(d);
    if (a > 0) q.col(c) *= d / a;
  }
  return q;
}

AmbiguityElement random_ambiguity(const RepSpec& spec, Rng& rng) {
  AmbiguityElement h;
  h.spec = spec;
  const bool real = spec.field == Field::RealInvariant;
  for (const auto& b : spec.blocks) h.factors.push_back(haar_unitary(b.dim, rng, real));
  return h;
}

SparseBasis random_basis(const RepSpec& spec, Rng& rng) {
  SparseBasis b;
  const int n = spec.total_dim();
  b.field = spec.field;
  if (spec.field == Field::Complex) {
    b.vectors = haar_unitary(n, rng, false);
  } else {
    b.vectors = spec.coordinate_phases().asDiagonal() * haar_unitary(n, rng, true);
  }
  return b;
}

}  // namespace mra
