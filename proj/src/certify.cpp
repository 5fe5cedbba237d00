#include "mra/certify.hpp"

#include <Eigen/SVD>
#include <numeric>

namespace mra {

namespace {

constexpr double kCosThreshold = 1.0 - 1e-8;
constexpr double kGapFloor = 1e-4;

std::vector<int> random_support(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = 0; i < k; ++i)
    std::swap(idx[i], idx[i + static_cast<int>(rng.uniform_index(n - i))]);
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

// Principal-angle cosines between the column spans of two orthonormal
// matrices, largest first.
template <typename Mat>
Eigen::VectorXd principal_cosines(const Mat& b1, const Mat& b2) {
  if (b1.cols() == 0 || b2.cols() == 0) return Eigen::VectorXd();
  Eigen::JacobiSVD<Mat> svd(Mat(b1.adjoint() * b2));
  return svd.singularValues();
}

// Counts principal angles with cosine within 1e-8 of 1. The rank decision is
// made on the angle sines (the singular values of the stacked orthonormal
// bases vanish with them); the reported gap is the distance of each sine from
// the decision boundary, so a genuine intersection (sine ~ 0) and a clearly
// transverse direction both leave a healthy margin, while an angle hovering
// at the boundary drives the gap toward zero.
int count_intersection(const Eigen::VectorXd& cosines, double* gap_out) {
  const double sin_threshold = std::sqrt(1.0 - kCosThreshold * kCosThreshold);
  int dim = 0;
  double gap = 1.0;
  for (int i = 0; i < cosines.size(); ++i) {
    const double c = std::min(cosines[i], 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    if (c > kCosThreshold) ++dim;
    gap = std::min(gap, std::abs(s - sin_threshold));
  }
  if (gap_out) *gap_out = gap;
  return dim;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

int intersect_span_with_support(const BlockSignal& f, const SparseBasis& basis,
                                const std::vector<int>& support, double* gap_out) {
  const int n = f.spec.total_dim();
  if (static_cast<int>(support.size()) > n)
    throw ValidationError("intersect_span_with_support: support larger than N");
  if (f.spec.field == Field::Complex) {
    const MatrixXcd span = orbit_span_basis(f);
    MatrixXcd ls(n, support.size());
    for (std::size_t i = 0; i < support.size(); ++i) ls.col(i) = basis.vectors.col(support[i]);
    return count_intersection(principal_cosines(span, ls), gap_out);
  }
  // Real-invariant: intersect over the reals in working coordinates.
  const MatrixXd span = orbit_span_basis_real(f);
  const VectorXcd phases = f.spec.coordinate_phases();
  MatrixXd ls(n, support.size());
  for (std::size_t i = 0; i < support.size(); ++i)
    for (int r = 0; r < n; ++r)
      ls(r, i) = (std::conj(phases[r]) * basis.vectors(r, support[i])).real();
  return count_intersection(principal_cosines(span, ls), gap_out);
}

Certificate certify_basis(const RepSpec& spec, const SparseBasis& basis, int K, int trials,
                          std::uint64_t seed) {
  const int n = spec.total_dim();
  if (K < 1 || K > n) throw ValidationError("certify_basis: K out of range");
  if (trials < 1) throw ValidationError("certify_basis: trials must be >= 1");
  Certificate cert;
  cert.K = K;
  cert.seed = seed;
  cert.trials = trials;
  cert.condition1_pass = true;
  cert.condition2_pass = true;
  cert.min_gap = 1.0;
  Rng root(seed, /*stream=*/0xCE27);
  for (int t = 0; t < trials; ++t) {
    Rng rng = root.derive(t);
    TrialRecord rec;
    rec.support = random_support(n, K, rng);
    BlockSignal f = random_sparse_signal_on_support(spec, basis, rec.support, rng);
    double gap1 = 1.0, gap2 = 1.0;
    rec.self_dim = intersect_span_with_support(f, basis, rec.support, &gap1);
    // A distinct support of the same size; at K = n no distinct support
    // exists and the cross check degenerates to the self check.
    if (K < n) {
      do {
        rec.other_support = random_support(n, K, rng);
      } while (rec.other_support == rec.support);
    } else {
      rec.other_support = rec.support;
    }
    rec.cross_dim = intersect_span_with_support(f, basis, rec.other_support, &gap2);
    rec.gap = std::min(gap1, gap2);
    cert.min_gap = std::min(cert.min_gap, rec.gap);
    if (rec.self_dim != 1) cert.condition1_pass = false;
    if (rec.cross_dim != 0) cert.condition2_pass = false;
    cert.records.push_back(std::move(rec));
  }
  // Either way the integer rank decisions are only trusted when every
  // principal angle cleared the threshold with margin; otherwise the sampled
  // spectra cannot distinguish an intersection from a near miss.
  if (cert.min_gap <= kGapFloor)
    cert.verdict = Verdict::Inconclusive;
  else
    cert.verdict =
        (cert.condition1_pass && cert.condition2_pass) ? Verdict::Pass : Verdict::Fail;
  return cert;
}

KSweepResult sweep_K(const RepSpec& spec, const SparseBasis& basis, int K_lo, int K_hi, int trials,
                     std::uint64_t seed) {
  if (K_lo < 1 || K_hi > spec.total_dim() || K_lo > K_hi)
    throw ValidationError("sweep_K: bad K range");
  KSweepResult out;
  for (int k = K_lo; k <= K_hi; ++k) {
    const Certificate c = certify_basis(spec, basis, k, trials, splitmix64(seed) + k);
    out.rows.push_back({k, c.verdict, c.min_gap});
    if (c.verdict == Verdict::Pass) out.largest_passing_K = k;
  }
  return out;
}

}  // namespace mra
