#include "mra/moment.hpp"

#include <Eigen/Eigenvalues>

namespace mra {

void GramMoment::validate(double tol) const {
  if (grams.size() != spec.blocks.size()) throw ValidationError("GramMoment: block count mismatch");
  for (std::size_t l = 0; l < grams.size(); ++l) {
    const auto& g = grams[l];
    if (g.rows() != spec.blocks[l].mult || g.cols() != spec.blocks[l].mult)
      throw ValidationError("GramMoment: shape mismatch at block " + std::to_string(l));
    const double gn = g.norm();
    if (gn == 0) continue;
    if ((g - g.adjoint()).norm() > tol * gn)
      throw ValidationError("GramMoment: block not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * gn)
      throw ValidationError("GramMoment: block not positive semidefinite");
  }
}

double GramMoment::norm() const {
  double s = 0;
  for (const auto& g : grams) s += g.squaredNorm();
  return std::sqrt(s);
}

GramMoment zero_gram(const RepSpec& spec) {
  GramMoment g;
  g.spec = spec;
  for (const auto& b : spec.blocks) g.grams.push_back(MatrixXcd::Zero(b.mult, b.mult));
  return g;
}

GramMoment population_gram(const BlockSignal& f) {
  GramMoment g;
  g.spec = f.spec;
  for (const auto& a : f.mats) g.grams.push_back(a.adjoint() * a);
  return g;
}

double gram_distance(const GramMoment& a, const GramMoment& b) {
  if (!(a.spec == b.spec)) throw ValidationError("gram_distance: spec mismatch");
  double s = 0;
  for (std::size_t l = 0; l < a.grams.size(); ++l) s += (a.grams[l] - b.grams[l]).squaredNorm();
  return std::sqrt(s);
}

MatrixXcd empirical_second_moment(const std::vector<VectorXcd>& samples) {
  if (samples.empty()) throw ValidationError("empirical_second_moment: empty batch");
  const auto dim = samples[0].size();
  constexpr std::size_t kChunk = 1024;
  MatrixXcd total = MatrixXcd::Zero(dim, dim);
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    MatrixXcd part = MatrixXcd::Zero(dim, dim);
    const std::size_t end = std::min(start + kChunk, samples.size());
    for (std::size_t i = start; i < end; ++i) {
      if (samples[i].size() != dim)
        throw ValidationError("empirical_second_moment: ragged batch");
      part.noalias() += samples[i] * samples[i].adjoint();
    }
    total += part;
  }
  return total / static_cast<double>(samples.size());
}

MatrixXcd debias(const MatrixXcd& moment, double sigma) {
  if (moment.rows() != moment.cols()) throw ValidationError("debias: matrix must be square");
  return moment - sigma * sigma * MatrixXcd::Identity(moment.rows(), moment.cols());
}

double invariance_check(const BlockSignal& f, int trials, Rng& rng) {
  if (trials < 1) throw ValidationError("invariance_check: trials must be >= 1");
  const GramMoment ref = population_gram(f);
  double worst = 0;
  for (int t = 0; t < trials; ++t) {
    const AmbiguityElement h = random_ambiguity(f.spec, rng);
    worst = std::max(worst, gram_distance(population_gram(apply_ambiguity(h, f)), ref));
  }
  return worst;
}

double signal_distance_up_to_phase(const BlockSignal& a, const BlockSignal& b) {
  if (!(a.spec == b.spec)) throw ValidationError("signal_distance_up_to_phase: spec mismatch");
  const VectorXcd va = flatten(a);
  const VectorXcd vb = flatten(b);
  const Cplx ip = vb.dot(va);  // <b, a>
  // Form the residual at the optimal phase directly; the expanded
  // ||a||^2 + ||b||^2 - 2|<b,a>| form loses half the digits when a ~ b.
  Cplx phase;
  if (a.spec.field == Field::Complex)
    phase = (std::abs(ip) == 0.0) ? Cplx(1, 0) : ip / std::abs(ip);
  else
    phase = (ip.real() < 0.0) ? Cplx(-1, 0) : Cplx(1, 0);
  return (va - phase * vb).norm();
}

}  // namespace mra
