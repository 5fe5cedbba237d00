#ifndef MRA_MODELS_HPP
#define MRA_MODELS_HPP

#include <Eigen/Geometry>
#include <functional>
#include <string>

#include "mra/moment.hpp"
#include "mra/rep.hpp"

namespace mra {

enum class ModelName { Cyclic, Dihedral, RotatedImages, Tomography2D, CryoEm };

std::string to_string(ModelName name);
ModelName model_from_string(const std::string& s);

/// A sampled group element; which members are meaningful depends on the model.
struct GroupElement {
  int shift = 0;                                       // cyclic / dihedral rotation index
  bool reflect = false;                                // dihedral
  double angle = 0;                                    // SO(2) models
  Eigen::Quaterniond rotation = Eigen::Quaterniond::Identity();  // SO(3)
};

/// A concrete MRA model: a representation spec bound to a group action,
/// an observation map, and (for projected models) the moment machinery.
struct ModelInstance {
  ModelName name = ModelName::Cyclic;
  RepSpec spec;       // spec of the signal
  RepSpec gram_spec;  // spec of the recoverable Gram moment (differs for 2-D tomography)
  int cyclic_order = 0;    // N for cyclic / dihedral
  int bandlimit = 0;       // L' for images, L for cryo-EM
  int shells = 0;          // R
  int grid = 0;            // P, azimuthal coefficients per shell (cryo-EM)
  int observation_dim = 0;

  // Cryo-EM only: maps one shell's stacked (l, m) coefficients to the P
  // Fourier coefficients of the equatorial slice.
  MatrixXcd slice_matrix;
  int slice_freq(int slot) const;  // DFT frequency of a slice slot
};

ModelInstance build_cyclic(int n);
ModelInstance build_dihedral(int n);
ModelInstance build_rotated_images(int bandlimit, int shells);
ModelInstance build_tomography_2d(int bandlimit, int shells);
ModelInstance build_cryo_em(int bandlimit, int shells, int grid = 0);  // grid 0 -> 2L+2

GroupElement sample_group(const ModelInstance& model, Rng& rng);
GroupElement identity_element(const ModelInstance& model);
GroupElement compose(const ModelInstance& model, const GroupElement& g2, const GroupElement& g1);

BlockSignal act(const ModelInstance& model, const GroupElement& g, const BlockSignal& f);

/// One observation: the acted signal pushed through the model's observation
/// map plus i.i.d. complex Gaussian coefficient noise of variance sigma^2.
VectorXcd observe(const ModelInstance& model, const BlockSignal& f, const GroupElement& g,
                  double sigma, Rng& rng);

/// Simulated batch with per-observation derived rng streams.
std::vector<VectorXcd> simulate_batch(const ModelInstance& model, const BlockSignal& f,
                                      int n, double sigma, const Rng& rng);

/// Grams actually identifiable from the model's (possibly projected) moment,
/// on gram_spec. Equals population_gram for unprojected models; for 2-D
/// tomography it is the single stacked Gram.
GramMoment model_gram(const ModelInstance& model, const BlockSignal& f);

/// Extract per-block Gram estimates from an observation-domain moment.
GramMoment project_to_grams(const MatrixXcd& moment, const ModelInstance& model);

/// Exact observation-domain population second moment (no noise term).
MatrixXcd population_moment_matrix(const ModelInstance& model, const BlockSignal& f);

/// Closed-form functional second moment m^2[r1,r2](x1, x2) on the model's
/// domain, including the paper-side 1/N_l constants so Monte-Carlo averages
/// match. Supported for RotatedImages (angles) and CryoEm (slice azimuths).
std::function<Cplx(int, int, double, double)> realize_moment_function(const ModelInstance& model,
                                                                      const BlockSignal& f);

/// Projected cryo-EM moment tabulated at Gauss-Legendre nodes in
/// u = cos(delta phi): values[r1 * R + r2][q].
struct ProjectedMomentTable {
  int shells = 0;
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
  std::vector<VectorXcd> values;
};

/// Exact table from the closed form.
ProjectedMomentTable projected_moment_table(const ModelInstance& model, const BlockSignal& f,
                                            int quad_points = 0);

/// Table estimated from an empirical observation-domain moment (cryo-EM).
ProjectedMomentTable projected_moment_table_from_moment(const ModelInstance& model,
                                                        const MatrixXcd& moment,
                                                        int quad_points = 0);

/// Recover B_l from a table of sum_l B_l P_l(u) / (4 pi) by Legendre
/// orthogonality with Gauss-Legendre quadrature.
GramMoment legendre_invert(const ProjectedMomentTable& table, int bandlimit,
                           const RepSpec& gram_spec);

/// Calibration constant of the slice addition theorem; asserted in tests
/// against a delta-in-l signal.
inline constexpr double kSliceMomentScale = 1.0 / (4.0 * M_PI);

}  // namespace mra

#endif
