#include "mra/models.hpp"

#include "mra/wigner.hpp"

namespace mra {

std::string to_string(ModelName name) {
  switch (name) {
    case ModelName::Cyclic: return "cyclic";
    case ModelName::Dihedral: return "dihedral";
    case ModelName::RotatedImages: return "rotated_images";
    case ModelName::Tomography2D: return "tomography_2d";
    case ModelName::CryoEm: return "cryo_em";
  }
  return "?";
}

ModelName model_from_string(const std::string& s) {
  if (s == "cyclic") return ModelName::Cyclic;
  if (s == "dihedral") return ModelName::Dihedral;
  if (s == "rotated_images") return ModelName::RotatedImages;
  if (s == "tomography_2d") return ModelName::Tomography2D;
  if (s == "cryo_em") return ModelName::CryoEm;
  throw ValidationError("unknown model name: " + s);
}

int ModelInstance::slice_freq(int slot) const {
  return (slot <= grid / 2) ? slot : slot - grid;
}

ModelInstance build_cyclic(int n) {
  if (n < 1) throw ValidationError("build_cyclic: N must be >= 1");
  ModelInstance m;
  m.name = ModelName::Cyclic;
  m.cyclic_order = n;
  m.spec.field = Field::Complex;
  for (int k = 0; k < n; ++k) m.spec.blocks.push_back({1, 1, Parity::None});
  m.gram_spec = m.spec;
  m.observation_dim = n;
  return m;
}

ModelInstance build_dihedral(int n) {
  if (n < 2) throw ValidationError("build_dihedral: N must be >= 2");
  ModelInstance m;
  m.name = ModelName::Dihedral;
  m.cyclic_order = n;
  m.spec.field = Field::Complex;
  m.spec.blocks.push_back({1, 1, Parity::None});  // e_0
  for (int l = 1; l <= (n - 1) / 2; ++l) m.spec.blocks.push_back({2, 1, Parity::None});
  if (n % 2 == 0) m.spec.blocks.push_back({1, 1, Parity::None});  // e_{N/2}
  m.gram_spec = m.spec;
  m.observation_dim = n;
  return m;
}

ModelInstance build_rotated_images(int bandlimit, int shells) {
  if (bandlimit < 0 || shells < 1) throw ValidationError("build_rotated_images: bad parameters");
  ModelInstance m;
  m.name = ModelName::RotatedImages;
  m.bandlimit = bandlimit;
  m.shells = shells;
  m.spec.field = Field::Complex;
  for (int k = -bandlimit; k <= bandlimit; ++k) m.spec.blocks.push_back({1, shells, Parity::None});
  m.gram_spec = m.spec;
  m.observation_dim = (2 * bandlimit + 1) * shells;
  return m;
}

ModelInstance build_tomography_2d(int bandlimit, int shells) {
  ModelInstance m = build_rotated_images(bandlimit, shells);
  m.name = ModelName::Tomography2D;
  m.gram_spec = RepSpec{};
  m.gram_spec.field = Field::Complex;
  m.gram_spec.blocks = {{2 * bandlimit + 1, shells, Parity::None}};
  m.observation_dim = shells;
  return m;
}

ModelInstance build_cryo_em(int bandlimit, int shells, int grid) {
  if (bandlimit < 0 || shells < 1) throw ValidationError("build_cryo_em: bad parameters");
  if (grid == 0) grid = 2 * bandlimit + 2;
  if (grid < 2 * bandlimit + 1) throw ValidationError("build_cryo_em: grid must be >= 2L+1");
  ModelInstance m;
  m.name = ModelName::CryoEm;
  m.bandlimit = bandlimit;
  m.shells = shells;
  m.grid = grid;
  m.spec.field = Field::RealInvariant;
  for (int l = 0; l <= bandlimit; ++l)
    m.spec.blocks.push_back({2 * l + 1, shells, (l % 2 == 0) ? Parity::Even : Parity::Odd});
  m.gram_spec = m.spec;
  m.observation_dim = shells * grid;

  // Slice operator: real spherical harmonics sampled on the equator, pushed
  // through an exact DFT (P above Nyquist for degree-L content).
  const int ncoef = (bandlimit + 1) * (bandlimit + 1);
  MatrixXd vals(grid, ncoef);
  int col = 0;
  for (int l = 0; l <= bandlimit; ++l)
    for (int mm = -l; mm <= l; ++mm, ++col)
      for (int p = 0; p < grid; ++p)
        vals(p, col) = real_sph_harm(l, mm, M_PI / 2, 2.0 * M_PI * p / grid);
  MatrixXcd dft(grid, grid);
  for (int k = 0; k < grid; ++k)
    for (int p = 0; p < grid; ++p)
      dft(k, p) = std::exp(Cplx(0, -2.0 * M_PI * k * p / grid)) / static_cast<double>(grid);
  m.slice_matrix = dft * vals;
  return m;
}

GroupElement sample_group(const ModelInstance& model, Rng& rng) {
  GroupElement g;
  switch (model.name) {
    case ModelName::Cyclic:
      g.shift = static_cast<int>(rng.uniform_index(model.cyclic_order));
      break;
    case ModelName::Dihedral:
      g.shift = static_cast<int>(rng.uniform_index(model.cyclic_order));
      g.reflect = rng.uniform() < 0.5;
      break;
    case ModelName::RotatedImages:
    case ModelName::Tomography2D:
      g.angle = 2.0 * M_PI * rng.uniform();
      break;
    case ModelName::CryoEm: {
      Eigen::Vector4d v;
      for (int i = 0; i < 4; ++i) v[i] = rng.gaussian();
      v.normalize();
      g.rotation = Eigen::Quaterniond(v[0], v[1], v[2], v[3]);
      break;
    }
  }
  return g;
}

GroupElement identity_element(const ModelInstance&) { return GroupElement{}; }

GroupElement compose(const ModelInstance& model, const GroupElement& g2, const GroupElement& g1) {
  GroupElement g;
  switch (model.name) {
    case ModelName::Cyclic:
      g.shift = (g2.shift + g1.shift) % model.cyclic_order;
      break;
    case ModelName::Dihedral: {
      // r^{j2} s^{e2} r^{j1} s^{e1}, with s r^j = r^{-j} s.
      const int n = model.cyclic_order;
      const int j1 = g2.reflect ? (n - g1.shift) % n : g1.shift;
      g.shift = (g2.shift + j1) % n;
      g.reflect = g2.reflect != g1.reflect;
      break;
    }
    case ModelName::RotatedImages:
    case ModelName::Tomography2D:
      g.angle = std::fmod(g2.angle + g1.angle, 2.0 * M_PI);
      break;
    case ModelName::CryoEm:
      g.rotation = g2.rotation * g1.rotation;
      break;
  }
  return g;
}

BlockSignal act(const ModelInstance& model, const GroupElement& g, const BlockSignal& f) {
  if (!(model.spec == f.spec)) throw ValidationError("act: spec mismatch");
  BlockSignal out;
  out.spec = f.spec;
  out.mats = f.mats;
  switch (model.name) {
    case ModelName::Cyclic: {
      const int n = model.cyclic_order;
      for (int k = 0; k < n; ++k)
        out.mats[k] *= std::exp(Cplx(0, 2.0 * M_PI * g.shift * k / n));
      break;
    }
    case ModelName::Dihedral: {
      const int n = model.cyclic_order;
      // Reflection first: swap paired frequencies (f[i] -> f[N-i]).
      if (g.reflect) {
        for (std::size_t l = 0; l < out.mats.size(); ++l)
          if (model.spec.blocks[l].dim == 2) out.mats[l].colwise().reverseInPlace();
      }
      // Then the rotation, by frequency of each coordinate.
      int blk = 0;
      out.mats[blk] *= 1.0;  // frequency 0
      ++blk;
      for (int l = 1; l <= (n - 1) / 2; ++l, ++blk) {
        out.mats[blk](0, 0) *= std::exp(Cplx(0, 2.0 * M_PI * g.shift * l / n));
        out.mats[blk](1, 0) *= std::exp(Cplx(0, 2.0 * M_PI * g.shift * (n - l) / n));
      }
      if (n % 2 == 0)
        out.mats[blk] *= std::exp(Cplx(0, M_PI * g.shift));  // frequency N/2
      break;
    }
    case ModelName::RotatedImages:
    case ModelName::Tomography2D: {
      const int lp = model.bandlimit;
      for (int k = -lp; k <= lp; ++k)
        out.mats[k + lp] *= std::exp(Cplx(0, -g.angle * k));
      break;
    }
    case ModelName::CryoEm: {
      for (int l = 0; l <= model.bandlimit; ++l)
        out.mats[l] = wigner_real(l, g.rotation).cast<Cplx>() * f.mats[l];
      break;
    }
  }
  return out;
}

namespace {

// Per-shell coefficient stack of a cryo-EM signal (shell index 0-based).
VectorXcd shell_stack(const ModelInstance& model, const BlockSignal& f, int r) {
  const int L = model.bandlimit;
  VectorXcd x((L + 1) * (L + 1));
  int at = 0;
  for (int l = 0; l <= L; ++l)
    for (int i = 0; i < 2 * l + 1; ++i) x[at++] = f.mats[l](i, r);
  return x;
}

}  // namespace

VectorXcd observe(const ModelInstance& model, const BlockSignal& f, const GroupElement& g,
                  double sigma, Rng& rng) {
  const BlockSignal moved = act(model, g, f);
  VectorXcd y;
  switch (model.name) {
    case ModelName::Cyclic:
    case ModelName::Dihedral:
    case ModelName::RotatedImages:
      y = flatten(moved);
      break;
    case ModelName::Tomography2D: {
      y = VectorXcd::Zero(model.shells);
      for (const auto& blockRow : moved.mats) y += blockRow.transpose();
      break;
    }
    case ModelName::CryoEm: {
      y.resize(model.observation_dim);
      for (int r = 0; r < model.shells; ++r)
        y.segment(r * model.grid, model.grid) = model.slice_matrix * shell_stack(model, moved, r);
      break;
    }
  }
  if (sigma > 0)
    for (int i = 0; i < y.size(); ++i) y[i] += sigma * rng.gaussian_complex();
  return y;
}

std::vector<VectorXcd> simulate_batch(const ModelInstance& model, const BlockSignal& f, int n,
                                      double sigma, const Rng& rng) {
  if (n < 1) throw ValidationError("simulate_batch: n must be >= 1");
  std::vector<VectorXcd> out(n);
  for (int i = 0; i < n; ++i) {
    Rng stream = rng.derive(static_cast<std::uint64_t>(i));
    const GroupElement g = sample_group(model, stream);
    out[i] = observe(model, f, g, sigma, stream);
  }
  return out;
}

GramMoment model_gram(const ModelInstance& model, const BlockSignal& f) {
  if (model.name != ModelName::Tomography2D) return population_gram(f);
  // Stack the per-frequency rows into the single L x R matrix the projected
  // moment actually determines.
  const int L = 2 * model.bandlimit + 1;
  MatrixXcd a(L, model.shells);
  for (int k = 0; k < L; ++k) a.row(k) = f.mats[k];
  GramMoment g;
  g.spec = model.gram_spec;
  g.grams.push_back(a.adjoint() * a);
  return g;
}

MatrixXcd population_moment_matrix(const ModelInstance& model, const BlockSignal& f) {
  const GramMoment g = population_gram(f);
  switch (model.name) {
    case ModelName::Cyclic:
    case ModelName::Dihedral:
    case ModelName::RotatedImages: {
      const int n = model.spec.total_dim();
      MatrixXcd m = MatrixXcd::Zero(n, n);
      for (std::size_t l = 0; l < model.spec.blocks.size(); ++l) {
        const auto& b = model.spec.blocks[l];
        const int off = model.spec.block_offset(l);
        for (int i = 0; i < b.mult; ++i)
          for (int j = 0; j < b.mult; ++j)
            for (int mm = 0; mm < b.dim; ++mm)
              m(off + i * b.dim + mm, off + j * b.dim + mm) = g.grams[l](j, i) / double(b.dim);
      }
      return m;
    }
    case ModelName::Tomography2D: {
      const GramMoment gs = model_gram(model, f);
      return gs.grams[0].conjugate();
    }
    case ModelName::CryoEm: {
      const int P = model.grid;
      const int R = model.shells;
      const int L = model.bandlimit;
      MatrixXcd m = MatrixXcd::Zero(R * P, R * P);
      // T_l T_l^* per degree, with T_l the slice columns of block l.
      std::vector<MatrixXcd> tt(L + 1);
      int col = 0;
      for (int l = 0; l <= L; ++l) {
        const MatrixXcd tl = model.slice_matrix.middleCols(col, 2 * l + 1);
        tt[l] = tl * tl.adjoint();
        col += 2 * l + 1;
      }
      for (int r1 = 0; r1 < R; ++r1)
        for (int r2 = 0; r2 < R; ++r2) {
          MatrixXcd blockm = MatrixXcd::Zero(P, P);
          for (int l = 0; l <= L; ++l)
            blockm += std::conj(g.grams[l](r1, r2)) / double(2 * l + 1) * tt[l];
          m.block(r1 * P, r2 * P, P, P) = blockm;
        }
      return m;
    }
  }
  throw ValidationError("population_moment_matrix: unreachable");
}

GramMoment project_to_grams(const MatrixXcd& moment, const ModelInstance& model) {
  if (moment.rows() != model.observation_dim || moment.cols() != model.observation_dim)
    throw ValidationError("project_to_grams: moment dimension mismatch");
  GramMoment out;
  out.spec = model.gram_spec;
  switch (model.name) {
    case ModelName::Cyclic:
    case ModelName::Dihedral:
    case ModelName::RotatedImages: {
      for (std::size_t l = 0; l < model.spec.blocks.size(); ++l) {
        const auto& b = model.spec.blocks[l];
        const int off = model.spec.block_offset(l);
        MatrixXcd gl = MatrixXcd::Zero(b.mult, b.mult);
        for (int i = 0; i < b.mult; ++i)
          for (int j = 0; j < b.mult; ++j)
            for (int mm = 0; mm < b.dim; ++mm)
              gl(i, j) += moment(off + j * b.dim + mm, off + i * b.dim + mm);
        out.grams.push_back(0.5 * (gl + gl.adjoint().eval()));
      }
      return out;
    }
    case ModelName::Tomography2D: {
      const MatrixXcd gs = moment.conjugate();
      out.grams.push_back(0.5 * (gs + gs.adjoint().eval()));
      return out;
    }
    case ModelName::CryoEm: {
      const ProjectedMomentTable table = projected_moment_table_from_moment(model, moment);
      return legendre_invert(table, model.bandlimit, model.gram_spec);
    }
  }
  throw ValidationError("project_to_grams: unreachable");
}

std::function<Cplx(int, int, double, double)> realize_moment_function(const ModelInstance& model,
                                                                      const BlockSignal& f) {
  const GramMoment g = population_gram(f);
  switch (model.name) {
    case ModelName::RotatedImages: {
      const int lp = model.bandlimit;
      auto mats = f.mats;
      return [mats, lp](int r1, int r2, double t1, double t2) {
        Cplx s = 0;
        for (int k = -lp; k <= lp; ++k)
          s += mats[k + lp](0, r1) * std::conj(mats[k + lp](0, r2)) *
               std::exp(Cplx(0, k * (t1 - t2)));
        return s;
      };
    }
    case ModelName::CryoEm: {
      const int L = model.bandlimit;
      auto grams = g.grams;
      return [grams, L](int r1, int r2, double p1, double p2) {
        Cplx s = 0;
        const double u = std::cos(p1 - p2);
        for (int l = 0; l <= L; ++l)
          s += std::conj(grams[l](r1, r2)) * legendre(l, u);
        return kSliceMomentScale * s;
      };
    }
    default:
      throw ValidationError("realize_moment_function: supported for rotated_images and cryo_em");
  }
}

ProjectedMomentTable projected_moment_table(const ModelInstance& model, const BlockSignal& f,
                                            int quad_points) {
  if (model.name != ModelName::CryoEm)
    throw ValidationError("projected_moment_table: cryo_em only");
  if (quad_points == 0) quad_points = 2 * model.bandlimit + 2;
  if (quad_points < model.bandlimit + 1)
    throw ValidationError("projected_moment_table: grid too coarse for degree-2L quadrature");
  const GramMoment g = population_gram(f);
  ProjectedMomentTable t;
  t.shells = model.shells;
  gauss_legendre(quad_points, t.nodes, t.weights);
  t.values.assign(model.shells * model.shells, VectorXcd::Zero(quad_points));
  for (int r1 = 0; r1 < model.shells; ++r1)
    for (int r2 = 0; r2 < model.shells; ++r2) {
      VectorXcd v(quad_points);
      for (int q = 0; q < quad_points; ++q) {
        Cplx s = 0;
        for (int l = 0; l <= model.bandlimit; ++l)
          s += g.grams[l](r1, r2) * legendre(l, t.nodes[q]);
        v[q] = kSliceMomentScale * s;
      }
      t.values[r1 * model.shells + r2] = v;
    }
  return t;
}

ProjectedMomentTable projected_moment_table_from_moment(const ModelInstance& model,
                                                        const MatrixXcd& moment,
                                                        int quad_points) {
  if (model.name != ModelName::CryoEm)
    throw ValidationError("projected_moment_table_from_moment: cryo_em only");
  if (quad_points == 0) quad_points = 2 * model.bandlimit + 2;
  if (quad_points < model.bandlimit + 1)
    throw ValidationError("projected_moment_table_from_moment: grid too coarse");
  const int P = model.grid;
  const int R = model.shells;
  ProjectedMomentTable t;
  t.shells = R;
  gauss_legendre(quad_points, t.nodes, t.weights);
  t.values.assign(R * R, VectorXcd::Zero(quad_points));
  for (int r1 = 0; r1 < R; ++r1)
    for (int r2 = 0; r2 < R; ++r2) {
      VectorXcd v(quad_points);
      for (int q = 0; q < quad_points; ++q) {
        const double dphi = std::acos(std::clamp(t.nodes[q], -1.0, 1.0));
        Cplx s = 0;
        for (int k = 0; k < P; ++k)
          s += moment(r1 * P + k, r2 * P + k) * std::exp(Cplx(0, model.slice_freq(k) * dphi));
        // Value-domain moment is the conjugate-Gram expansion; flip back to
        // the Gram orientation used by the exact table.
        v[q] = std::conj(s);
      }
      t.values[r1 * R + r2] = v;
    }
  return t;
}

GramMoment legendre_invert(const ProjectedMomentTable& table, int bandlimit,
                           const RepSpec& gram_spec) {
  const int R = table.shells;
  if (static_cast<int>(table.values.size()) != R * R)
    throw ValidationError("legendre_invert: bad table");
  if (table.nodes.size() < bandlimit + 1)
    throw ValidationError("legendre_invert: grid too coarse for the requested bandlimit");
  GramMoment out;
  out.spec = gram_spec;
  for (int l = 0; l <= bandlimit; ++l) {
    MatrixXcd gl(R, R);
    for (int r1 = 0; r1 < R; ++r1)
      for (int r2 = 0; r2 < R; ++r2) {
        Cplx s = 0;
        for (int q = 0; q < table.nodes.size(); ++q)
          s += table.weights[q] * table.values[r1 * R + r2][q] * legendre(l, table.nodes[q]);
        gl(r1, r2) = s * ((2.0 * l + 1.0) / 2.0) / kSliceMomentScale;
      }
    out.grams.push_back(0.5 * (gl + gl.adjoint().eval()));
  }
  return out;
}

}  // namespace mra
