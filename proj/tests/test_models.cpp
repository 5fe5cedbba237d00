#include <doctest.h>

#include <cmath>

#include "mra/models.hpp"
#include "mra/moment.hpp"

using namespace mra;

TEST_CASE("model builders produce the documented decompositions") {
  SUBCASE("cyclic") {
    const ModelInstance m = build_cyclic(4);
    REQUIRE(m.spec.blocks.size() == 4);
    for (const auto& b : m.spec.blocks) {
      CHECK(b.dim == 1);
      CHECK(b.mult == 1);
    }
    CHECK(m.spec.total_dim() == 4);
    CHECK(m.observation_dim == 4);
  }
  SUBCASE("dihedral even order") {
    const ModelInstance m = build_dihedral(6);
    std::vector<int> dims;
    for (const auto& b : m.spec.blocks) dims.push_back(b.dim);
    CHECK(dims == std::vector<int>{1, 2, 2, 1});
    CHECK(m.spec.total_dim() == 6);
  }
  SUBCASE("dihedral odd order") {
    const ModelInstance m = build_dihedral(5);
    std::vector<int> dims;
    for (const auto& b : m.spec.blocks) dims.push_back(b.dim);
    CHECK(dims == std::vector<int>{1, 2, 2});
  }
  SUBCASE("rotated images") {
    const ModelInstance m = build_rotated_images(2, 4);
    CHECK(m.spec.blocks.size() == 5);
    for (const auto& b : m.spec.blocks) {
      CHECK(b.dim == 1);
      CHECK(b.mult == 4);
    }
  }
  SUBCASE("cryo shell model") {
    const ModelInstance m = build_cryo_em(4, 9);
    CHECK(m.spec.total_dim() == 225);
    CHECK(m.spec.field == Field::RealInvariant);
    for (int l = 0; l <= 4; ++l) {
      CHECK(m.spec.blocks[l].dim == 2 * l + 1);
      CHECK(m.spec.blocks[l].mult == 9);
      CHECK(m.spec.blocks[l].parity == (l % 2 == 0 ? Parity::Even : Parity::Odd));
    }
    CHECK(m.grid == 10);  // default 2L+2
  }
  SUBCASE("invalid parameters rejected") {
    CHECK_THROWS_AS(build_cyclic(0), ValidationError);
    CHECK_THROWS_AS(build_cryo_em(2, 3, 3), ValidationError);  // grid below 2L+1
  }
}

TEST_CASE("group sampling is uniform and reproducible") {
  SUBCASE("cyclic shift frequencies") {
    const ModelInstance m = build_cyclic(4);
    Rng rng(71, 0);
    int counts[4] = {0, 0, 0, 0};
    const int n = 10000;
    for (int i = 0; i < n; ++i) ++counts[sample_group(m, rng).shift];
    for (int c : counts) CHECK(std::abs(c / double(n) - 0.25) < 0.02);
  }
  SUBCASE("so3 rotations average to zero") {
    const ModelInstance m = build_cryo_em(1, 1);
    Rng rng(72, 0);
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += sample_group(m, rng).rotation.toRotationMatrix();
    CHECK((acc / n).cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("fixed seed reproduces the sample") {
    const ModelInstance m = build_dihedral(6);
    Rng a(73, 0), b(73, 0);
    const GroupElement ga = sample_group(m, a);
    const GroupElement gb = sample_group(m, b);
    CHECK(ga.shift == gb.shift);
    CHECK(ga.reflect == gb.reflect);
  }
}

TEST_CASE("group actions") {
  SUBCASE("identity acts trivially on every model") {
    for (const ModelInstance& m :
         {build_cyclic(5), build_dihedral(6), build_rotated_images(2, 3), build_cryo_em(2, 2)}) {
      Rng rng(74, 0);
      const BlockSignal f = random_signal(m.spec, rng);
      const BlockSignal g = act(m, identity_element(m), f);
      CHECK(signal_distance_up_to_phase(f, g) < 1e-12);
    }
  }
  SUBCASE("cyclic action multiplies block k by the k-th root power") {
    const ModelInstance m = build_cyclic(4);
    BlockSignal f = zero_signal(m.spec);
    for (int k = 0; k < 4; ++k) f.mats[k](0, 0) = 1.0;
    GroupElement g = identity_element(m);
    g.shift = 1;
    const BlockSignal out = act(m, g, f);
    const Cplx i(0, 1);
    CHECK(std::abs(out.mats[0](0, 0) - Cplx(1, 0)) < 1e-14);
    CHECK(std::abs(out.mats[1](0, 0) - i) < 1e-14);
    CHECK(std::abs(out.mats[2](0, 0) - Cplx(-1, 0)) < 1e-14);
    CHECK(std::abs(out.mats[3](0, 0) - (-i)) < 1e-14);
  }
  SUBCASE("actions are norm preserving") {
    for (const ModelInstance& m :
         {build_cyclic(5), build_dihedral(7), build_rotated_images(2, 3), build_cryo_em(3, 2)}) {
      Rng rng(75, 0);
      const BlockSignal f = random_signal(m.spec, rng);
      const GroupElement g = sample_group(m, rng);
      CHECK(act(m, g, f).norm() == doctest::Approx(f.norm()).epsilon(1e-10));
    }
  }
  SUBCASE("actions compose") {
    for (const ModelInstance& m :
         {build_cyclic(6), build_dihedral(6), build_dihedral(5), build_rotated_images(1, 2),
          build_cryo_em(2, 2)}) {
      Rng rng(76, 0);
      const BlockSignal f = random_signal(m.spec, rng);
      for (int t = 0; t < 10; ++t) {
        const GroupElement g1 = sample_group(m, rng);
        const GroupElement g2 = sample_group(m, rng);
        const BlockSignal lhs = act(m, g2, act(m, g1, f));
        const BlockSignal rhs = act(m, compose(m, g2, g1), f);
        CHECK(signal_distance_up_to_phase(lhs, rhs) < 1e-10 * f.norm());
      }
    }
  }
  SUBCASE("dihedral reflection satisfies s r s = r inverse") {
    const ModelInstance m = build_dihedral(6);
    Rng rng(77, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    GroupElement r = identity_element(m);
    r.shift = 1;
    GroupElement s = identity_element(m);
    s.reflect = true;
    GroupElement rinv = identity_element(m);
    rinv.shift = 5;
    const BlockSignal lhs = act(m, s, act(m, r, act(m, s, f)));
    const BlockSignal rhs = act(m, rinv, f);
    CHECK(signal_distance_up_to_phase(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("observation maps") {
  SUBCASE("noiseless identity observation of the cyclic model is the flat signal") {
    const ModelInstance m = build_cyclic(5);
    Rng rng(78, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const VectorXcd y = observe(m, f, identity_element(m), 0.0, rng);
    CHECK((y - flatten(f)).norm() < 1e-14);
  }
  SUBCASE("cryo slice observation never gains energy") {
    const ModelInstance m = build_cryo_em(3, 4);
    Rng rng(79, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const VectorXcd y = observe(m, f, identity_element(m), 0.0, rng);
    CHECK(y.size() == m.observation_dim);
    CHECK(y.norm() <= f.norm() * (1 + 1e-10));
  }
  SUBCASE("pure noise has the configured variance") {
    const ModelInstance m = build_cyclic(4);
    const BlockSignal f = zero_signal(m.spec);
    Rng rng(80, 0);
    double acc = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += observe(m, f, identity_element(m), 1.0, rng).squaredNorm();
    CHECK(acc / (4.0 * n) == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("simulate_batch is deterministic and stream-split") {
    const ModelInstance m = build_cyclic(4);
    Rng rng(81, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const auto b1 = simulate_batch(m, f, 16, 0.5, Rng(5, 1));
    const auto b2 = simulate_batch(m, f, 16, 0.5, Rng(5, 1));
    for (int i = 0; i < 16; ++i) CHECK((b1[i] - b2[i]).norm() == 0.0);
  }
}

TEST_CASE("exact population moments project back to the gram") {
  Rng rng(82, 0);
  for (const ModelInstance& m :
       {build_cyclic(6), build_dihedral(6), build_rotated_images(2, 3), build_tomography_2d(1, 3),
        build_cryo_em(2, 3)}) {
    const BlockSignal f = random_signal(m.spec, rng);
    const GramMoment truth = model_gram(m, f);
    const GramMoment rec = project_to_grams(population_moment_matrix(m, f), m);
    CHECK(gram_distance(rec, truth) < 1e-8 * std::max(1.0, truth.norm()));
  }
}

TEST_CASE("cyclic grams are the power spectrum") {
  const ModelInstance m = build_cyclic(6);
  Rng rng(83, 0);
  const BlockSignal f = random_signal(m.spec, rng);
  const GramMoment g = project_to_grams(population_moment_matrix(m, f), m);
  for (int k = 0; k < 6; ++k)
    CHECK(std::abs(g.grams[k](0, 0) - Cplx(std::norm(f.mats[k](0, 0)), 0)) < 1e-12);
}

TEST_CASE("rotated-images grams are rank one") {
  const ModelInstance m = build_rotated_images(2, 4);
  Rng rng(84, 0);
  const BlockSignal f = random_signal(m.spec, rng);
  const GramMoment g = project_to_grams(population_moment_matrix(m, f), m);
  for (const auto& gram : g.grams) {
    Eigen::JacobiSVD<MatrixXcd> svd(gram);
    CHECK(svd.singularValues()[0] > 1e-8);
    for (int i = 1; i < svd.singularValues().size(); ++i)
      CHECK(svd.singularValues()[i] < 1e-10 * svd.singularValues()[0]);
  }
}

TEST_CASE("functional second moments") {
  SUBCASE("rotated-images moment depends only on the angle difference") {
    const ModelInstance m = build_rotated_images(2, 3);
    Rng rng(85, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const auto m2 = realize_moment_function(m, f);
    for (double c : {0.3, 1.7, -2.0})
      CHECK(std::abs(m2(0, 2, 0.4, 1.1) - m2(0, 2, 0.4 + c, 1.1 + c)) < 1e-12);
  }
  SUBCASE("monte-carlo average matches the closed form (rotated images)") {
    const ModelInstance m = build_rotated_images(1, 2);
    Rng rng(86, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const auto m2 = realize_moment_function(m, f);
    const double t1 = 0.9, t2 = 2.4;
    Cplx acc = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const GroupElement g = sample_group(m, rng);
      // functional value at angle theta of shell r: sum_k a'_{k,r} e^{i k theta}
      const BlockSignal fg = act(m, g, f);
      Cplx v1 = 0, v2 = 0;
      for (std::size_t b = 0; b < fg.mats.size(); ++b) {
        const int k = static_cast<int>(b) - m.bandlimit;
        v1 += fg.mats[b](0, 0) * std::exp(Cplx(0, 1) * (k * t1));
        v2 += fg.mats[b](0, 1) * std::exp(Cplx(0, 1) * (k * t2));
      }
      acc += v1 * std::conj(v2);
    }
    acc /= n;
    CHECK(std::abs(acc - m2(0, 1, t1, t2)) < 0.01 * std::abs(m2(0, 1, t1, t2)) + 0.01);
  }
  SUBCASE("cryo moment of an l=0-only signal is constant") {
    const ModelInstance m = build_cryo_em(2, 2);
    BlockSignal f = zero_signal(m.spec);
    f.mats[0](0, 0) = 1.3;
    f.mats[0](0, 1) = -0.4;
    const auto m2 = realize_moment_function(m, f);
    const Cplx base = m2(0, 1, 0.0, 0.0);
    for (double d : {0.5, 1.9, 4.4}) CHECK(std::abs(m2(0, 1, 0.2, 0.2 + d) - base) < 1e-12);
    // calibration: constant equals the slice-moment scale times the gram entry
    CHECK(std::abs(base - kSliceMomentScale * Cplx(1.3 * -0.4, 0)) < 1e-12);
  }
}

TEST_CASE("legendre inversion of the projected cryo moment") {
  SUBCASE("exact table round trip") {
    const ModelInstance m = build_cryo_em(2, 3);
    Rng rng(87, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const GramMoment truth = population_gram(f);
    const GramMoment rec = legendre_invert(projected_moment_table(m, f), m.bandlimit, m.gram_spec);
    CHECK(gram_distance(rec, truth) < 1e-8);
  }
  SUBCASE("grid too coarse is rejected") {
    const ModelInstance m = build_cryo_em(2, 2);
    Rng rng(88, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    CHECK_THROWS_AS(projected_moment_table(m, f, 2), ValidationError);
  }
  SUBCASE("empirical projected moment converges to the truth") {
    const ModelInstance m = build_cryo_em(2, 2);
    Rng rng(89, 0);
    const BlockSignal f = random_signal(m.spec, rng);
    const GramMoment truth = population_gram(f);
    const auto batch = simulate_batch(m, f, 50000, 0.5, rng.derive(3));
    const MatrixXcd moment = debias(empirical_second_moment(batch), 0.5);
    const GramMoment rec = project_to_grams(moment, m);
    CHECK(gram_distance(rec, truth) < 0.2 * truth.norm());
  }
}

TEST_CASE("dihedral second moment carries floor(N/2)+1 real invariants") {
  const ModelInstance m = build_dihedral(6);
  Rng rng(90, 0);
  const BlockSignal f = random_signal(m.spec, rng);
  const GramMoment g = population_gram(f);
  // blocks (1,1),(2,1),(2,1),(1,1): four 1x1 grams = N/2 + 1 real numbers
  CHECK(g.grams.size() == 4);
  for (const auto& gram : g.grams) {
    CHECK(gram.rows() == 1);
    CHECK(std::abs(gram(0, 0).imag()) < 1e-12);
  }
}

TEST_CASE("2-d tomography identifies exactly the stacked gram") {
  const ModelInstance m = build_tomography_2d(1, 2);  // 3 frequency blocks, 2 shells
  Rng rng(91, 0);
  SUBCASE("projected moment equals the stacked gram") {
    const BlockSignal f = random_signal(m.spec, rng);
    const GramMoment stacked = model_gram(m, f);
    REQUIRE(stacked.grams.size() == 1);
    MatrixXcd direct = MatrixXcd::Zero(2, 2);
    for (const auto& a : f.mats) direct += a.adjoint() * a;
    CHECK((stacked.grams[0] - direct).norm() < 1e-12);
  }
  SUBCASE("distinct signals can share the stacked gram") {
    BlockSignal f1 = zero_signal(m.spec);
    BlockSignal f2 = zero_signal(m.spec);
    f1.mats[0](0, 0) = 1.0;  // energy in frequency block 0
    f2.mats[1](0, 0) = 1.0;  // same shell, frequency block 1
    CHECK(gram_distance(model_gram(m, f1), model_gram(m, f2)) < 1e-14);
    CHECK(gram_distance(population_gram(f1), population_gram(f2)) > 0.5);
  }
}
