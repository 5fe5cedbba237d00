#include <doctest.h>

#include <Eigen/SVD>

#include "mra/models.hpp"
#include "mra/moment.hpp"
#include "mra/rep.hpp"

using namespace mra;

namespace {

RepSpec make_spec(std::vector<std::pair<int, int>> shape, Field field = Field::Complex) {
  RepSpec spec;
  for (auto [d, r] : shape) spec.blocks.push_back({d, r, Parity::None});
  spec.field = field;
  return spec;
}

RepSpec rotated_images_spec() { return make_spec({{1, 4}, {1, 4}, {1, 4}, {1, 4}, {1, 4}}); }

// Numerical rank of the span of sampled ambiguity-orbit points; the
// brute-force counterpart of the closed-form orbit dimension.
int sampled_orbit_rank(const BlockSignal& f, int samples, Rng& rng) {
  const int n = f.spec.total_dim();
  MatrixXcd cols(n, samples);
  for (int i = 0; i < samples; ++i)
    cols.col(i) = flatten(apply_ambiguity(random_ambiguity(f.spec, rng), f));
  Eigen::JacobiSVD<MatrixXcd> svd(cols);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > 1e-10 * s[0]) ++rank;
  return rank;
}

}  // namespace

TEST_CASE("flatten fixed layouts") {
  SUBCASE("single entry") {
    BlockSignal f{make_spec({{1, 1}}), {MatrixXcd::Constant(1, 1, 3.0)}};
    const VectorXcd v = flatten(f);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == Cplx(3, 0));
  }
  SUBCASE("column copy") {
    MatrixXcd a(2, 1);
    a << 1.0, 2.0;
    BlockSignal f{make_spec({{2, 1}}), {a}};
    const VectorXcd v = flatten(f);
    CHECK(v[0] == Cplx(1, 0));
    CHECK(v[1] == Cplx(2, 0));
  }
  SUBCASE("blocks in order, column-major within") {
    MatrixXcd a(1, 2);
    a << 5.0, 6.0;
    MatrixXcd b(2, 1);
    b << 1.0, 2.0;
    BlockSignal f{make_spec({{1, 2}, {2, 1}}), {a, b}};
    const VectorXcd v = flatten(f);
    REQUIRE(v.size() == 4);
    CHECK(v[0] == Cplx(5, 0));
    CHECK(v[1] == Cplx(6, 0));
    CHECK(v[2] == Cplx(1, 0));
    CHECK(v[3] == Cplx(2, 0));
  }
}

TEST_CASE("flatten and unflatten are exact inverses") {
  Rng rng(21, 0);
  const RepSpec spec = make_spec({{3, 2}, {1, 5}, {2, 2}});
  for (int t = 0; t < 5; ++t) {
    const BlockSignal f = random_signal(spec, rng);
    const BlockSignal back = unflatten(spec, flatten(f));
    for (std::size_t l = 0; l < f.mats.size(); ++l)
      CHECK((back.mats[l] - f.mats[l]).norm() == 0.0);
  }
}

TEST_CASE("apply_ambiguity basics") {
  SUBCASE("identity factors leave the signal unchanged") {
    Rng rng(22, 0);
    const RepSpec spec = make_spec({{2, 3}, {3, 1}});
    const BlockSignal f = random_signal(spec, rng);
    const BlockSignal g = apply_ambiguity(identity_ambiguity(spec), f);
    CHECK(signal_distance_up_to_phase(f, g) < 1e-14);
    for (std::size_t l = 0; l < f.mats.size(); ++l)
      CHECK((g.mats[l] - f.mats[l]).norm() == 0.0);
  }
  SUBCASE("phase on a one-dimensional block") {
    const RepSpec spec = make_spec({{1, 1}});
    BlockSignal f{spec, {MatrixXcd::Constant(1, 1, 1.0)}};
    AmbiguityElement h{spec, {MatrixXcd::Constant(1, 1, std::polar(1.0, 0.7))}};
    const BlockSignal g = apply_ambiguity(h, f);
    CHECK(std::abs(g.mats[0](0, 0) - std::polar(1.0, 0.7)) < 1e-15);
  }
  SUBCASE("non-unitary factor rejected") {
    const RepSpec spec = make_spec({{1, 1}});
    AmbiguityElement h{spec, {MatrixXcd::Constant(1, 1, 2.0)}};
    CHECK_THROWS_AS(h.validate(), ValidationError);
  }
}

TEST_CASE("ambiguity leaves the gram untouched") {
  Rng rng(23, 0);
  const RepSpec spec = make_spec({{2, 3}, {3, 2}, {1, 4}});
  for (int t = 0; t < 10; ++t) {
    const BlockSignal f = random_signal(spec, rng);
    const AmbiguityElement h = random_ambiguity(spec, rng);
    CHECK(gram_distance(population_gram(apply_ambiguity(h, f)), population_gram(f)) < 1e-12);
  }
}

TEST_CASE("orbit_span_dimension closed form") {
  SUBCASE("zero signal") {
    const RepSpec spec = make_spec({{2, 2}, {3, 1}});
    CHECK(orbit_span_dimension(zero_signal(spec)) == 0);
  }
  SUBCASE("generic cryo spec hits the span cap") {
    Rng rng(24, 0);
    const ModelInstance m = build_cryo_em(4, 9);
    const BlockSignal f = random_signal(m.spec, rng);
    CHECK(orbit_span_dimension(f) == 165);
    CHECK(m.spec.span_cap() == 165);
  }
  SUBCASE("zeroed block drops its full contribution") {
    Rng rng(25, 0);
    BlockSignal f = random_signal(rotated_images_spec(), rng);
    f.mats[2].setZero();
    CHECK(orbit_span_dimension(f) == 4);
  }
  SUBCASE("invariant under ambiguity") {
    Rng rng(26, 0);
    const RepSpec spec = make_spec({{2, 3}, {3, 2}});
    const BlockSignal f = random_signal(spec, rng);
    const AmbiguityElement h = random_ambiguity(spec, rng);
    CHECK(orbit_span_dimension(apply_ambiguity(h, f)) == orbit_span_dimension(f));
  }
}

TEST_CASE("orbit_span_dimension matches brute-force sampled rank") {
  Rng rng(27, 0);
  SUBCASE("random signals") {
    const RepSpec spec = make_spec({{2, 3}, {3, 2}, {1, 2}});
    const BlockSignal f = random_signal(spec, rng);
    const int m = spec.span_cap();
    CHECK(orbit_span_dimension(f) == sampled_orbit_rank(f, 2 * m + 10, rng));
  }
  SUBCASE("constructed rank-deficient signal") {
    const RepSpec spec = make_spec({{3, 3}});
    BlockSignal f = random_signal(spec, rng);
    f.mats[0].col(1) = 2.0 * f.mats[0].col(0);               // rank 2
    f.mats[0].col(2) = f.mats[0].col(0) + f.mats[0].col(1);  // rank 1 now
    const int d = orbit_span_dimension(f);
    CHECK(d == 3);  // rank 1 x dim 3
    CHECK(d == sampled_orbit_rank(f, 2 * spec.span_cap() + 10, rng));
  }
}

TEST_CASE("orbit_span_basis spans the orbit") {
  SUBCASE("one-dimensional example") {
    const RepSpec spec = make_spec({{1, 1}});
    BlockSignal f{spec, {MatrixXcd::Constant(1, 1, 1.0)}};
    const MatrixXcd b = orbit_span_basis(f);
    REQUIRE(b.cols() == 1);
    CHECK(std::abs(std::abs(b(0, 0)) - 1.0) < 1e-14);
  }
  SUBCASE("rank one times dim two fills the block") {
    const RepSpec spec = make_spec({{2, 1}});
    MatrixXcd a(2, 1);
    a << 1.0, 0.0;
    BlockSignal f{spec, {a}};
    CHECK(orbit_span_basis(f).cols() == 2);
  }
  SUBCASE("sampled orbit points are members") {
    Rng rng(28, 0);
    const ModelInstance m = build_cryo_em(2, 3);
    const BlockSignal f = random_signal(m.spec, rng);
    const MatrixXcd b = orbit_span_basis(f);
    CHECK(b.cols() == orbit_span_dimension(f));
    CHECK((b.adjoint() * b - MatrixXcd::Identity(b.cols(), b.cols())).norm() < 1e-10);
    for (int t = 0; t < 50; ++t) {
      const VectorXcd v = flatten(apply_ambiguity(random_ambiguity(m.spec, rng), f));
      CHECK((v - b * (b.adjoint() * v)).norm() < 1e-10 * v.norm());
    }
  }
}

TEST_CASE("sparsity_bound arithmetic") {
  SUBCASE("cyclic spec is uninformative") {
    const SparsityBound b = sparsity_bound(build_cyclic(8).spec);
    CHECK(b.N == 8);
    CHECK(b.M == 8);
    CHECK(b.K_max == 0);
  }
  SUBCASE("rotated images") {
    const SparsityBound b = sparsity_bound(rotated_images_spec());
    CHECK(b.N == 20);
    CHECK(b.M == 5);
    CHECK(b.K_max == 15);
  }
  SUBCASE("cryo shell model") {
    const SparsityBound b = sparsity_bound(build_cryo_em(4, 9).spec);
    CHECK(b.N == 225);
    CHECK(b.M == 165);
    CHECK(b.K_max == 60);
  }
  SUBCASE("identity and monotonicity in multiplicities") {
    Rng rng(29, 0);
    for (int t = 0; t < 20; ++t) {
      RepSpec spec = make_spec({{1 + int(rng.uniform_index(3)), 1 + int(rng.uniform_index(4))},
                                {1 + int(rng.uniform_index(3)), 1 + int(rng.uniform_index(4))}});
      const SparsityBound b = sparsity_bound(spec);
      CHECK(b.K_max + b.M == b.N);
      RepSpec bigger = spec;
      bigger.blocks[t % 2].mult += 1;
      CHECK(sparsity_bound(bigger).K_max >= b.K_max);
    }
  }
}

TEST_CASE("random signal generation") {
  const RepSpec spec = make_spec({{1, 4}, {2, 3}, {2, 5}});  // N = 20
  SUBCASE("fixed seed reproduces bitwise") {
    Rng a(30, 0), b(30, 0);
    const BlockSignal fa = random_signal(spec, a);
    const BlockSignal fb = random_signal(spec, b);
    for (std::size_t l = 0; l < fa.mats.size(); ++l)
      CHECK((fa.mats[l] - fb.mats[l]).norm() == 0.0);
  }
  SUBCASE("sparse signal has exactly N-K vanishing coefficients") {
    Rng rng(31, 0);
    const SparseBasis basis = random_basis(spec, rng);
    const BlockSignal f = random_sparse_signal(spec, basis, 5, rng);
    const VectorXcd c = basis.vectors.adjoint() * flatten(f);
    int zeros = 0;
    for (int i = 0; i < c.size(); ++i) zeros += std::abs(c[i]) < 1e-12;
    CHECK(zeros == 15);
  }
  SUBCASE("K = N is dense") {
    Rng rng(32, 0);
    const SparseBasis basis = random_basis(spec, rng);
    const BlockSignal f = random_sparse_signal(spec, basis, 20, rng);
    const VectorXcd c = basis.vectors.adjoint() * flatten(f);
    for (int i = 0; i < c.size(); ++i) CHECK(std::abs(c[i]) > 1e-12);
  }
  SUBCASE("K out of range rejected") {
    Rng rng(33, 0);
    const SparseBasis basis = random_basis(spec, rng);
    CHECK_THROWS_AS(random_sparse_signal(spec, basis, 21, rng), ValidationError);
  }
}

TEST_CASE("random ambiguity is Haar unitary per block") {
  SUBCASE("one-dimensional blocks carry uniform phases") {
    Rng rng(34, 0);
    const RepSpec spec = make_spec({{1, 1}});
    double sum_re = 0;
    for (int t = 0; t < 10000; ++t) {
      const AmbiguityElement h = random_ambiguity(spec, rng);
      CHECK(std::abs(std::abs(h.factors[0](0, 0)) - 1.0) < 1e-12);
      sum_re += h.factors[0](0, 0).real();
    }
    CHECK(std::abs(sum_re / 10000) < 0.05);
  }
  SUBCASE("unitarity of every factor") {
    Rng rng(35, 0);
    const RepSpec spec = make_spec({{2, 2}, {4, 1}});
    for (int t = 0; t < 20; ++t) {
      const AmbiguityElement h = random_ambiguity(spec, rng);
      for (const auto& u : h.factors)
        CHECK((u.adjoint() * u - MatrixXcd::Identity(u.rows(), u.cols())).norm() < 1e-12);
    }
  }
  SUBCASE("columns are isotropic on average") {
    Rng rng(36, 0);
    MatrixXcd acc = MatrixXcd::Zero(3, 3);
    const int n = 10000;
    for (int t = 0; t < n; ++t) {
      const MatrixXcd u = haar_unitary(3, rng, false);
      acc += u.col(0) * u.col(0).adjoint();
    }
    CHECK((acc / double(n) - MatrixXcd::Identity(3, 3) / 3.0).norm() < 0.05);
  }
}

TEST_CASE("real-conjugation-invariant structure") {
  const ModelInstance m = build_cryo_em(2, 3);
  const RepSpec& spec = m.spec;
  Rng rng(37, 0);
  SUBCASE("random signals satisfy the parity constraints") {
    const BlockSignal f = random_signal(spec, rng);
    CHECK_NOTHROW(f.validate());
    CHECK(f.mats[0].imag().norm() == 0.0);  // even block real
    CHECK(f.mats[1].real().norm() == 0.0);  // odd block imaginary
  }
  SUBCASE("orthogonal ambiguity preserves the invariant subspace") {
    const BlockSignal f = random_signal(spec, rng);
    const AmbiguityElement h = random_ambiguity(spec, rng);
    for (const auto& u : h.factors) CHECK(u.imag().norm() < 1e-14);
    CHECK_NOTHROW(apply_ambiguity(h, f).validate());
  }
  SUBCASE("working real coordinates round trip") {
    const BlockSignal f = random_signal(spec, rng);
    const VectorXcd flat = flatten(f);
    CHECK((from_real_coords(spec, to_real_coords(spec, flat)) - flat).norm() < 1e-14);
  }
  SUBCASE("invariant signals have real coefficients in an invariant basis") {
    const SparseBasis basis = random_basis(spec, rng);
    const BlockSignal f = random_signal(spec, rng);
    const VectorXcd c = basis.vectors.adjoint() * flatten(f);
    CHECK(c.imag().norm() < 1e-12 * c.norm());
  }
}
