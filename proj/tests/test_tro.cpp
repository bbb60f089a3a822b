#include "doctest.h"
#include "support.hpp"
#include "trolink/gen.hpp"

using namespace trolink;
using namespace trolink::tro;
using testing::span;
using testing::tro_of;
using testing::unit;

TEST_CASE("ternary product examples") {
  const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  CHECK((ternary_product(id, id, id) - id).norm() == 0.0);
  CHECK((ternary_product(unit(0, 1), unit(0, 1), unit(0, 1)) - unit(0, 1)).norm() == 0.0);
  CHECK(ternary_product(unit(0, 0), unit(0, 1), unit(1, 1)).norm() == 0.0);
  CHECK_THROWS_AS(ternary_product(id, unit(0, 0, 2, 3), id), InvalidInput);
}

// (a b^* c)^* = c^* b a^*, the ternary product of the adjoints in reverse
// order.
TEST_CASE("adjoint of a ternary product reverses it") {
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const ComplexMatrix a = random_gaussian(2, 3, rng);
    const ComplexMatrix b = random_gaussian(2, 3, rng);
    const ComplexMatrix c = random_gaussian(2, 3, rng);
    const ComplexMatrix lhs = c.adjoint() * b * a.adjoint();
    const ComplexMatrix rhs =
        ternary_product(c.adjoint(), b.adjoint(), a.adjoint());
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((lhs - ternary_product(a, b, c).adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("is_tro examples") {
  CHECK(is_tro(span({unit(0, 0)})).ok);
  CHECK(is_tro(span({unit(0, 1), unit(1, 0)})).ok);
  const auto bad = is_tro(span({unit(0, 0) + 2.0 * unit(1, 1)}));
  CHECK_FALSE(bad.ok);
  CHECK(bad.worst_residual > 0.1);
  CHECK_THROWS_AS(Tro(span({unit(0, 0) + 2.0 * unit(1, 1)})), InvalidInput);
}

TEST_CASE("ternary closure examples") {
  CHECK(mats::span_equal(ternary_closure(span({unit(0, 0)})).space(),
                         span({unit(0, 0)})));
  // t t* t = E11 + 8 E22 together with t spans both units.
  CHECK(mats::span_equal(ternary_closure(span({unit(0, 0) + 2.0 * unit(1, 1)})).space(),
                         span({unit(0, 0), unit(1, 1)})));
  const auto full = gen::full_space(2, 3);
  CHECK(ternary_closure(full).dim() == 6);
}

TEST_CASE("ternary closure is idempotent") {
  Rng rng(2);
  for (int i = 0; i < 10; ++i) {
    // A generic diagonal generator plus a unit gives a proper sub-TRO.
    const std::vector<ComplexMatrix> g{unit(0, 0, 3, 2) + unit(1, 1, 3, 2) * (2.0 + i),
                                       unit(2, 1, 3, 2) * random_gaussian(1, 1, rng)(0, 0)};
    const Tro once = ternary_closure(span(g));
    const Tro twice = ternary_closure(once.space());
    CHECK(mats::span_equal(once.space(), twice.space()));
    CHECK(mats::contains(once.space(), span(g)));
  }
}

TEST_CASE("linking blocks examples") {
  // Row vectors M_{1,2}.
  const Tro row(gen::full_space(1, 2));
  auto b = linking_blocks(row);
  CHECK(b.left.dim() == 1);
  CHECK(b.right.dim() == 4);

  b = linking_blocks(tro_of({unit(0, 1), unit(1, 0)}));
  CHECK(mats::span_equal(b.left, span({unit(0, 0), unit(1, 1)})));

  b = linking_blocks(tro_of({unit(0, 0)}));
  CHECK(mats::span_equal(b.left, span({unit(0, 0)})));
  CHECK(mats::span_equal(b.right, span({unit(0, 0)})));
}

TEST_CASE("linking algebra examples") {
  auto a = linking_algebra(Tro(gen::full_space(1, 2)));
  CHECK(a.space.dim() == 9);
  a = linking_algebra(Tro(gen::full_space(1, 1)));
  CHECK(a.space.dim() == 4);
  // Diagonal 2x2: each corner is the diagonal algebra, so 4 * 2 = 8.
  a = linking_algebra(tro_of({unit(0, 0), unit(1, 1)}));
  CHECK(a.space.dim() == 8);
  CHECK(a.layout.left_count == 2);
  CHECK(a.layout.t_offset() == 2);
  CHECK(a.layout.right_offset() == 6);
  CHECK(mats::star_algebra_check(a.space).ok);
}

TEST_CASE("essential compression examples") {
  auto c = essential_compression(Tro(gen::full_space(2, 2)));
  CHECK(c.was_nondegenerate);
  CHECK(c.compressed.dim() == 4);

  c = essential_compression(tro_of({unit(0, 0)}));
  CHECK_FALSE(c.was_nondegenerate);
  CHECK(c.compressed.dim_k() == 1);
  CHECK(c.compressed.dim_h() == 1);

  c = essential_compression(tro_of({unit(0, 1)}));
  REQUIRE(c.left_isometry.cols() == 1);
  REQUIRE(c.right_isometry.cols() == 1);
  CHECK(std::abs(std::abs(c.left_isometry(0, 0)) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(c.right_isometry(1, 0)) - 1.0) < 1e-12);

  CHECK_THROWS_AS(
      essential_compression(Tro(mats::SubspaceBasis(2, 2))), Degeneracy);
}

TEST_CASE("sub-TRO nondegeneracy examples") {
  const Tro t(gen::full_space(2, 2));
  const Tro diag = tro_of({unit(0, 0), unit(1, 1)});
  auto r = subtro_nondegeneracy(diag, t);
  CHECK(r.nondegenerate);
  REQUIRE(r.checks.size() == 5);
  for (const auto& c : r.checks) CHECK(c.pass);

  r = subtro_nondegeneracy(tro_of({unit(0, 0)}), t);
  CHECK_FALSE(r.nondegenerate);
  CHECK_FALSE(r.checks[0].pass);
  CHECK(r.checks[0].name == "<XT*T>=T");

  CHECK(subtro_nondegeneracy(t, t).nondegenerate);
  CHECK_THROWS_AS(subtro_nondegeneracy(t, diag), InvalidInput);
}

TEST_CASE("linking subalgebra nondegeneracy examples") {
  const Tro t(gen::full_space(2, 2));
  CHECK(linking_subalgebra_nondegenerate(tro_of({unit(0, 0), unit(1, 1)}), t));
  CHECK_FALSE(linking_subalgebra_nondegenerate(tro_of({unit(0, 0)}), t));
  CHECK(linking_subalgebra_nondegenerate(t, t));
}

TEST_CASE("left linking block acts nondegenerately on compressed T") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Tro t = gen::random_tro(3, 2, 1 + seed % 2, seed);
    const auto b = linking_blocks(t);
    const auto el = t.space().elements();
    std::vector<ComplexMatrix> prods;
    for (const auto& c : b.left.elements())
      for (const auto& x : el) prods.push_back(c * x);
    CHECK(mats::span_equal(mats::orthonormal_basis(prods), t.space()));
  }
}

TEST_CASE("module norm examples") {
  const Tro anti = tro_of({unit(0, 1), unit(1, 0)});
  auto r = module_norm_check(unit(0, 0), anti, 20, 1);
  CHECK(r.operator_norm == doctest::Approx(1.0));
  CHECK(r.module_sup_lower_bound == doctest::Approx(1.0));

  r = module_norm_check(ComplexMatrix::Zero(2, 2), anti, 20, 1);
  CHECK(r.operator_norm == 0.0);
  CHECK(r.module_sup_lower_bound == 0.0);
  CHECK(r.gap == 0.0);

  const Tro full(gen::full_space(2, 2));
  r = module_norm_check(testing::diag2(2.0, 1.0), full, 20, 1);
  CHECK(r.operator_norm == doctest::Approx(2.0));
  CHECK(r.module_sup_lower_bound == doctest::Approx(2.0));
  CHECK(mats::operator_norm(r.witness) == doctest::Approx(1.0));
  CHECK(mats::operator_norm(testing::diag2(2.0, 1.0) * r.witness) ==
        doctest::Approx(2.0));

  CHECK_THROWS_AS(module_norm_check(unit(0, 1), anti, 4, 1), NotInSpan);
}

TEST_CASE("module norm gap closes on random pairs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Tro t = gen::random_tro(3, 3, 1, seed);
    const auto left = linking_blocks(t).left;
    Rng rng(seed);
    const ComplexMatrix c = left.combine(random_gaussian(left.dim(), 1, rng).col(0));
    const auto r = module_norm_check(c, t, 30, seed);
    CHECK(r.gap >= -1e-9);
    CHECK(r.gap <= 1e-6);
  }
}
