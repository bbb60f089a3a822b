#include "doctest.h"
#include "support.hpp"
#include "trolink/expectation.hpp"
#include "trolink/gen.hpp"
#include "trolink/pipeline.hpp"

using namespace trolink;
using namespace trolink::expectation;
using testing::tro_of;
using testing::unit;

namespace {

struct Fixture {
  Tro t;
  Tro x;
  TroMap p;
};

// T = M2, X = diagonal matrices, P = diagonal part.
Fixture diagonal_part() {
  Tro t(gen::full_space(2, 2));
  Tro x = tro_of({unit(0, 0), unit(1, 1)});
  TroMap p = TroMap::from_function(t.space(), x.space(), [](const ComplexMatrix& a) {
    return ComplexMatrix(a.diagonal().asDiagonal());
  });
  return {std::move(t), std::move(x), std::move(p)};
}

Fixture identity_on(Tro t) {
  TroMap p = TroMap::identity(t.space());
  Tro x = t;
  return {std::move(t), std::move(x), std::move(p)};
}

TroMap transpose_on_m2() {
  const auto s = gen::full_space(2, 2);
  return TroMap::from_function(s, s, [](const ComplexMatrix& a) {
    return ComplexMatrix(a.transpose());
  });
}

ProbeOptions quick() { return {2, 60}; }

}  // namespace

TEST_CASE("TroMap basics") {
  const auto s = gen::full_space(2, 2);
  const auto diag = testing::span({unit(0, 0), unit(1, 1)});
  CHECK_THROWS_AS(TroMap::from_function(s, diag, [](const ComplexMatrix& a) { return a; }),
                  InvalidInput);
  CHECK_THROWS_AS(TroMap(s, diag, ComplexMatrix::Zero(3, 4)), InvalidInput);
  const TroMap tr = transpose_on_m2();
  const TroMap twice = compose(tr, tr);
  CHECK(map_distance(twice, TroMap::identity(s)) < 1e-14);
  CHECK(map_distance(tr, TroMap::identity(s)) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("dagger examples") {
  const Fixture id = identity_on(Tro(gen::full_space(2, 3)));
  const TroMap d = dagger(id.p);
  CHECK(map_distance(d, TroMap::identity(id.t.space().adjoint())) < 1e-14);

  const Fixture f = diagonal_part();
  CHECK(dagger(f.p).apply(unit(1, 0)).norm() < 1e-14);
  CHECK((dagger(f.p).apply(unit(1, 1)) - unit(1, 1)).norm() < 1e-14);
  CHECK((dagger(dagger(f.p)).coeffs() - f.p.coeffs()).norm() == 0.0);

  // P^dagger(s) = P(s^*)^* on a random map.
  Rng rng(1);
  const auto s = gen::full_space(2, 3);
  const TroMap m(s, s, random_gaussian(6, 6, rng));
  const ComplexMatrix z = random_gaussian(3, 2, rng);
  CHECK((dagger(m).apply(z) - m.apply(z.adjoint()).adjoint()).norm() < 1e-12);
}

TEST_CASE("cb probe examples") {
  const auto s = gen::full_space(2, 2);
  for (double b : cb_probe(TroMap::identity(s), 3, 4, 1)) {
    CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto tb = cb_probe(transpose_on_m2(), 2, 16, 1, 300);
  CHECK(tb[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(tb[1] >= 2.0 - 1e-6);
  const Fixture f = diagonal_part();
  for (double b : cb_probe(f.p, 4, 4, 2)) CHECK(b <= 1.0 + 1e-9);
}

TEST_CASE("cb probe bounds are monotone") {
  Rng rng(3);
  const auto s = gen::full_space(2, 2);
  for (int trial = 0; trial < 5; ++trial) {
    const TroMap m(s, s, random_gaussian(4, 4, rng));
    const auto b = cb_probe(m, 3, 2, trial, 50);
    CHECK(b[1] >= b[0] - 1e-9);
    CHECK(b[2] >= b[1] - 1e-9);
  }
}

TEST_CASE("TRO expectation checks") {
  const Fixture f = diagonal_part();
  const Report r = check_tro_expectation(f.p, f.x, f.t, 2, 0, quick());
  CHECK(r.passed());
  REQUIRE(r.find("module: P(a x* y) = P(a) x* y"));

  const Fixture id = identity_on(Tro(gen::full_space(2, 3)));
  CHECK(check_tro_expectation(id.p, id.x, id.t, 2, 0, quick()).passed());

  // The transpose is an involution, not an idempotent, and breaks the
  // first module identity on (E12, E11, E11).
  const Tro full(gen::full_space(2, 2));
  const Report tr = check_tro_expectation(transpose_on_m2(), full, full, 1, 0, quick());
  CHECK_FALSE(tr.passed());
  CHECK_FALSE(tr.find("idempotent")->pass);
  CHECK_FALSE(tr.find("module: P(a x* y) = P(a) x* y")->pass);

  // P must land in X.
  CHECK_THROWS_AS(check_tro_expectation(id.p, f.x, f.t, 1), InvalidInput);
}

TEST_CASE("symmetrization onto symmetric matrices is flagged") {
  const Tro full(gen::full_space(2, 2));
  const auto sym = testing::span({unit(0, 0), unit(1, 1), unit(0, 1) + unit(1, 0)});
  const Tro x = Tro::unvalidated(sym);
  const TroMap p = TroMap::from_function(full.space(), sym, [](const ComplexMatrix& a) {
    return ComplexMatrix(0.5 * (a + a.transpose()));
  });
  const Report r = check_tro_expectation(p, x, full, 1, 0, quick());
  CHECK(r.find("idempotent")->pass);
  CHECK(r.find("contractive[L=1]")->pass);
  CHECK_FALSE(r.passed());
  CHECK_FALSE(tro::is_tro(sym).ok);
}

TEST_CASE("corner maps of the diagonal part") {
  const Fixture f = diagonal_part();
  const TroMap left = corner_map(f.p, Side::left, f.x, f.t);
  CHECK(left.apply(unit(0, 1)).norm() < 1e-12);
  CHECK((left.apply(unit(1, 1)) - unit(1, 1)).norm() < 1e-12);
  const TroMap right = corner_map(f.p, Side::right, f.x, f.t);
  CHECK(right.apply(unit(1, 0)).norm() < 1e-12);
  // Identity on <XX*>.
  for (const auto& e : left.target().elements()) {
    CHECK((left.apply(e) - e).norm() < 1e-12);
  }
}

TEST_CASE("corner maps of the identity are identities") {
  const Fixture id = identity_on(gen::random_tro(3, 2, 2, 5));
  const TroMap left = corner_map(id.p, Side::left, id.x, id.t);
  CHECK(map_distance(left, TroMap::identity(left.source())) < 1e-10);
  const TroMap right = corner_map(id.p, Side::right, id.x, id.t);
  CHECK(map_distance(right, TroMap::identity(right.source())) < 1e-10);
}

TEST_CASE("corner maps refuse a degenerate sub-TRO") {
  const auto inst = gen::degenerate_instance(gen::DegenerateKind::missing_nondegeneracy, 0);
  CHECK_THROWS_AS(corner_map(inst.p, Side::left, inst.x, inst.t), Degeneracy);
  CHECK_THROWS_AS(welldefined_check(inst.p, inst.x, inst.t, 4, 1), Degeneracy);
  CHECK_THROWS_AS(assemble_expectation(inst.p, inst.x, inst.t), Degeneracy);
}

TEST_CASE("corner formula is independent of the decomposition") {
  const Fixture f = diagonal_part();
  CHECK(welldefined_check(f.p, f.x, f.t, 20, 3) <= 1e-9);
  // E12 = E12 E22^* = (E12 + E11) E22^* - E11 E22^*; both give P(.)E22 = 0.
  const ComplexMatrix a = f.p.apply(unit(0, 1)) * unit(1, 1).adjoint();
  const ComplexMatrix b = f.p.apply(unit(0, 1) + unit(0, 0)) * unit(1, 1).adjoint() -
                          f.p.apply(unit(0, 0)) * unit(1, 1).adjoint();
  CHECK(a.norm() == 0.0);
  CHECK(b.norm() == 0.0);
  const Fixture id = identity_on(Tro(gen::full_space(2, 2)));
  CHECK(welldefined_check(id.p, id.x, id.t, 10, 4) <= 1e-12);
}

TEST_CASE("assembled expectation of the diagonal part is the 8-entry mask") {
  const Fixture f = diagonal_part();
  const BlockExpectation e = assemble_expectation(f.p, f.x, f.t);
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(16);
  for (auto [i, j] : std::vector<std::pair<int, int>>{
           {0, 0}, {1, 1}, {0, 2}, {1, 3}, {2, 0}, {3, 1}, {2, 2}, {3, 3}}) {
    mask(i + 4 * j) = 1.0;
  }
  const ComplexMatrix expected = mask.cast<Complex>().asDiagonal();
  CHECK((e.vec_operator() - expected).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(block_consistency_residual(e, f.x, f.t) <= 1e-12);
}

TEST_CASE("assembled expectation of the identity is the identity") {
  const Fixture id = identity_on(Tro(gen::full_space(2, 3)));
  const BlockExpectation e = assemble_expectation(id.p, id.x, id.t);
  const ComplexMatrix op = e.vec_operator();
  CHECK((op - ComplexMatrix::Identity(25, 25)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("full-rank corner instance gives compression by diag(e, f)") {
  const auto inst = gen::corner_instance(2, 3, 2, 3, 7);
  REQUIRE(inst.nondegenerate);
  const BlockExpectation e = assemble_expectation(inst.p, inst.x, inst.t);
  ComplexMatrix q = ComplexMatrix::Zero(5, 5);
  q.topLeftCorner(2, 2) = inst.left;
  q.bottomRightCorner(3, 3) = inst.right;
  Rng rng(1);
  const auto at = tro::linking_algebra(inst.t);
  for (int k = 0; k < 5; ++k) {
    const ComplexMatrix a = at.space.combine(random_gaussian(at.space.dim(), 1, rng).col(0));
    CHECK((e.apply(a) - q * a * q).norm() <= 1e-10);
  }
}

TEST_CASE("verify_expectation accepts assembled expectations") {
  const Fixture f = diagonal_part();
  const BlockExpectation e = assemble_expectation(f.p, f.x, f.t);
  const Report r = verify_expectation(e, f.x, f.t, 8, 2, 1, quick());
  CHECK(r.passed());
  CHECK(r.worst_residual() <= 1e-8);

  const Fixture id = identity_on(Tro(gen::full_space(1, 2)));
  const Report ri = verify_expectation(assemble_expectation(id.p, id.x, id.t), id.x,
                                       id.t, 4, 2, 1, quick());
  CHECK(ri.passed());
  CHECK(ri.worst_residual() <= 1e-12);
}

TEST_CASE("a leaking e11 is caught") {
  const Fixture f = diagonal_part();
  BlockExpectation e = assemble_expectation(f.p, f.x, f.t);
  // Send E12 in the upper-left corner to 0.1 E11.
  ComplexMatrix c = e.e11.coeffs();
  const ComplexVector src = e.e11.source().coordinates(unit(0, 1));
  const ComplexVector dst = e.e11.target().coordinates(unit(0, 0));
  c += 0.1 * dst * src.adjoint();
  e.e11 = TroMap(e.e11.source(), e.e11.target(), c);
  const Report r = verify_expectation(e, f.x, f.t, 8, 1, 1, quick());
  CHECK_FALSE(r.passed());
  const double worst = std::max({r.find("idempotent")->residual,
                                 r.find("bimodule: E(b a) = b E(a)")->residual,
                                 r.find("bimodule: E(a b) = E(a) b")->residual});
  CHECK(worst > 0.01);
  CHECK_THROWS_AS(uniqueness_check(e, f.p, f.x, f.t), PreconditionViolation);
}

TEST_CASE("uniqueness and extraction") {
  const Fixture f = diagonal_part();
  const BlockExpectation e = assemble_expectation(f.p, f.x, f.t);
  const auto u = uniqueness_check(e, f.p, f.x, f.t);
  CHECK(u.equal);
  CHECK(u.forcing_residual <= 1e-12);
  CHECK(u.block_deviation <= 1e-12);

  const TroMap p = extract_from_expectation(e, f.x, f.t);
  CHECK(map_distance(p, f.p) <= 1e-12);

  const Fixture id = identity_on(Tro(gen::full_space(2, 2)));
  const BlockExpectation ei = assemble_expectation(id.p, id.x, id.t);
  CHECK(uniqueness_check(ei, id.p, id.x, id.t).equal);
  CHECK(map_distance(extract_from_expectation(ei, id.x, id.t), id.p) <= 1e-12);

  // e12 must agree with P.
  CHECK_THROWS_AS(uniqueness_check(ei, f.p, f.x, f.t), PreconditionViolation);
  BlockExpectation wrong = e;
  wrong.e12 = TroMap(e.e12.source(), e.e12.target(), 0.5 * e.e12.coeffs());
  CHECK_THROWS_AS(uniqueness_check(wrong, f.p, f.x, f.t), PreconditionViolation);
}

TEST_CASE("perturbing e21 breaks an axiom") {
  const auto inst = gen::group_average_instance(3, 2, 2, 4);
  REQUIRE(inst.nondegenerate);
  const BlockExpectation e = assemble_expectation(inst.p, inst.x, inst.t);
  Rng rng(5);
  ComplexMatrix d = random_gaussian(e.e21.coeffs().rows(), e.e21.coeffs().cols(), rng);
  d /= d.colwise().norm().maxCoeff();
  BlockExpectation bent = e;
  bent.e21 = TroMap(e.e21.source(), e.e21.target(), e.e21.coeffs() + 1e-3 * d);
  const Report r = verify_expectation(bent, inst.x, inst.t, 8, 1, 1, quick());
  CHECK_FALSE(r.passed());
  CHECK(r.worst_residual() >= 1e-4);
}

TEST_CASE("pipeline rejects each degenerate kind at its gate") {
  using gen::DegenerateKind;
  for (auto kind : {DegenerateKind::missing_nondegeneracy,
                    DegenerateKind::noncontractive_P, DegenerateKind::non_tro_X}) {
    const auto inst = gen::degenerate_instance(kind, 0);
    PipelineOptions o;
    o.amplification_level = 1;
    o.probe = quick();
    const auto r = run_pipeline(inst.t, inst.x, inst.p, o);
    CHECK(r.failed_gate == inst.expected_gate);
  }
}
