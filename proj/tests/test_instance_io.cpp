#include <random>
#include <string>

#include "doctest.h"
#include "support.hpp"
#include "trolink/expectation.hpp"
#include "trolink/gen.hpp"
#include "trolink/instance_io.hpp"

using namespace trolink;
using io::Json;
using testing::unit;

namespace {

// The diagonal-part instance written by hand: T = M2 over matrix units,
// X = diagonals, P = diagonal part.
std::string diagonal_text() {
  return R"({
  "dim_k": 2, "dim_h": 2,
  "T_basis": [
    [[[1,0],[0,0]],[[0,0],[0,0]]],
    [[[0,0],[1,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0]],[[1,0],[0,0]]],
    [[[0,0],[0,0]],[[0,0],[1,0]]]
  ],
  "X_basis": [
    [[[1,0],[0,0]],[[0,0],[0,0]]],
    [[[0,0],[0,0]],[[0,0],[1,0]]]
  ],
  "P_coeffs": [
    [[1,0],[0,0],[0,0],[0,0]],
    [[0,0],[0,0],[0,0],[1,0]]
  ],
  "seed": 3
})";
}

void expect_invalid(const std::string& text, const std::string& needle) {
  CAPTURE(needle);
  try {
    io::parse_instance(text);
    FAIL("accepted malformed input");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

bool bit_identical(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index i = 0; i < a.size(); ++i) {
    if (a.data()[i] != b.data()[i]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("parse the hand-written diagonal instance") {
  const io::InstanceFile f = io::parse_instance(diagonal_text());
  CHECK(f.dim_k == 2);
  CHECK(f.t_basis.size() == 4);
  CHECK(f.x_basis.size() == 2);
  REQUIRE(f.p_coeffs);
  CHECK(f.seed == 3u);
  const io::Loaded l = io::load(f, {});
  REQUIRE(l.p);
  ComplexMatrix a(2, 2);
  a << Complex(1, 2), 3.0, 4.0, Complex(0, -5);
  CHECK((l.p->apply(a) - ComplexMatrix(a.diagonal().asDiagonal())).norm() < 1e-14);
}

TEST_CASE("scalars round-trip bit for bit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  ComplexMatrix m(3, 2);
  for (Index i = 0; i < m.size(); ++i) {
    m.data()[i] = Complex(u(rng) * std::pow(10.0, ex(rng)), u(rng) / 3.0);
  }
  m(0, 0) = Complex(0.1, -0.0);
  m(1, 0) = Complex(5e-324, 1.7976931348623157e308);
  const Json j = io::matrix_to_json(m);
  const ComplexMatrix back = io::matrix_from_json(Json::parse(j.dump()), "m");
  CHECK(bit_identical(m, back));
}

TEST_CASE("generated instance files round-trip") {
  std::vector<gen::Instance> all;
  all.push_back(gen::corner_instance(2, 3, 2, 3, 4));
  all.push_back(gen::group_average_instance(3, 2, 3, 9));
  for (std::uint64_t s = 1; s <= 5; ++s) all.push_back(gen::random_instance(4, s));
  for (const auto& inst : all) {
    io::InstanceFile f = io::from_instance(inst);
    const std::string text = io::write_instance(f);
    const io::InstanceFile g = io::parse_instance(text);
    CHECK(io::write_instance(g) == text);
    REQUIRE(g.t_basis.size() == f.t_basis.size());
    for (std::size_t k = 0; k < f.t_basis.size(); ++k)
      CHECK(bit_identical(f.t_basis[k], g.t_basis[k]));
    REQUIRE(g.p_coeffs);
    CHECK(bit_identical(*f.p_coeffs, *g.p_coeffs));
    // The reloaded P is the generated one.
    const io::Loaded l = io::load(g, {});
    REQUIRE(l.p);
    CHECK(map_distance(*l.p, inst.p) < 1e-12);
  }
}

TEST_CASE("E_blocks round-trip through coefficients") {
  const gen::Instance inst = gen::random_instance(4, 7);
  const auto e = expectation::assemble_expectation(inst.p, inst.x, inst.t);
  io::InstanceFile f = io::from_instance(inst);
  f.e_blocks = io::e_blocks_of(e, f.t_basis, f.x_basis);
  const io::Loaded l = io::load(io::parse_instance(io::write_instance(f)), {});
  REQUIRE(l.e);
  CHECK(expectation::block_distance(*l.e, e) < 1e-10);
}

TEST_CASE("P given against a redundant spanning list") {
  // T_basis lists E11 twice; consistent coefficients are accepted.
  Json j = Json::parse(diagonal_text());
  j["T_basis"].push_back(j["T_basis"][0]);
  j["P_coeffs"] = Json::parse(
      "[[[1,0],[0,0],[0,0],[0,0],[1,0]],[[0,0],[0,0],[0,0],[1,0],[0,0]]]");
  CHECK_NOTHROW(io::load(io::parse_instance(j.dump()), {}));
  // Sending the two copies of E11 to different places is inconsistent.
  j["P_coeffs"] = Json::parse(
      "[[[1,0],[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[1,0],[0,0]]]");
  try {
    io::load(io::parse_instance(j.dump()), {});
    FAIL("accepted inconsistent coefficients");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("P_coeffs") != std::string::npos);
  }
}

TEST_CASE("diagnostics name the offending field") {
  expect_invalid("{", "not valid JSON");
  expect_invalid("[]", "top level");
  expect_invalid(R"({"dim_h": 2, "T_basis": []})", "dim_k");
  expect_invalid(R"({"dim_k": 0, "dim_h": 2, "T_basis": []})", "dim_k");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1})", "T_basis: missing");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": []})", "T_basis");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[1]]]})",
                 "T_basis[0][0][0]: expected [re, im]");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[[1,0]]], [[[1]]]]})",
                 "T_basis[1][0][0]");
  expect_invalid(R"({"dim_k": 2, "dim_h": 1, "T_basis": [[[[1,0]]]]})",
                 "T_basis[0]: expected a 2x1 matrix");
  expect_invalid(R"({"dim_k": 1, "dim_h": 2, "T_basis": [[[[1,0],[0,0]]]],
                     "X_basis": [[[[1,0]]]]})",
                 "X_basis[0]");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[[1,0]]]],
                     "P_coeffs": [[[1,0],[2,0]]]})",
                 "P_coeffs");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[[1,0]]]],
                     "tolerances": {"residual": -1}})",
                 "tolerances");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[[1,0]]]],
                     "tolerances": {"speed": 1}})",
                 "tolerances.speed");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[[1,0]]]], "seed": -4})",
                 "seed");
  expect_invalid(R"({"dim_k": 1, "dim_h": 1, "T_basis": [[[[1,0]]]],
                     "E_blocks": {"e11": []}})",
                 "E_blocks.e12");
}

TEST_CASE("fnv1a digest") {
  // Reference values of the 64-bit FNV-1a hash.
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a_hex("foobar") == "85944171f73967e8");
}
