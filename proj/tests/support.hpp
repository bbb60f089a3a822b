#pragma once

#include <vector>

#include "trolink/mats.hpp"
#include "trolink/ratio_ascent.hpp"
#include "trolink/tro.hpp"

namespace testing {

using trolink::ComplexMatrix;
using trolink::Index;

inline ComplexMatrix unit(Index i, Index j, Index m = 2, Index n = 2) {
  ComplexMatrix e = ComplexMatrix::Zero(m, n);
  e(i, j) = 1.0;
  return e;
}

inline trolink::mats::SubspaceBasis span(std::vector<ComplexMatrix> list) {
  return trolink::mats::orthonormal_basis(list);
}

inline trolink::tro::Tro tro_of(std::vector<ComplexMatrix> list) {
  return trolink::tro::Tro(span(std::move(list)));
}

inline ComplexMatrix diag2(double a, double b) {
  ComplexMatrix d = ComplexMatrix::Zero(2, 2);
  d(0, 0) = a;
  d(1, 1) = b;
  return d;
}

}  // namespace testing
