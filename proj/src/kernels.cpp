#include "trolink/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace trolink::kernels {
namespace {

ComplexMatrix apply_op(const ComplexMatrix& m, Op op) {
  return op == Op::plain ? m : ComplexMatrix(m.adjoint());
}

void check_same_shape(std::span<const ComplexMatrix> ms, Index rows,
                      Index cols, const char* what) {
  for (const auto& m : ms) {
    if (m.rows() != rows || m.cols() != cols) {
      throw InvalidInput(std::string(what) + ": mixed matrix dimensions");
    }
  }
}

struct TernaryShape {
  Index rows = 0;
  Index cols = 0;
  Index count = 0;
};

TernaryShape ternary_shape(std::span<const ComplexMatrix> a,
                           std::span<const ComplexMatrix> b,
                           std::span<const ComplexMatrix> c) {
  TernaryShape s;
  s.count = static_cast<Index>(a.size() * b.size() * c.size());
  if (s.count == 0) return s;
  s.rows = a.front().rows();
  s.cols = a.front().cols();
  check_same_shape(a, s.rows, s.cols, "ternary_products");
  check_same_shape(b, s.rows, s.cols, "ternary_products");
  check_same_shape(c, s.rows, s.cols, "ternary_products");
  return s;
}

struct PairShape {
  Index rows = 0;
  Index cols = 0;
  Index count = 0;
};

PairShape pair_shape(std::span<const ComplexMatrix> a, Op op_a,
                     std::span<const ComplexMatrix> b, Op op_b) {
  PairShape s;
  s.count = static_cast<Index>(a.size() * b.size());
  if (s.count == 0) return s;
  const Index a_rows = op_a == Op::plain ? a.front().rows() : a.front().cols();
  const Index a_cols = op_a == Op::plain ? a.front().cols() : a.front().rows();
  const Index b_rows = op_b == Op::plain ? b.front().rows() : b.front().cols();
  const Index b_cols = op_b == Op::plain ? b.front().cols() : b.front().rows();
  check_same_shape(a, a.front().rows(), a.front().cols(), "pair_products");
  check_same_shape(b, b.front().rows(), b.front().cols(), "pair_products");
  if (a_cols != b_rows) throw InvalidInput("pair_products: inner dimension");
  s.rows = a_rows;
  s.cols = b_cols;
  return s;
}

// vec(x g) - vec(g x) = (g^T (x) I - I (x) g) vec(x) for column-major vec.
void commutation_block(const ComplexMatrix& g, Index d,
                       Eigen::Ref<ComplexMatrix> out) {
  for (Index q = 0; q < d; ++q) {
    for (Index p = 0; p < d; ++p) {
      // column p + q d of the operator: x = E_pq
      // x g has row p equal to row q of g; g x has column q equal to column
      // p of g.
      auto col = out.col(p + q * d);
      col.setZero();
      for (Index j = 0; j < d; ++j) col(p + j * d) += g(q, j);
      for (Index i = 0; i < d; ++i) col(i + q * d) -= g(i, p);
    }
  }
}

ComplexMatrix triangular_factor(const ComplexMatrix& stacked, Index n) {
  if (stacked.rows() == 0) return ComplexMatrix::Zero(0, n);
  Eigen::HouseholderQR<ComplexMatrix> qr(stacked);
  const Index r = std::min(stacked.rows(), n);
  ComplexMatrix out =
      qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  return out;
}

// Reduce generators [begin, end) to a triangular factor, chunk by chunk.
ComplexMatrix reduce_range(Index d, std::span<const ComplexMatrix> gens,
                           std::size_t begin, std::size_t end) {
  const Index n = d * d;
  constexpr std::size_t chunk = 8;
  ComplexMatrix r = ComplexMatrix::Zero(0, n);
  for (std::size_t lo = begin; lo < end; lo += chunk) {
    const std::size_t hi = std::min(end, lo + chunk);
    const Index blocks = static_cast<Index>(2 * (hi - lo));
    ComplexMatrix stacked(r.rows() + blocks * n, n);
    stacked.topRows(r.rows()) = r;
    Index row = r.rows();
    for (std::size_t g = lo; g < hi; ++g) {
      commutation_block(gens[g], d, stacked.middleRows(row, n));
      row += n;
      commutation_block(gens[g].adjoint(), d, stacked.middleRows(row, n));
      row += n;
    }
    r = triangular_factor(stacked, n);
  }
  return r;
}

void check_commutant_inputs(Index d, std::span<const ComplexMatrix> gens) {
  if (d <= 0) throw InvalidInput("commutant: dimension must be positive");
  check_same_shape(gens, d, d, "commutant");
}

}  // namespace

namespace serial {

ComplexMatrix ternary_products(std::span<const ComplexMatrix> a,
                               std::span<const ComplexMatrix> b,
                               std::span<const ComplexMatrix> c) {
  const auto s = ternary_shape(a, b, c);
  ComplexMatrix out(s.rows * s.cols, s.count);
  Index col = 0;
  for (const auto& ai : a) {
    for (const auto& bj : b) {
      const ComplexMatrix ab = ai * bj.adjoint();
      for (const auto& ck : c) {
        const ComplexMatrix p = ab * ck;
        out.col(col++) = Eigen::Map<const ComplexVector>(p.data(), p.size());
      }
    }
  }
  return out;
}

ComplexMatrix pair_products(std::span<const ComplexMatrix> a, Op op_a,
                            std::span<const ComplexMatrix> b, Op op_b) {
  const auto s = pair_shape(a, op_a, b, op_b);
  ComplexMatrix out(s.rows * s.cols, s.count);
  Index col = 0;
  for (const auto& ai : a) {
    const ComplexMatrix left = apply_op(ai, op_a);
    for (const auto& bj : b) {
      const ComplexMatrix p = left * apply_op(bj, op_b);
      out.col(col++) = Eigen::Map<const ComplexVector>(p.data(), p.size());
    }
  }
  return out;
}

Eigen::VectorXd residuals(const ComplexMatrix& basis,
                          const ComplexMatrix& candidates) {
  Eigen::VectorXd out(candidates.cols());
  for (Index k = 0; k < candidates.cols(); ++k) {
    ComplexVector v = candidates.col(k);
    if (basis.cols() > 0) v -= basis * (basis.adjoint() * v);
    out(k) = v.norm();
  }
  return out;
}

ComplexMatrix commutant_system(Index d, std::span<const ComplexMatrix> gens) {
  check_commutant_inputs(d, gens);
  return reduce_range(d, gens, 0, gens.size());
}

}  // namespace serial

namespace parallel {

ComplexMatrix ternary_products(std::span<const ComplexMatrix> a,
                               std::span<const ComplexMatrix> b,
                               std::span<const ComplexMatrix> c) {
  const auto s = ternary_shape(a, b, c);
  ComplexMatrix out(s.rows * s.cols, s.count);
  const Index nb = static_cast<Index>(b.size());
  const Index nc = static_cast<Index>(c.size());
  const Index outer = static_cast<Index>(a.size()) * nb;
#pragma omp parallel for schedule(static)
  for (Index ij = 0; ij < outer; ++ij) {
    const ComplexMatrix ab = a[ij / nb] * b[ij % nb].adjoint();
    for (Index k = 0; k < nc; ++k) {
      const ComplexMatrix p = ab * c[k];
      out.col(ij * nc + k) =
          Eigen::Map<const ComplexVector>(p.data(), p.size());
    }
  }
  return out;
}

ComplexMatrix pair_products(std::span<const ComplexMatrix> a, Op op_a,
                            std::span<const ComplexMatrix> b, Op op_b) {
  const auto s = pair_shape(a, op_a, b, op_b);
  ComplexMatrix out(s.rows * s.cols, s.count);
  const Index na = static_cast<Index>(a.size());
  const Index nb = static_cast<Index>(b.size());
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < na; ++i) {
    const ComplexMatrix left = apply_op(a[i], op_a);
    for (Index j = 0; j < nb; ++j) {
      const ComplexMatrix p = left * apply_op(b[j], op_b);
      out.col(i * nb + j) =
          Eigen::Map<const ComplexVector>(p.data(), p.size());
    }
  }
  return out;
}

Eigen::VectorXd residuals(const ComplexMatrix& basis,
                          const ComplexMatrix& candidates) {
  Eigen::VectorXd out(candidates.cols());
  const Index n = candidates.cols();
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < n; ++k) {
    ComplexVector v = candidates.col(k);
    if (basis.cols() > 0) v -= basis * (basis.adjoint() * v);
    out(k) = v.norm();
  }
  return out;
}

ComplexMatrix commutant_system(Index d, std::span<const ComplexMatrix> gens) {
  check_commutant_inputs(d, gens);
  const Index n = d * d;
  const int threads = std::max(1, omp_get_max_threads());
  if (threads == 1 || gens.size() < 2 * static_cast<std::size_t>(threads)) {
    return reduce_range(d, gens, 0, gens.size());
  }
  std::vector<ComplexMatrix> partial(static_cast<std::size_t>(threads));
  const std::size_t per = (gens.size() + threads - 1) / threads;
#pragma omp parallel for schedule(static)
  for (int t = 0; t < threads; ++t) {
    const std::size_t lo = std::min(gens.size(), t * per);
    const std::size_t hi = std::min(gens.size(), lo + per);
    partial[t] = reduce_range(d, gens, lo, hi);
  }
  Index rows = 0;
  for (const auto& r : partial) rows += r.rows();
  ComplexMatrix stacked(rows, n);
  Index row = 0;
  for (const auto& r : partial) {
    stacked.middleRows(row, r.rows()) = r;
    row += r.rows();
  }
  return triangular_factor(stacked, n);
}

}  // namespace parallel
}  // namespace trolink::kernels
