#pragma once

// Product-enumeration kernels used by every span computation.
//
// Each kernel exists twice: `serial` is the plain reference loop and is only
// used by the tests and the benchmark; `parallel` distributes the independent
// outer index over OpenMP threads and is what the library calls. The product
// and residual kernels write into fixed column positions, so both variants
// agree bitwise. commutant_system reduces per-thread partial factors, so the
// two variants agree only up to a unitary on the left (same R^* R).

#include <span>

#include "trolink/mats.hpp"

namespace trolink::kernels {

enum class Op { plain, adjoint };

/// Column (i * |b| + j) * |c| + k is vec(a_i b_j^* c_k).
/// All inputs share one shape r x c; the products are r x c.
namespace serial {
ComplexMatrix ternary_products(std::span<const ComplexMatrix> a,
                               std::span<const ComplexMatrix> b,
                               std::span<const ComplexMatrix> c);
/// Column i * |b| + j is vec(op_a(a_i) op_b(b_j)).
ComplexMatrix pair_products(std::span<const ComplexMatrix> a, Op op_a,
                            std::span<const ComplexMatrix> b, Op op_b);
/// HS distance of each column of `candidates` from span(basis columns).
Eigen::VectorXd residuals(const ComplexMatrix& basis,
                          const ComplexMatrix& candidates);
/// Upper-triangular R with R^* R = K^* K, where K stacks the d^2 x d^2
/// systems vec(x g - g x) = 0 and vec(x g^* - g^* x) = 0 over all
/// generators g.
ComplexMatrix commutant_system(Index d, std::span<const ComplexMatrix> gens);
}  // namespace serial

namespace parallel {
ComplexMatrix ternary_products(std::span<const ComplexMatrix> a,
                               std::span<const ComplexMatrix> b,
                               std::span<const ComplexMatrix> c);
ComplexMatrix pair_products(std::span<const ComplexMatrix> a, Op op_a,
                            std::span<const ComplexMatrix> b, Op op_b);
Eigen::VectorXd residuals(const ComplexMatrix& basis,
                          const ComplexMatrix& candidates);
ComplexMatrix commutant_system(Index d, std::span<const ComplexMatrix> gens);
}  // namespace parallel

}  // namespace trolink::kernels
